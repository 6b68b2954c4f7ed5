//! Model persistence: a versioned, self-describing JSON document.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dataset::Dataset;
use crate::ensembles::Model;
use crate::eus::EusConfig;
use crate::evaluation::MethodTag;
use crate::learners::WeakLearnerSpec;
use crate::{Error, Result};

pub const MODEL_FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub version: u64,
    pub method: MethodTag,
    pub learner: WeakLearnerSpec,
    pub rounds: usize,
    /// Present for EUB models only.
    pub eus: Option<EusConfig>,
    pub seed: u64,
    pub positive_label: String,
    pub negative_label: String,
    /// SHA-256 of the canonical training-dataset encoding, hex.
    pub dataset_fingerprint: String,
    pub model: Model<f64>,
}

/// SHA-256 over a canonical byte encoding of the dataset.
pub fn dataset_fingerprint(ds: &Dataset<f64>) -> String {
    let mut hasher = Sha256::new();
    hasher.update((ds.n() as u64).to_le_bytes());
    hasher.update((ds.dim() as u64).to_le_bytes());
    hasher.update(ds.positive_name().as_bytes());
    hasher.update([0u8]);
    hasher.update(ds.negative_name().as_bytes());
    hasher.update([0u8]);
    for inst in ds.instances() {
        hasher.update([inst.label.is_positive() as u8]);
        for v in &inst.features {
            hasher.update(v.to_le_bytes());
        }
    }
    hex_encode(&hasher.finalize())
}

fn hex_encode(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn save_model(file: &ModelFile, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(file)
        .map_err(|e| Error::CorruptModel(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<ModelFile> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::CorruptModel(e.to_string()))?;
    let version = value
        .get("version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::CorruptModel("missing version field".into()))?;
    if version != MODEL_FORMAT_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let file: ModelFile =
        serde_json::from_value(value).map_err(|e| Error::CorruptModel(e.to_string()))?;
    let fp = &file.dataset_fingerprint;
    if fp.len() != 64 || !fp.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(Error::CorruptModel("malformed dataset fingerprint".into()));
    }
    Ok(file)
}
