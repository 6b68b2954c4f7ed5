//! Foundational data model: labels, instances, datasets and weight vectors.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

/// Binary class tag. `Positive` is the minority class by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassLabel {
    Positive,
    Negative,
}

impl ClassLabel {
    pub fn flipped(self) -> ClassLabel {
        match self {
            ClassLabel::Positive => ClassLabel::Negative,
            ClassLabel::Negative => ClassLabel::Positive,
        }
    }

    pub fn is_positive(self) -> bool {
        self == ClassLabel::Positive
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance<F> {
    pub features: Vec<F>,
    pub label: ClassLabel,
    /// Stable 0-based position in the source dataset.
    pub id: usize,
}

/// Immutable feature matrix with binary labels.
///
/// The raw label strings of both classes are retained so predictions can be
/// reported in the caller's vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<F> {
    instances: Vec<Instance<F>>,
    dim: usize,
    positive_name: String,
    negative_name: String,
}

impl<F: Scalar> Dataset<F> {
    /// Builds a dataset from raw rows and label strings.
    ///
    /// The positive class is the minority label; on a tie the
    /// lexicographically smaller raw label becomes positive.
    pub fn from_rows(rows: Vec<Vec<F>>, labels: &[String]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidConfig("empty dataset".into()));
        }
        if rows.len() != labels.len() {
            return Err(Error::LengthMismatch { left: rows.len(), right: labels.len() });
        }
        let dim = rows[0].len();
        for (row, features) in rows.iter().enumerate() {
            if features.len() != dim {
                return Err(Error::DimensionMismatch { row, expected: dim, got: features.len() });
            }
            for (col, v) in features.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite { row, col });
                }
            }
        }
        let mut distinct: Vec<&String> = Vec::new();
        for l in labels {
            if !distinct.contains(&l) {
                distinct.push(l);
            }
        }
        if distinct.len() != 2 {
            return Err(Error::ClassCardinality { found: distinct.len() });
        }
        distinct.sort();
        let (a, b) = (distinct[0].clone(), distinct[1].clone());
        let count_a = labels.iter().filter(|l| **l == a).count();
        let count_b = labels.len() - count_a;
        // Minority is positive; tie goes to the lexicographically smaller label.
        let (positive_name, negative_name) = if count_a <= count_b { (a, b) } else { (b, a) };
        let instances = rows
            .into_iter()
            .zip(labels)
            .enumerate()
            .map(|(id, (features, raw))| Instance {
                features,
                label: if *raw == positive_name { ClassLabel::Positive } else { ClassLabel::Negative },
                id,
            })
            .collect();
        Ok(Self { instances, dim, positive_name, negative_name })
    }

    /// Assembles a dataset from already-tagged instances, keeping the class
    /// naming of a parent dataset. Ids are reassigned by position.
    pub fn from_labeled(
        rows: Vec<(Vec<F>, ClassLabel)>,
        positive_name: &str,
        negative_name: &str,
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidConfig("empty dataset".into()));
        }
        let dim = rows[0].0.len();
        for (row, (features, _)) in rows.iter().enumerate() {
            if features.len() != dim {
                return Err(Error::DimensionMismatch { row, expected: dim, got: features.len() });
            }
        }
        let instances = rows
            .into_iter()
            .enumerate()
            .map(|(id, (features, label))| Instance { features, label, id })
            .collect();
        Ok(Self {
            instances,
            dim,
            positive_name: positive_name.to_string(),
            negative_name: negative_name.to_string(),
        })
    }

    pub fn n(&self) -> usize {
        self.instances.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn instances(&self) -> &[Instance<F>] {
        &self.instances
    }

    pub fn instance(&self, id: usize) -> &Instance<F> {
        &self.instances[id]
    }

    pub fn label(&self, id: usize) -> ClassLabel {
        self.instances[id].label
    }

    pub fn positive_name(&self) -> &str {
        &self.positive_name
    }

    pub fn negative_name(&self) -> &str {
        &self.negative_name
    }

    pub fn raw_name(&self, label: ClassLabel) -> &str {
        match label {
            ClassLabel::Positive => &self.positive_name,
            ClassLabel::Negative => &self.negative_name,
        }
    }

    pub fn count(&self, label: ClassLabel) -> usize {
        self.instances.iter().filter(|i| i.label == label).count()
    }

    /// Majority count over minority count; >= 1 under the minority-positive
    /// convention of `from_rows`.
    pub fn imbalance_ratio(&self) -> Result<f64> {
        let pos = self.count(ClassLabel::Positive);
        let neg = self.n() - pos;
        if pos == 0 {
            return Err(Error::DegenerateDataset { class: "positive" });
        }
        if neg == 0 {
            return Err(Error::DegenerateDataset { class: "negative" });
        }
        Ok(neg as f64 / pos as f64)
    }

    /// Order-preserving split into (minority ids, majority ids).
    pub fn partition_by_class(&self) -> (Vec<usize>, Vec<usize>) {
        let mut minority = Vec::new();
        let mut majority = Vec::new();
        for inst in &self.instances {
            match inst.label {
                ClassLabel::Positive => minority.push(inst.id),
                ClassLabel::Negative => majority.push(inst.id),
            }
        }
        (minority, majority)
    }

    /// New dataset from the given ids (duplicates allowed); class naming is
    /// inherited, ids reassigned by position. The input ids double as the
    /// provenance map back into `self`.
    pub fn take(&self, ids: &[usize]) -> Dataset<F> {
        let instances = ids
            .iter()
            .enumerate()
            .map(|(new_id, &src)| Instance {
                features: self.instances[src].features.clone(),
                label: self.instances[src].label,
                id: new_id,
            })
            .collect();
        Dataset {
            instances,
            dim: self.dim,
            positive_name: self.positive_name.clone(),
            negative_name: self.negative_name.clone(),
        }
    }
}

/// Convenience constructor from rows plus raw label strings.
pub fn make_dataset<F: Scalar>(rows: Vec<Vec<F>>, labels: &[String]) -> Result<Dataset<F>> {
    Dataset::from_rows(rows, labels)
}

/// Normalized per-instance weight vector.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightDistribution {
    weights: Vec<f64>,
}

impl WeightDistribution {
    const SUM_TOL: f64 = 1e-9;

    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("empty weight vector".into()));
        }
        if weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidWeights("weights must be finite and non-negative".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOL {
            return Err(Error::InvalidWeights(format!("weights sum to {sum}, expected 1")));
        }
        Ok(Self { weights })
    }

    /// Normalizes an arbitrary non-negative mass vector.
    pub fn normalized(mass: &[f64]) -> Result<Self> {
        if mass.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidWeights("weights must be finite and non-negative".into()));
        }
        let sum: f64 = mass.iter().sum();
        if sum <= 0.0 {
            return Err(Error::InvalidWeights("all weights are zero".into()));
        }
        Ok(Self { weights: mass.iter().map(|w| w / sum).collect() })
    }

    pub fn uniform(n: usize) -> Self {
        Self { weights: vec![1.0 / n as f64; n] }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn get(&self, i: usize) -> f64 {
        self.weights[i]
    }
}
