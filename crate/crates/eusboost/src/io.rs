//! CSV dataset ingestion and emission.
//!
//! Format: header row, one label column (default "label"), every other
//! column a numeric feature. Values are written in scientific notation with
//! 17 significant digits so a generate/load round trip has zero drift.

use std::path::Path;

use crate::dataset::Dataset;
use crate::{Error, Result};

pub fn load_csv(path: &Path, label_col: &str) -> Result<Dataset<f64>> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let label_idx = headers
        .iter()
        .position(|h| h == label_col)
        .ok_or_else(|| Error::MissingColumn(label_col.to_string()))?;
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        let mut features = Vec::with_capacity(headers.len().saturating_sub(1));
        for (col_idx, cell) in record.iter().enumerate() {
            if col_idx == label_idx {
                labels.push(cell.to_string());
                continue;
            }
            let value: f64 = cell.parse().map_err(|e| Error::CsvValue {
                row: row_idx,
                col: headers[col_idx].to_string(),
                msg: format!("{e}"),
            })?;
            if !value.is_finite() {
                return Err(Error::CsvValue {
                    row: row_idx,
                    col: headers[col_idx].to_string(),
                    msg: format!("non-finite value '{cell}'"),
                });
            }
            features.push(value);
        }
        if labels.len() != row_idx + 1 {
            return Err(Error::MissingColumn(label_col.to_string()));
        }
        rows.push(features);
    }
    Dataset::from_rows(rows, &labels)
}

pub fn write_csv(ds: &Dataset<f64>, path: &Path, label_col: &str) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = (1..=ds.dim()).map(|i| format!("f{i}")).collect();
    header.push(label_col.to_string());
    writer.write_record(&header)?;
    for inst in ds.instances() {
        let mut record: Vec<String> = inst.features.iter().map(|v| format!("{v:.16e}")).collect();
        record.push(ds.raw_name(inst.label).to_string());
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}
