//! Synthetic two-Gaussian dataset generation for desk-scale experiments.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::dataset::Dataset;
use crate::random::RandomSource;
use crate::{Error, Result};

/// Two spherical unit-variance Gaussian clusters with means `delta` apart
/// along the first axis; class sizes follow the imbalance ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub n: usize,
    pub dims: usize,
    /// Imbalance ratio n_negative / n_positive, >= 1.
    pub ir: f64,
    /// Inter-mean distance in units of the class standard deviation.
    pub delta: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(Error::InvalidConfig("n must be >= 4".into()));
        }
        if self.dims < 1 {
            return Err(Error::InvalidConfig("dims must be >= 1".into()));
        }
        if self.ir < 1.0 || !self.ir.is_finite() {
            return Err(Error::InvalidConfig("ir must be finite and >= 1".into()));
        }
        if self.delta < 0.0 || !self.delta.is_finite() {
            return Err(Error::InvalidConfig("delta must be finite and >= 0".into()));
        }
        Ok(())
    }
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Dataset<f64>> {
    spec.validate()?;
    let n_neg = (spec.n as f64 * spec.ir / (spec.ir + 1.0)).round() as usize;
    let n_pos = spec.n - n_neg;
    if n_pos < 2 {
        return Err(Error::InvalidConfig(format!(
            "imbalance ratio {} leaves only {n_pos} positive instances",
            spec.ir
        )));
    }
    let mut rng = RandomSource::new(spec.seed).stream("synthetic");
    let mut rows = Vec::with_capacity(spec.n);
    let mut labels = Vec::with_capacity(spec.n);
    for _ in 0..n_neg {
        rows.push((0..spec.dims).map(|_| rng.sample::<f64, _>(StandardNormal)).collect());
        labels.push("neg".to_string());
    }
    for _ in 0..n_pos {
        let mut row: Vec<f64> =
            (0..spec.dims).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        row[0] += spec.delta;
        rows.push(row);
        labels.push("pos".to_string());
    }
    Dataset::from_rows(rows, &labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::ClassLabel;

    #[test]
    fn class_sizes_follow_ratio() {
        let ds = generate_synthetic(&SyntheticSpec { n: 100, dims: 2, ir: 9.0, delta: 2.0, seed: 1 }).unwrap();
        assert_eq!(ds.count(ClassLabel::Negative), 90);
        assert_eq!(ds.count(ClassLabel::Positive), 10);
        assert_eq!(ds.positive_name(), "pos");
        assert_eq!(ds.dim(), 2);
    }

    #[test]
    fn deterministic_under_seed() {
        let spec = SyntheticSpec { n: 60, dims: 3, ir: 4.0, delta: 1.0, seed: 99 };
        assert_eq!(generate_synthetic(&spec).unwrap(), generate_synthetic(&spec).unwrap());
    }

    #[test]
    fn too_few_positives_rejected() {
        let spec = SyntheticSpec { n: 20, dims: 2, ir: 100.0, delta: 1.0, seed: 0 };
        assert!(generate_synthetic(&spec).is_err());
    }
}
