//! Non-evolutionary resampling primitives used by the reference methods.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dataset::{Dataset, WeightDistribution};
use crate::{Error, Result, Scalar};

/// Selected instance ids, with multiplicity where sampling is with
/// replacement. All ids refer to the source dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleResult {
    pub ids: Vec<usize>,
}

fn require_both_classes<F: Scalar>(ds: &Dataset<F>) -> Result<(Vec<usize>, Vec<usize>)> {
    let (minority, majority) = ds.partition_by_class();
    if minority.is_empty() {
        return Err(Error::DegenerateDataset { class: "positive" });
    }
    if majority.is_empty() {
        return Err(Error::DegenerateDataset { class: "negative" });
    }
    Ok((minority, majority))
}

/// True balancing: every minority id once plus n_min majority ids drawn
/// uniformly without replacement.
pub fn random_undersample<F: Scalar, R: Rng>(ds: &Dataset<F>, rng: &mut R) -> Result<SampleResult> {
    let (minority, mut majority) = require_both_classes(ds)?;
    let keep = minority.len().min(majority.len());
    majority.shuffle(rng);
    majority.truncate(keep);
    let mut ids = minority;
    ids.extend(majority);
    Ok(SampleResult { ids })
}

/// Every majority id once plus minority ids drawn with replacement until the
/// minority multiplicity totals n_maj.
pub fn random_oversample<F: Scalar, R: Rng>(ds: &Dataset<F>, rng: &mut R) -> Result<SampleResult> {
    let (minority, majority) = require_both_classes(ds)?;
    let target = majority.len().max(minority.len());
    let mut ids = majority;
    for _ in 0..target {
        ids.push(minority[rng.gen_range(0..minority.len())]);
    }
    Ok(SampleResult { ids })
}

/// i.i.d. draws with probability proportional to the weights, with
/// replacement.
pub fn weighted_bootstrap<F: Scalar, R: Rng>(
    ds: &Dataset<F>,
    w: &WeightDistribution,
    size: usize,
    rng: &mut R,
) -> Result<SampleResult> {
    if w.len() != ds.n() {
        return Err(Error::LengthMismatch { left: w.len(), right: ds.n() });
    }
    if size == 0 {
        return Err(Error::InvalidConfig("bootstrap size must be >= 1".into()));
    }
    let mut cumulative = Vec::with_capacity(w.len());
    let mut acc = 0.0;
    for &wi in w.as_slice() {
        acc += wi;
        cumulative.push(acc);
    }
    let total = acc;
    if total <= 0.0 {
        return Err(Error::InvalidWeights("all weights are zero".into()));
    }
    let ids = (0..size)
        .map(|_| {
            let u = rng.gen_range(0.0..total);
            // first index with cumulative mass strictly above u; zero-weight
            // ids have zero-width intervals and are never hit
            cumulative.partition_point(|&c| c <= u)
        })
        .collect();
    Ok(SampleResult { ids })
}

/// Per-bag majority sample size for roughly balanced bagging: a draw from the
/// negative binomial with n_min successes and p = 0.5, counting failures.
pub fn roughly_balanced_majority_count<R: Rng>(n_min: usize, rng: &mut R) -> usize {
    debug_assert!(n_min >= 1);
    let mut failures = 0usize;
    let mut successes = 0usize;
    while successes < n_min {
        if rng.gen_bool(0.5) {
            successes += 1;
        } else {
            failures += 1;
        }
    }
    failures
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::make_dataset;
    use crate::random::RandomSource;

    fn imbalanced(n_maj: usize, n_min: usize) -> Dataset<f64> {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n_maj {
            rows.push(vec![i as f64]);
            labels.push("n".to_string());
        }
        for i in 0..n_min {
            rows.push(vec![100.0 + i as f64]);
            labels.push("p".to_string());
        }
        make_dataset(rows, &labels).unwrap()
    }

    #[test]
    fn undersample_is_truly_balanced() {
        let ds = imbalanced(10, 4);
        let mut rng = RandomSource::new(1).stream("t");
        let sample = random_undersample(&ds, &mut rng).unwrap();
        assert_eq!(sample.ids.len(), 8);
        let (minority, _) = ds.partition_by_class();
        for id in &minority {
            assert_eq!(sample.ids.iter().filter(|&&x| x == *id).count(), 1);
        }
    }

    #[test]
    fn undersample_seeds_differ_majority_only() {
        let ds = imbalanced(30, 5);
        let a = random_undersample(&ds, &mut RandomSource::new(1).stream("t")).unwrap();
        let b = random_undersample(&ds, &mut RandomSource::new(2).stream("t")).unwrap();
        let (minority, _) = ds.partition_by_class();
        let min_a: Vec<_> = a.ids.iter().filter(|i| minority.contains(i)).collect();
        let min_b: Vec<_> = b.ids.iter().filter(|i| minority.contains(i)).collect();
        assert_eq!(min_a, min_b);
        assert_ne!(a.ids, b.ids);
        // same seed reproduces
        let c = random_undersample(&ds, &mut RandomSource::new(1).stream("t")).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn oversample_sizes() {
        let ds = imbalanced(10, 4);
        let mut rng = RandomSource::new(3).stream("t");
        let sample = random_oversample(&ds, &mut rng).unwrap();
        assert_eq!(sample.ids.len(), 20);
        let (minority, _) = ds.partition_by_class();
        let min_total = sample.ids.iter().filter(|i| minority.contains(i)).count();
        assert_eq!(min_total, 10);
        // reproducible under a fixed seed
        let again = random_oversample(&ds, &mut RandomSource::new(3).stream("t")).unwrap();
        assert_eq!(sample, again);
    }

    #[test]
    fn bootstrap_point_mass() {
        let ds = imbalanced(3, 1);
        let w = WeightDistribution::new(vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        let mut rng = RandomSource::new(5).stream("t");
        let sample = weighted_bootstrap(&ds, &w, 5, &mut rng).unwrap();
        assert_eq!(sample.ids, vec![3, 3, 3, 3, 3]);
    }

    #[test]
    fn bootstrap_zero_weight_never_drawn() {
        let ds = imbalanced(3, 1);
        let w = WeightDistribution::new(vec![0.5, 0.0, 0.25, 0.25]).unwrap();
        let mut rng = RandomSource::new(6).stream("t");
        let sample = weighted_bootstrap(&ds, &w, 100_000, &mut rng).unwrap();
        assert!(!sample.ids.contains(&1));
    }

    #[test]
    fn bootstrap_uniform_frequencies() {
        let ds = imbalanced(7, 3);
        let w = WeightDistribution::uniform(10);
        let mut rng = RandomSource::new(7).stream("t");
        let sample = weighted_bootstrap(&ds, &w, 100_000, &mut rng).unwrap();
        // chi-square against uniform: 9 dof, reject threshold ~27 (p ~ 0.001)
        let mut counts = [0f64; 10];
        for &id in &sample.ids {
            counts[id] += 1.0;
        }
        let expected = 10_000.0;
        let chi2: f64 = counts.iter().map(|c| (c - expected).powi(2) / expected).sum();
        assert!(chi2 < 27.0, "chi2 = {chi2}");
    }

    #[test]
    fn rbb_count_mean_near_n_min() {
        let mut rng = RandomSource::new(8).stream("t");
        let n_min = 20;
        let draws = 100_000;
        let total: usize = (0..draws).map(|_| roughly_balanced_majority_count(n_min, &mut rng)).sum();
        let mean = total as f64 / draws as f64;
        assert!((mean - n_min as f64).abs() < 0.02 * n_min as f64, "mean = {mean}");
    }

    #[test]
    fn rbb_fixed_seed_fixed_draw() {
        let a = roughly_balanced_majority_count(5, &mut RandomSource::new(9).stream("t"));
        let b = roughly_balanced_majority_count(5, &mut RandomSource::new(9).stream("t"));
        assert_eq!(a, b);
    }
}
