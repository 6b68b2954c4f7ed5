//! Stratified cross-validation, per-method measurement and paired Wilcoxon
//! signed-rank comparisons shaped like the published result tables.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::dataset::Dataset;
use crate::ensembles::{self, Model};
use crate::eus::EusConfig;
use crate::learners::WeakLearnerSpec;
use crate::metrics;
use crate::random::RandomSource;
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MethodTag {
    Bgg,
    Bst,
    Unb,
    Rbb,
    Ovb,
    Rub,
    Eub,
}

impl MethodTag {
    pub fn all() -> [MethodTag; 7] {
        use MethodTag::*;
        [Bgg, Bst, Unb, Rbb, Ovb, Rub, Eub]
    }
}

impl fmt::Display for MethodTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MethodTag::Bgg => "BGG",
            MethodTag::Bst => "BST",
            MethodTag::Unb => "UNB",
            MethodTag::Rbb => "RBB",
            MethodTag::Ovb => "OVB",
            MethodTag::Rub => "RUB",
            MethodTag::Eub => "EUB",
        };
        f.write_str(s)
    }
}

impl FromStr for MethodTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bgg" => Ok(MethodTag::Bgg),
            "bst" => Ok(MethodTag::Bst),
            "unb" => Ok(MethodTag::Unb),
            "rbb" => Ok(MethodTag::Rbb),
            "ovb" => Ok(MethodTag::Ovb),
            "rub" => Ok(MethodTag::Rub),
            "eub" => Ok(MethodTag::Eub),
            other => Err(Error::InvalidConfig(format!("unknown method '{other}'"))),
        }
    }
}

/// Fully specified training recipe for one method.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodConfig {
    pub tag: MethodTag,
    pub learner: WeakLearnerSpec,
    /// Boosting iterations or bagging member count.
    pub rounds: usize,
    pub eus: EusConfig,
}

impl MethodConfig {
    pub fn new(tag: MethodTag) -> Self {
        Self { tag, learner: WeakLearnerSpec::default(), rounds: 10, eus: EusConfig::default() }
    }
}

/// Trains the configured method on the dataset.
pub fn train_method<F: Scalar>(
    cfg: &MethodConfig,
    ds: &Dataset<F>,
    src: &RandomSource,
) -> Result<Model<F>> {
    let model = match cfg.tag {
        MethodTag::Bgg => Model::Bagged(ensembles::train_bagging(ds, cfg.rounds, &cfg.learner, src)?),
        MethodTag::Unb => Model::Bagged(ensembles::train_underbagging(ds, cfg.rounds, &cfg.learner, src)?),
        MethodTag::Ovb => Model::Bagged(ensembles::train_overbagging(ds, cfg.rounds, &cfg.learner, src)?),
        MethodTag::Rbb => Model::Bagged(ensembles::train_rbbagging(ds, cfg.rounds, &cfg.learner, src)?),
        MethodTag::Bst => Model::Boosted(ensembles::train_adaboost(ds, cfg.rounds, &cfg.learner, src)?),
        MethodTag::Rub => Model::Boosted(ensembles::train_rusboost(ds, cfg.rounds, &cfg.learner, src)?),
        MethodTag::Eub => Model::Boosted(ensembles::train_eusboost(ds, cfg.rounds, &cfg.learner, &cfg.eus, src)?),
    };
    Ok(model)
}

/// Per-repeat assignment of every instance to exactly one test fold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    pub repeats: usize,
    /// assignments[repeat][instance id] = fold index.
    pub assignments: Vec<Vec<usize>>,
}

/// Shuffles within each class and deals round-robin into k folds, so per-fold
/// class counts stay within one instance of the global ratio.
pub fn stratified_kfold<F: Scalar>(
    ds: &Dataset<F>,
    k: usize,
    repeats: usize,
    src: &RandomSource,
) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::InvalidConfig("k must be >= 2".into()));
    }
    if repeats < 1 {
        return Err(Error::InvalidConfig("repeats must be >= 1".into()));
    }
    let (minority, majority) = ds.partition_by_class();
    for (class, ids) in [("positive", &minority), ("negative", &majority)] {
        if ids.len() < k {
            return Err(Error::InvalidConfig(format!(
                "{class} class has {} instances, fewer than k = {k}",
                ids.len()
            )));
        }
    }
    let mut assignments = Vec::with_capacity(repeats);
    for r in 0..repeats {
        let mut rng = src.substream("fold-plan", r as u64);
        let mut fold_of = vec![0usize; ds.n()];
        for ids in [&minority, &majority] {
            let mut shuffled = ids.to_vec();
            use rand::seq::SliceRandom;
            shuffled.shuffle(&mut rng);
            for (j, id) in shuffled.into_iter().enumerate() {
                fold_of[id] = j % k;
            }
        }
        assignments.push(fold_of);
    }
    Ok(FoldPlan { k, repeats, assignments })
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FoldScore {
    pub sen: Option<f64>,
    pub gm: Option<f64>,
    pub auc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodResult {
    pub tag: MethodTag,
    /// One score triple per (repeat, fold), in repeat-major order.
    pub folds: Vec<FoldScore>,
    /// Count of metric values that were undefined (or folds whose training
    /// failed) and were excluded from the means.
    pub warnings: usize,
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let defined: Vec<f64> = values.flatten().collect();
    if defined.is_empty() {
        None
    } else {
        Some(defined.iter().sum::<f64>() / defined.len() as f64)
    }
}

impl MethodResult {
    pub fn mean_sen(&self) -> Option<f64> {
        mean(self.folds.iter().map(|f| f.sen))
    }

    pub fn mean_gm(&self) -> Option<f64> {
        mean(self.folds.iter().map(|f| f.gm))
    }

    pub fn mean_auc(&self) -> Option<f64> {
        mean(self.folds.iter().map(|f| f.auc))
    }
}

/// Trains on k-1 folds and scores the held-out fold, for every (repeat,
/// fold) in the plan. Undefined metrics (and folds whose training fails on
/// degenerate data) are recorded as missing and excluded from means.
pub fn cross_validate<F: Scalar>(
    method: &MethodConfig,
    ds: &Dataset<F>,
    plan: &FoldPlan,
    src: &RandomSource,
) -> Result<MethodResult> {
    if plan.assignments.iter().any(|a| a.len() != ds.n()) {
        return Err(Error::LengthMismatch { left: plan.assignments[0].len(), right: ds.n() });
    }
    let mut folds = Vec::with_capacity(plan.k * plan.repeats);
    let mut warnings = 0usize;
    for (r, fold_of) in plan.assignments.iter().enumerate() {
        for fold in 0..plan.k {
            let train_ids: Vec<usize> = (0..ds.n()).filter(|&i| fold_of[i] != fold).collect();
            let test_ids: Vec<usize> = (0..ds.n()).filter(|&i| fold_of[i] == fold).collect();
            let train_ds = ds.take(&train_ids);
            let fold_src = src.derive(&format!("{}-rep{r}-fold{fold}", method.tag));
            let score = match train_method(method, &train_ds, &fold_src) {
                Ok(model) => {
                    let mut predicted = Vec::with_capacity(test_ids.len());
                    let mut actual = Vec::with_capacity(test_ids.len());
                    for &id in &test_ids {
                        predicted.push(model.predict(&ds.instance(id).features)?.0);
                        actual.push(ds.label(id));
                    }
                    let cm = metrics::confusion_matrix(&predicted, &actual)?;
                    let sen = metrics::sensitivity(&cm).ok();
                    let gm = metrics::geometric_mean(&cm).ok();
                    let auc = metrics::auc_single_point(&cm).ok();
                    warnings += [sen, gm, auc].iter().filter(|m| m.is_none()).count();
                    FoldScore { sen, gm, auc }
                }
                Err(_) => {
                    warnings += 3;
                    FoldScore::default()
                }
            };
            folds.push(score);
        }
    }
    if folds.iter().all(|f| f.sen.is_none() && f.gm.is_none() && f.auc.is_none()) {
        return Err(Error::EveryFoldDegenerate);
    }
    Ok(MethodResult { tag: method.tag, folds, warnings })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alternative {
    TwoSided,
    Greater,
    Less,
}

/// Wilcoxon signed-rank test on paired samples. Zero differences are
/// dropped, tied absolute differences receive average ranks, the null
/// distribution is enumerated exactly for n <= 20 and approximated by a
/// continuity-corrected normal beyond.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<f64> {
    wilcoxon_signed_rank_alt(a, b, Alternative::TwoSided)
}

pub fn wilcoxon_signed_rank_alt(a: &[f64], b: &[f64], alternative: Alternative) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    if a.is_empty() {
        return Err(Error::DegenerateComparison);
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    if diffs.is_empty() {
        return Err(Error::DegenerateComparison);
    }
    let n = diffs.len();

    // average ranks of |d|, doubled so ties stay integral
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diffs[i].abs().partial_cmp(&diffs[j].abs()).unwrap());
    let mut rank2 = vec![0u64; n];
    let mut tie_sizes = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && diffs[order[j + 1]].abs() == diffs[order[i]].abs() {
            j += 1;
        }
        let doubled = (i + 1 + j + 1) as u64; // 2 * average of 1-based ranks i+1..=j+1
        for &idx in &order[i..=j] {
            rank2[idx] = doubled;
        }
        tie_sizes.push((j - i + 1) as f64);
        i = j + 1;
    }
    let w2_plus: u64 = (0..n).filter(|&i| diffs[i] > 0.0).map(|i| rank2[i]).sum();

    let (p_greater, p_less) = if n <= 20 {
        let patterns = 1u64 << n;
        let mut ge = 0u64;
        let mut le = 0u64;
        for bits in 0..patterns {
            let w: u64 = (0..n).filter(|&i| bits & (1 << i) != 0).map(|i| rank2[i]).sum();
            if w >= w2_plus {
                ge += 1;
            }
            if w <= w2_plus {
                le += 1;
            }
        }
        (ge as f64 / patterns as f64, le as f64 / patterns as f64)
    } else {
        let nf = n as f64;
        let mu = nf * (nf + 1.0) / 4.0;
        let tie_term: f64 = tie_sizes.iter().map(|t| (t * t * t - t) / 48.0).sum();
        let sigma = (nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term).sqrt();
        let w = w2_plus as f64 / 2.0;
        let normal = Normal::new(0.0, 1.0).unwrap();
        let p_greater = 1.0 - normal.cdf((w - 0.5 - mu) / sigma);
        let p_less = normal.cdf((w + 0.5 - mu) / sigma);
        (p_greater, p_less)
    };

    Ok(match alternative {
        Alternative::Greater => p_greater,
        Alternative::Less => p_less,
        Alternative::TwoSided => (2.0 * p_greater.min(p_less)).min(1.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairwiseCell {
    /// True iff the EUB mean is at least the reference method's mean.
    pub eub_at_least: bool,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseRow {
    pub vs: MethodTag,
    pub sen: Option<PairwiseCell>,
    pub gm: Option<PairwiseCell>,
    pub auc: Option<PairwiseCell>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub k: usize,
    pub repeats: usize,
    pub learner: WeakLearnerSpec,
    pub overall: Vec<MethodResult>,
    pub pairwise: Vec<PairwiseRow>,
}

fn paired(a: &MethodResult, b: &MethodResult, pick: impl Fn(&FoldScore) -> Option<f64>) -> (Vec<f64>, Vec<f64>) {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (fa, fb) in a.folds.iter().zip(&b.folds) {
        if let (Some(x), Some(y)) = (pick(fa), pick(fb)) {
            xs.push(x);
            ys.push(y);
        }
    }
    (xs, ys)
}

fn pairwise_cell(
    eub: &MethodResult,
    other: &MethodResult,
    pick: impl Fn(&FoldScore) -> Option<f64> + Copy,
    mean_of: impl Fn(&MethodResult) -> Option<f64>,
) -> Option<PairwiseCell> {
    let (xs, ys) = paired(eub, other, pick);
    let p_value = wilcoxon_signed_rank(&xs, &ys).ok()?;
    let eub_at_least = match (mean_of(eub), mean_of(other)) {
        (Some(a), Some(b)) => a >= b,
        _ => return None,
    };
    Some(PairwiseCell { eub_at_least, p_value })
}

/// Runs every method on the same fold plan (paired statistics) and builds
/// the overall table plus the pairwise EUB-vs-X rows.
pub fn compare<F: Scalar>(
    methods: &[MethodConfig],
    ds: &Dataset<F>,
    plan: &FoldPlan,
    src: &RandomSource,
) -> Result<ComparisonReport> {
    if methods.len() < 2 {
        return Err(Error::InvalidConfig("compare needs at least two methods".into()));
    }
    let overall: Vec<MethodResult> =
        methods.iter().map(|m| cross_validate(m, ds, plan, src)).collect::<Result<_>>()?;
    let eub = overall.iter().find(|r| r.tag == MethodTag::Eub);
    let pairwise = match eub {
        Some(eub) => overall
            .iter()
            .filter(|r| r.tag != MethodTag::Eub)
            .map(|other| PairwiseRow {
                vs: other.tag,
                sen: pairwise_cell(eub, other, |f| f.sen, MethodResult::mean_sen),
                gm: pairwise_cell(eub, other, |f| f.gm, MethodResult::mean_gm),
                auc: pairwise_cell(eub, other, |f| f.auc, MethodResult::mean_auc),
            })
            .collect(),
        None => Vec::new(),
    };
    Ok(ComparisonReport {
        k: plan.k,
        repeats: plan.repeats,
        learner: methods[0].learner,
        overall,
        pairwise,
    })
}
