//! The seven ensemble methods: bagging (BGG), AdaBoost (BST), underbagging
//! (UNB), overbagging (OVB), roughly balanced bagging (RBB), RUSBoost (RUB)
//! and EUSBoost (EUB).
//!
//! The boosting loop is the binary specialization of AdaBoost.M2: with a
//! single incorrect label per instance, W_i collapses to the mislabel weight
//! w_i and q_i to 1, so the instance distribution is just the normalized
//! mislabel weight vector.

use rand::Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::dataset::{ClassLabel, Dataset, WeightDistribution};
use crate::eus::{self, Chromosome, EusConfig, EusContext};
use crate::learners::{train_weak, TrainedLearner, WeakLearnerSpec};
use crate::random::RandomSource;
use crate::sampling;
use crate::{Error, Result, Scalar};

const EPS_FLOOR: f64 = 1e-10;
const MAX_RETRIES: usize = 10;

/// Per-instance weight on the single incorrect label (binary AdaBoost.M2).
#[derive(Debug, Clone, PartialEq)]
pub struct MislabelWeights {
    w: Vec<f64>,
}

impl MislabelWeights {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.iter().any(|x| *x < 0.0 || !x.is_finite()) {
            return Err(Error::InvalidWeights("mislabel weights must be finite and non-negative".into()));
        }
        if w.iter().sum::<f64>() <= 0.0 {
            return Err(Error::InvalidWeights("all mislabel weights are zero".into()));
        }
        Ok(Self { w })
    }

    pub fn uniform(n: usize) -> Self {
        Self { w: vec![1.0 / n as f64; n] }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }
}

/// Binary specialization of AdaBoost.M2 steps 4-6: W_i = w_i, q_i = 1 and
/// D_i = W_i / sum(W).
pub fn m2_distribution(w: &MislabelWeights) -> Result<(Vec<f64>, Vec<f64>, WeightDistribution)> {
    let big_w = w.w.clone();
    let q = vec![1.0; w.w.len()];
    let d = WeightDistribution::normalized(&big_w)?;
    Ok((big_w, q, d))
}

/// Renormalizes a distribution onto a subset: D'(k) = D(k) / mass(subset) for
/// k in the subset, 0 elsewhere.
pub fn restrict_weights(d: &WeightDistribution, subset: &[usize]) -> Result<WeightDistribution> {
    if subset.is_empty() {
        return Err(Error::DegenerateSubset);
    }
    let mut member = vec![false; d.len()];
    for &id in subset {
        member[id] = true;
    }
    let mass: f64 = (0..d.len()).filter(|&i| member[i]).map(|i| d.get(i)).sum();
    if mass <= 0.0 {
        return Err(Error::DegenerateSubset);
    }
    let weights = (0..d.len()).map(|i| if member[i] { d.get(i) / mass } else { 0.0 }).collect();
    WeightDistribution::new(weights)
}

/// Pseudo-loss: eps = 1/2 sum_i D(i) (1 - h(x_i, y_i) + h(x_i, wrong_i)).
/// `h` pairs are (confidence on the correct label, confidence on the wrong
/// label).
pub fn pseudo_loss(d: &WeightDistribution, h: &[(f64, f64)]) -> f64 {
    0.5 * d
        .as_slice()
        .iter()
        .zip(h)
        .map(|(di, (correct, wrong))| di * (1.0 - correct + wrong))
        .sum::<f64>()
}

/// Round confidence beta = eps / (1 - eps), with eps clamped away from zero
/// so log(1/beta) stays finite.
pub fn beta(eps: f64) -> f64 {
    let eps = eps.max(EPS_FLOOR);
    eps / (1.0 - eps)
}

/// Step 12 with the canonical M2 exponent: w'_i = w_i * beta^((1 + h_correct
/// - h_wrong) / 2). The exponent lies in [0, 1], so confidently correct
/// instances shrink the most and fully misclassified ones keep their weight.
pub fn update_mislabel_weights(w: &MislabelWeights, beta: f64, h: &[(f64, f64)]) -> MislabelWeights {
    let w = w
        .w
        .iter()
        .zip(h)
        .map(|(wi, (correct, wrong))| wi * beta.powf(0.5 * (1.0 + correct - wrong)))
        .collect();
    MislabelWeights { w }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundTelemetry {
    pub pseudo_loss: f64,
    pub subset_size: usize,
    pub retries: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "F: Serialize", deserialize = "F: DeserializeOwned"))]
pub struct BoostedEnsemble<F> {
    /// Ordered (weak learner, beta_t) pairs; every beta_t in (0, 1).
    pub rounds: Vec<(TrainedLearner<F>, f64)>,
    pub telemetry: Vec<RoundTelemetry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "F: Serialize", deserialize = "F: DeserializeOwned"))]
pub struct BaggedEnsemble<F> {
    pub members: Vec<TrainedLearner<F>>,
    /// Source ids of each member's training sample.
    pub provenance: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "F: Serialize", deserialize = "F: DeserializeOwned"))]
pub enum Model<F> {
    Boosted(BoostedEnsemble<F>),
    Bagged(BaggedEnsemble<F>),
}

impl<F: Scalar> Model<F> {
    pub fn dim(&self) -> usize {
        match self {
            Model::Boosted(b) => b.rounds[0].0.dim(),
            Model::Bagged(b) => b.members[0].dim(),
        }
    }

    /// Final decision rule. Boosted: weighted log-vote, label = argmax_y
    /// sum_t log(1/beta_t) h_t(x, y), score = positive vote share. Bagged:
    /// majority vote, score = fraction of members voting positive. Ties go
    /// to the positive class.
    pub fn predict(&self, x: &[F]) -> Result<(ClassLabel, f64)> {
        match self {
            Model::Boosted(ens) => {
                let mut sum_pos = 0.0;
                let mut sum_neg = 0.0;
                let mut total = 0.0;
                for (learner, b) in &ens.rounds {
                    let (h_pos, h_neg) = learner.predict_confidence(x)?;
                    let vote = (1.0 / b).ln();
                    sum_pos += vote * h_pos;
                    sum_neg += vote * h_neg;
                    total += vote;
                }
                let label = if sum_pos >= sum_neg { ClassLabel::Positive } else { ClassLabel::Negative };
                Ok((label, sum_pos / total))
            }
            Model::Bagged(ens) => {
                let mut votes = 0usize;
                for member in &ens.members {
                    if member.predict_label(x)? == ClassLabel::Positive {
                        votes += 1;
                    }
                }
                let label = if 2 * votes >= ens.members.len() {
                    ClassLabel::Positive
                } else {
                    ClassLabel::Negative
                };
                Ok((label, votes as f64 / ens.members.len() as f64))
            }
        }
    }
}

/// Per-round weight vectors recorded during boosting, for invariant checks.
#[derive(Debug, Clone)]
pub struct RoundTrace {
    pub distribution: Vec<f64>,
    pub restricted: Vec<f64>,
    pub subset_ids: Vec<usize>,
    pub pseudo_loss: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Default)]
pub struct BoostTrace {
    pub rounds: Vec<RoundTrace>,
}

fn confidence_pairs<F: Scalar>(
    ds: &Dataset<F>,
    learner: &TrainedLearner<F>,
) -> Result<Vec<(f64, f64)>> {
    ds.instances()
        .iter()
        .map(|inst| {
            let (h_pos, h_neg) = learner.predict_confidence(&inst.features)?;
            Ok(match inst.label {
                ClassLabel::Positive => (h_pos, h_neg),
                ClassLabel::Negative => (h_neg, h_pos),
            })
        })
        .collect()
}

/// AdaBoost.M2 loop shared by EUSBoost and RUSBoost; `choose` supplies the
/// per-round training subset (and, for EUS, the chromosome to record for the
/// diversity term).
fn train_m2_boost<F, C>(
    ds: &Dataset<F>,
    t: usize,
    spec: &WeakLearnerSpec,
    mut choose: C,
) -> Result<(BoostedEnsemble<F>, BoostTrace)>
where
    F: Scalar,
    C: FnMut(&Dataset<F>, usize, usize, &[Chromosome]) -> Result<(Vec<usize>, Option<Chromosome>)>,
{
    if t == 0 {
        return Err(Error::InvalidConfig("T must be >= 1".into()));
    }
    ds.imbalance_ratio()?; // both classes present
    let n = ds.n();
    let mut w = MislabelWeights::uniform(n);
    let mut priors: Vec<Chromosome> = Vec::new();
    let mut rounds = Vec::new();
    let mut telemetry = Vec::new();
    let mut trace = BoostTrace::default();

    'rounds: for round in 0..t {
        let (_big_w, _q, d) = m2_distribution(&w)?;
        for retry in 0..=MAX_RETRIES {
            let (subset_ids, mask) = choose(ds, round, retry, &priors)?;
            let restricted = match restrict_weights(&d, &subset_ids) {
                Ok(r) => r,
                Err(_) => continue,
            };
            let learner = train_weak(ds, &restricted, spec)?;
            let h = confidence_pairs(ds, &learner)?;
            let eps = pseudo_loss(&d, &h);
            if eps >= 0.5 {
                continue;
            }
            let b = beta(eps);
            w = update_mislabel_weights(&w, b, &h);
            trace.rounds.push(RoundTrace {
                distribution: d.as_slice().to_vec(),
                restricted: restricted.as_slice().to_vec(),
                subset_ids: subset_ids.clone(),
                pseudo_loss: eps,
                beta: b,
            });
            telemetry.push(RoundTelemetry { pseudo_loss: eps, subset_size: subset_ids.len(), retries: retry });
            rounds.push((learner, b));
            if let Some(m) = mask {
                priors.push(m);
            }
            continue 'rounds;
        }
        break; // every retry failed: early stop with the rounds built so far
    }
    if rounds.is_empty() {
        return Err(Error::NoUsableRounds);
    }
    Ok((BoostedEnsemble { rounds, telemetry }, trace))
}

pub fn train_eusboost_traced<F: Scalar>(
    ds: &Dataset<F>,
    t: usize,
    spec: &WeakLearnerSpec,
    cfg: &EusConfig,
    src: &RandomSource,
) -> Result<(BoostedEnsemble<F>, BoostTrace)> {
    train_m2_boost(ds, t, spec, |ds, round, retry, priors| {
        let mut rng = src.substream(&format!("eus-round-{round}"), retry as u64);
        let ctx = EusContext::with_priors(ds, priors);
        let chrom = eus::evolve(&ctx, cfg, &mut rng)?;
        let (_, ids) = eus::materialize_subset(ds, &chrom)?;
        Ok((ids, Some(chrom)))
    })
}

/// EUSBoost: evolutionary undersampling embedded in AdaBoost.M2, with the
/// diversity term fed by the masks of earlier rounds.
pub fn train_eusboost<F: Scalar>(
    ds: &Dataset<F>,
    t: usize,
    spec: &WeakLearnerSpec,
    cfg: &EusConfig,
    src: &RandomSource,
) -> Result<BoostedEnsemble<F>> {
    train_eusboost_traced(ds, t, spec, cfg, src).map(|(ens, _)| ens)
}

pub fn train_rusboost_traced<F: Scalar>(
    ds: &Dataset<F>,
    t: usize,
    spec: &WeakLearnerSpec,
    src: &RandomSource,
) -> Result<(BoostedEnsemble<F>, BoostTrace)> {
    train_m2_boost(ds, t, spec, |ds, round, retry, _| {
        let mut rng = src.substream(&format!("rus-round-{round}"), retry as u64);
        let sample = sampling::random_undersample(ds, &mut rng)?;
        Ok((sample.ids, None))
    })
}

/// RUSBoost: the same boosting loop with random undersampling per round.
pub fn train_rusboost<F: Scalar>(
    ds: &Dataset<F>,
    t: usize,
    spec: &WeakLearnerSpec,
    src: &RandomSource,
) -> Result<BoostedEnsemble<F>> {
    train_rusboost_traced(ds, t, spec, src).map(|(ens, _)| ens)
}

pub fn train_adaboost_traced<F: Scalar>(
    ds: &Dataset<F>,
    t: usize,
    spec: &WeakLearnerSpec,
    src: &RandomSource,
) -> Result<(BoostedEnsemble<F>, BoostTrace)> {
    if t == 0 {
        return Err(Error::InvalidConfig("T must be >= 1".into()));
    }
    let n = ds.n();
    let mut w = WeightDistribution::uniform(n);
    let mut rounds = Vec::new();
    let mut telemetry = Vec::new();
    let mut trace = BoostTrace::default();

    'rounds: for round in 0..t {
        for retry in 0..=MAX_RETRIES {
            let mut rng = src.substream(&format!("ada-round-{round}"), retry as u64);
            let sample = sampling::weighted_bootstrap(ds, &w, n, &mut rng)?;
            let bag = ds.take(&sample.ids);
            let learner = train_weak(&bag, &WeightDistribution::uniform(n), spec)?;
            // weighted 0/1 error on the original set
            let flags: Vec<bool> = ds
                .instances()
                .iter()
                .map(|inst| Ok(learner.predict_label(&inst.features)? != inst.label))
                .collect::<Result<_>>()?;
            let eps: f64 = w
                .as_slice()
                .iter()
                .zip(&flags)
                .map(|(wi, &wrong)| if wrong { *wi } else { 0.0 })
                .sum();
            if eps >= 0.5 {
                continue;
            }
            let b = beta(eps);
            // misclassified weights grow by 1/beta, then renormalize
            let mass: Vec<f64> = w
                .as_slice()
                .iter()
                .zip(&flags)
                .map(|(wi, &wrong)| if wrong { wi / b } else { *wi })
                .collect();
            let mut restricted = vec![0.0; n];
            for &id in &sample.ids {
                restricted[id] += 1.0 / n as f64;
            }
            trace.rounds.push(RoundTrace {
                distribution: w.as_slice().to_vec(),
                restricted,
                subset_ids: sample.ids.clone(),
                pseudo_loss: eps,
                beta: b,
            });
            w = WeightDistribution::normalized(&mass)?;
            telemetry.push(RoundTelemetry { pseudo_loss: eps, subset_size: sample.ids.len(), retries: retry });
            rounds.push((learner, b));
            continue 'rounds;
        }
        break;
    }
    if rounds.is_empty() {
        return Err(Error::NoUsableRounds);
    }
    Ok((BoostedEnsemble { rounds, telemetry }, trace))
}

/// AdaBoost with weighted resampling: bootstrap of size N per round, 0/1
/// error on the original set, misclassified weights scaled by 1/beta.
pub fn train_adaboost<F: Scalar>(
    ds: &Dataset<F>,
    t: usize,
    spec: &WeakLearnerSpec,
    src: &RandomSource,
) -> Result<BoostedEnsemble<F>> {
    train_adaboost_traced(ds, t, spec, src).map(|(ens, _)| ens)
}

fn train_bagged<F, S>(
    ds: &Dataset<F>,
    members: usize,
    spec: &WeakLearnerSpec,
    src: &RandomSource,
    label: &str,
    mut sampler: S,
) -> Result<BaggedEnsemble<F>>
where
    F: Scalar,
    S: FnMut(&Dataset<F>, &mut rand_chacha::ChaCha8Rng) -> Result<Vec<usize>>,
{
    if members == 0 {
        return Err(Error::InvalidConfig("members must be >= 1".into()));
    }
    let mut ensemble = BaggedEnsemble { members: Vec::new(), provenance: Vec::new() };
    for m in 0..members {
        let mut rng = src.substream(label, m as u64);
        let ids = sampler(ds, &mut rng)?;
        let bag = ds.take(&ids);
        let learner = train_weak(&bag, &WeightDistribution::uniform(bag.n()), spec)?;
        ensemble.members.push(learner);
        ensemble.provenance.push(ids);
    }
    Ok(ensemble)
}

/// Plain bagging: uniform bootstrap of size N per member.
pub fn train_bagging<F: Scalar>(
    ds: &Dataset<F>,
    members: usize,
    spec: &WeakLearnerSpec,
    src: &RandomSource,
) -> Result<BaggedEnsemble<F>> {
    train_bagged(ds, members, spec, src, "bgg-member", |ds, rng| {
        Ok((0..ds.n()).map(|_| rng.gen_range(0..ds.n())).collect())
    })
}

/// Underbagging: each member trains on a true-balanced undersample.
pub fn train_underbagging<F: Scalar>(
    ds: &Dataset<F>,
    members: usize,
    spec: &WeakLearnerSpec,
    src: &RandomSource,
) -> Result<BaggedEnsemble<F>> {
    train_bagged(ds, members, spec, src, "unb-member", |ds, rng| {
        Ok(sampling::random_undersample(ds, rng)?.ids)
    })
}

/// Overbagging: each member trains on a random oversample.
pub fn train_overbagging<F: Scalar>(
    ds: &Dataset<F>,
    members: usize,
    spec: &WeakLearnerSpec,
    src: &RandomSource,
) -> Result<BaggedEnsemble<F>> {
    train_bagged(ds, members, spec, src, "ovb-member", |ds, rng| {
        Ok(sampling::random_oversample(ds, rng)?.ids)
    })
}

/// Roughly balanced bagging: all minority plus a negative-binomially sized
/// majority sample drawn with replacement.
pub fn train_rbbagging<F: Scalar>(
    ds: &Dataset<F>,
    members: usize,
    spec: &WeakLearnerSpec,
    src: &RandomSource,
) -> Result<BaggedEnsemble<F>> {
    train_bagged(ds, members, spec, src, "rbb-member", |ds, rng| {
        let (minority, majority) = ds.partition_by_class();
        if minority.is_empty() {
            return Err(Error::DegenerateDataset { class: "positive" });
        }
        if majority.is_empty() {
            return Err(Error::DegenerateDataset { class: "negative" });
        }
        let count = sampling::roughly_balanced_majority_count(minority.len(), rng);
        let mut ids = minority;
        for _ in 0..count {
            ids.push(majority[rng.gen_range(0..majority.len())]);
        }
        Ok(ids)
    })
}
