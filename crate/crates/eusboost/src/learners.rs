//! Weight-aware weak learners: decision stumps and shallow trees.
//!
//! Learners satisfy the AdaBoost.M2 hypothesis contract: for any input they
//! emit a confidence pair (h_pos, h_neg) in [0, 1] summing to 1. Splits are
//! chosen greedily by weighted misclassification; instances with weight zero
//! contribute nothing to split scores or leaf frequencies.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::dataset::{ClassLabel, Dataset, WeightDistribution};
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LearnerKind {
    Stump,
    Tree,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakLearnerSpec {
    pub kind: LearnerKind,
    pub max_depth: usize,
    /// Laplace smoothing constant applied to leaf frequencies, scaled by the
    /// reciprocal of the number of positive-weight training instances.
    pub smoothing: f64,
}

impl WeakLearnerSpec {
    pub fn stump() -> Self {
        Self { kind: LearnerKind::Stump, max_depth: 1, smoothing: 1.0 }
    }

    pub fn tree(max_depth: usize) -> Self {
        Self { kind: LearnerKind::Tree, max_depth, smoothing: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_depth < 1 || self.max_depth > 10 {
            return Err(Error::InvalidConfig(format!("max_depth {} outside [1, 10]", self.max_depth)));
        }
        if self.smoothing < 0.0 || !self.smoothing.is_finite() {
            return Err(Error::InvalidConfig("smoothing must be finite and non-negative".into()));
        }
        Ok(())
    }

    fn effective_depth(&self) -> usize {
        match self.kind {
            LearnerKind::Stump => 1,
            LearnerKind::Tree => self.max_depth,
        }
    }
}

impl Default for WeakLearnerSpec {
    fn default() -> Self {
        Self::tree(3)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "F: Serialize", deserialize = "F: DeserializeOwned"))]
pub enum Node<F> {
    Leaf {
        p_pos: f64,
        p_neg: f64,
    },
    Split {
        feature: usize,
        threshold: F,
        /// Branch taken when x[feature] <= threshold.
        low: Box<Node<F>>,
        high: Box<Node<F>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "F: Serialize", deserialize = "F: DeserializeOwned"))]
pub struct TrainedLearner<F> {
    pub root: Node<F>,
    pub spec: WeakLearnerSpec,
    dim: usize,
}

impl<F: Scalar> TrainedLearner<F> {
    /// Confidence pair (h_pos, h_neg); both in [0, 1], summing to 1.
    pub fn predict_confidence(&self, x: &[F]) -> Result<(f64, f64)> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { row: 0, expected: self.dim, got: x.len() });
        }
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { p_pos, p_neg } => return Ok((*p_pos, *p_neg)),
                Node::Split { feature, threshold, low, high } => {
                    node = if x[*feature] <= *threshold { low } else { high };
                }
            }
        }
    }

    /// Hard label: argmax confidence, ties toward the positive class.
    pub fn predict_label(&self, x: &[F]) -> Result<ClassLabel> {
        let (p, n) = self.predict_confidence(x)?;
        Ok(if p >= n { ClassLabel::Positive } else { ClassLabel::Negative })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Split structure with leaf probabilities erased, for structural
    /// comparisons.
    pub fn structure(&self) -> Vec<(usize, F)> {
        fn walk<F: Copy>(node: &Node<F>, out: &mut Vec<(usize, F)>) {
            if let Node::Split { feature, threshold, low, high } = node {
                out.push((*feature, *threshold));
                walk(low, out);
                walk(high, out);
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }
}

struct SplitCandidate<F> {
    feature: usize,
    threshold: F,
    error: f64,
}

struct Trainer<'a, F> {
    ds: &'a Dataset<F>,
    w: &'a [f64],
    /// Smoothing term already divided by the positive-weight instance count.
    eps: f64,
    max_depth: usize,
}

impl<F: Scalar> Trainer<'_, F> {
    fn masses(&self, ids: &[usize]) -> (f64, f64) {
        let mut pos = 0.0;
        let mut neg = 0.0;
        for &i in ids {
            match self.ds.label(i) {
                ClassLabel::Positive => pos += self.w[i],
                ClassLabel::Negative => neg += self.w[i],
            }
        }
        (pos, neg)
    }

    fn leaf(&self, pos: f64, neg: f64) -> Node<F> {
        let denom = pos + neg + 2.0 * self.eps;
        Node::Leaf { p_pos: (pos + self.eps) / denom, p_neg: (neg + self.eps) / denom }
    }

    fn best_split(&self, ids: &[usize]) -> Option<SplitCandidate<F>> {
        let (total_pos, total_neg) = self.masses(ids);
        let mut best: Option<SplitCandidate<F>> = None;
        let mut sorted = ids.to_vec();
        for feature in 0..self.ds.dim() {
            sorted.sort_by(|&a, &b| {
                self.ds.instance(a).features[feature]
                    .partial_cmp(&self.ds.instance(b).features[feature])
                    .unwrap()
                    .then(a.cmp(&b))
            });
            let mut low_pos = 0.0;
            let mut low_neg = 0.0;
            for pair in sorted.windows(2) {
                let (i, j) = (pair[0], pair[1]);
                match self.ds.label(i) {
                    ClassLabel::Positive => low_pos += self.w[i],
                    ClassLabel::Negative => low_neg += self.w[i],
                }
                let vi = self.ds.instance(i).features[feature];
                let vj = self.ds.instance(j).features[feature];
                if vi == vj {
                    continue;
                }
                let threshold = (vi + vj) / F::from(2.0).unwrap();
                let error = low_pos.min(low_neg) + (total_pos - low_pos).min(total_neg - low_neg);
                // Strict improvement keeps the first-seen candidate, which by
                // iteration order is the lower feature index, then the lower
                // threshold.
                if best.as_ref().map_or(true, |b| error < b.error) {
                    best = Some(SplitCandidate { feature, threshold, error });
                }
            }
        }
        best
    }

    fn build(&self, ids: &[usize], depth: usize) -> Node<F> {
        let (pos, neg) = self.masses(ids);
        if depth == 0 || pos == 0.0 || neg == 0.0 {
            return self.leaf(pos, neg);
        }
        let node_error = pos.min(neg);
        let split = match self.best_split(ids) {
            Some(s) if s.error < node_error => s,
            _ => return self.leaf(pos, neg),
        };
        let (low, high): (Vec<usize>, Vec<usize>) = ids
            .iter()
            .partition(|&&i| self.ds.instance(i).features[split.feature] <= split.threshold);
        Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            low: Box::new(self.build(&low, depth - 1)),
            high: Box::new(self.build(&high, depth - 1)),
        }
    }
}

/// Trains a weak learner on the weighted dataset. Instances with weight zero
/// are thrown away before training. If one class carries zero total weight, a
/// constant learner predicting the weighted majority is returned.
pub fn train_weak<F: Scalar>(
    ds: &Dataset<F>,
    w: &WeightDistribution,
    spec: &WeakLearnerSpec,
) -> Result<TrainedLearner<F>> {
    spec.validate()?;
    if w.len() != ds.n() {
        return Err(Error::LengthMismatch { left: w.len(), right: ds.n() });
    }
    let weights = w.as_slice();
    let active: Vec<usize> = (0..ds.n()).filter(|&i| weights[i] > 0.0).collect();
    if active.is_empty() {
        return Err(Error::InvalidWeights("all weights are zero".into()));
    }
    let trainer = Trainer {
        ds,
        w: weights,
        eps: spec.smoothing / active.len() as f64,
        max_depth: spec.effective_depth(),
    };
    let (pos, neg) = trainer.masses(&active);
    let root = if pos == 0.0 || neg == 0.0 {
        trainer.leaf(pos, neg)
    } else {
        trainer.build(&active, trainer.max_depth)
    };
    Ok(TrainedLearner { root, spec: *spec, dim: ds.dim() })
}
