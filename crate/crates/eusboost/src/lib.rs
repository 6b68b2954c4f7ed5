//! Ensemble methods for imbalanced binary classification.
//!
//! The centerpiece is EUSBoost: evolutionary undersampling embedded in
//! AdaBoost.M2. Around it sit six reference methods (bagging, AdaBoost,
//! under/over/roughly-balanced bagging, RUSBoost), confusion-matrix
//! metrics (sensitivity, specificity, GM, single-point AUC, F-measure),
//! and a stratified cross-validation harness with paired Wilcoxon
//! signed-rank comparisons.
//!
//! Feature math is generic over the scalar type through [`Scalar`]
//! (any `num_traits::Float`); weights, metrics and statistics are `f64`.
//! Concrete aliases for the common cases live at the crate root.

pub mod dataset;
pub mod ensembles;
pub mod eus;
pub mod evaluation;
pub mod io;
pub mod learners;
pub mod metrics;
pub mod model;
pub mod random;
pub mod report;
pub mod sampling;
pub mod synth;

use std::fmt;

use num_traits::Float;
use thiserror::Error;

/// Scalar type for feature values. Blanket-implemented for `f32` and `f64`.
pub trait Scalar: Float + fmt::Debug + fmt::Display + Send + Sync + 'static {}
impl<T: Float + fmt::Debug + fmt::Display + Send + Sync + 'static> Scalar for T {}

pub type Dataset32 = dataset::Dataset<f32>;
pub type Dataset64 = dataset::Dataset<f64>;
pub type TrainedLearner32 = learners::TrainedLearner<f32>;
pub type TrainedLearner64 = learners::TrainedLearner<f64>;
pub type BoostedEnsemble64 = ensembles::BoostedEnsemble<f64>;
pub type BaggedEnsemble64 = ensembles::BaggedEnsemble<f64>;
pub type Model64 = ensembles::Model<f64>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("feature dimension mismatch at row {row}: expected {expected}, got {got}")]
    DimensionMismatch { row: usize, expected: usize, got: usize },
    #[error("non-finite feature value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("expected exactly two distinct labels, found {found}")]
    ClassCardinality { found: usize },
    #[error("degenerate dataset: no {class} instances")]
    DegenerateDataset { class: &'static str },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("metric {metric} undefined: {reason}")]
    UndefinedMetric { metric: &'static str, reason: &'static str },
    #[error("subset carries zero weight mass")]
    DegenerateSubset,
    #[error("candidate set too small for leave-one-out evaluation")]
    CandidateSetTooSmall,
    #[error("majority set too large for exhaustive search: {0} > 16")]
    ExhaustiveTooLarge(usize),
    #[error("no usable boosting round (every retry exceeded the pseudo-loss bound)")]
    NoUsableRounds,
    #[error("degenerate comparison: all paired differences are zero")]
    DegenerateComparison,
    #[error("every fold of the cross-validation was degenerate")]
    EveryFoldDegenerate,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("missing column '{0}'")]
    MissingColumn(String),
    #[error("cannot parse cell at row {row}, column '{col}': {msg}")]
    CsvValue { row: usize, col: String, msg: String },
    #[error("unsupported model file version {0}")]
    UnsupportedVersion(u64),
    #[error("corrupted model file: {0}")]
    CorruptModel(String),
    #[error("label '{0}' does not match the model's training labels")]
    UnknownLabel(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
