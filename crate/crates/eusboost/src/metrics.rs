//! Confusion-matrix accounting and the scalar measures derived from it.
//!
//! All measures are reported in [0, 1]; report renderers multiply by 100.
//! AUC here is the single-point formula (1 + TPR - FPR) / 2 evaluated at the
//! classifier's operating point, not the trapezoidal ROC integral.

use serde::{Deserialize, Serialize};

use crate::dataset::ClassLabel;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub true_pos: u64,
    pub false_neg: u64,
    pub false_pos: u64,
    pub true_neg: u64,
}

impl ConfusionMatrix {
    pub fn new(true_pos: u64, false_neg: u64, false_pos: u64, true_neg: u64) -> Self {
        Self { true_pos, false_neg, false_pos, true_neg }
    }

    pub fn total(&self) -> u64 {
        self.true_pos + self.false_neg + self.false_pos + self.true_neg
    }

    pub fn from_counts(pairs: impl IntoIterator<Item = (ClassLabel, ClassLabel)>) -> Self {
        let mut cm = Self::new(0, 0, 0, 0);
        for (predicted, actual) in pairs {
            match (actual, predicted) {
                (ClassLabel::Positive, ClassLabel::Positive) => cm.true_pos += 1,
                (ClassLabel::Positive, ClassLabel::Negative) => cm.false_neg += 1,
                (ClassLabel::Negative, ClassLabel::Positive) => cm.false_pos += 1,
                (ClassLabel::Negative, ClassLabel::Negative) => cm.true_neg += 1,
            }
        }
        cm
    }
}

pub fn confusion_matrix(predicted: &[ClassLabel], actual: &[ClassLabel]) -> Result<ConfusionMatrix> {
    if predicted.len() != actual.len() {
        return Err(Error::LengthMismatch { left: predicted.len(), right: actual.len() });
    }
    if predicted.is_empty() {
        return Err(Error::UndefinedMetric { metric: "confusion matrix", reason: "no instances" });
    }
    Ok(ConfusionMatrix::from_counts(predicted.iter().copied().zip(actual.iter().copied())))
}

pub fn accuracy(cm: &ConfusionMatrix) -> Result<f64> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::UndefinedMetric { metric: "accuracy", reason: "zero total count" });
    }
    Ok((cm.true_pos + cm.true_neg) as f64 / total as f64)
}

/// True positive rate, TP / (TP + FN).
pub fn sensitivity(cm: &ConfusionMatrix) -> Result<f64> {
    let denom = cm.true_pos + cm.false_neg;
    if denom == 0 {
        return Err(Error::UndefinedMetric { metric: "sensitivity", reason: "no actual positives" });
    }
    Ok(cm.true_pos as f64 / denom as f64)
}

/// True negative rate, TN / (TN + FP).
pub fn specificity(cm: &ConfusionMatrix) -> Result<f64> {
    let denom = cm.true_neg + cm.false_pos;
    if denom == 0 {
        return Err(Error::UndefinedMetric { metric: "specificity", reason: "no actual negatives" });
    }
    Ok(cm.true_neg as f64 / denom as f64)
}

pub fn precision(cm: &ConfusionMatrix) -> Result<f64> {
    let denom = cm.true_pos + cm.false_pos;
    if denom == 0 {
        return Err(Error::UndefinedMetric { metric: "precision", reason: "no predicted positives" });
    }
    Ok(cm.true_pos as f64 / denom as f64)
}

/// sqrt(specificity * sensitivity).
pub fn geometric_mean(cm: &ConfusionMatrix) -> Result<f64> {
    Ok((specificity(cm)? * sensitivity(cm)?).sqrt())
}

/// Single-point AUC, (1 + TPR - FPR) / 2.
pub fn auc_single_point(cm: &ConfusionMatrix) -> Result<f64> {
    let tpr = sensitivity(cm)?;
    let fpr = 1.0 - specificity(cm)?;
    Ok((1.0 + tpr - fpr) / 2.0)
}

/// Harmonic mean of recall and precision; 0 when both vanish.
pub fn f_measure(cm: &ConfusionMatrix) -> Result<f64> {
    let recall = sensitivity(cm)?;
    let prec = precision(cm)?;
    if recall + prec == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * recall * prec / (recall + prec))
}
