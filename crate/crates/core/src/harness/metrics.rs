//! Confusion-matrix metrics and ROC AUC.
//!
//! Ratios whose denominator is zero are reported as `None` rather than 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub accuracy: f64,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub precision: Option<f64>,
    /// `None` when only one class is present.
    pub auc: Option<f64>,
    pub threshold: f64,
}

impl MetricsReport {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// Derives every ratio from the four counts.
    pub fn from_counts(tp: usize, fp: usize, tn: usize, fn_: usize, threshold: f64, auc: Option<f64>) -> Self {
        let ratio = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
        let total = tp + fp + tn + fn_;
        Self {
            tp,
            fp,
            tn,
            fn_,
            accuracy: ratio(tp + tn, total).unwrap_or(f64::NAN),
            sensitivity: ratio(tp, tp + fn_),
            specificity: ratio(tn, tn + fp),
            precision: ratio(tp, tp + fp),
            auc,
            threshold,
        }
    }
}

/// Counts at `threshold` with the rule `score >= threshold` ⇒ positive.
/// Returns `(tp, fp, tn, fn)`.
pub fn confusion(scores: &[f64], labels: &[u8], threshold: f64) -> (usize, usize, usize, usize) {
    let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
    for (&s, &y) in scores.iter().zip(labels) {
        match (s >= threshold, y == 1) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    (tp, fp, tn, fn_)
}

fn check_inputs(scores: &[f64], labels: &[u8]) -> Result<()> {
    if scores.len() != labels.len() {
        return Err(Error::Shape {
            op: "metrics",
            left: (scores.len(), 1),
            right: (labels.len(), 1),
        });
    }
    if labels.iter().any(|&y| y > 1) {
        return Err(Error::argument("labels must be 0 or 1"));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::argument("scores must not be NaN"));
    }
    Ok(())
}

/// Area under the ROC curve by trapezoidal integration over every distinct
/// score threshold.
///
/// The area is accumulated in integer units of (1/P)·(1/N)/2, so the result
/// is exactly the Mann-Whitney statistic with ties counted as one half.
pub fn roc_auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    check_inputs(scores, labels)?;
    let positives = labels.iter().filter(|&&y| y == 1).count() as u64;
    let negatives = labels.len() as u64 - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::MetricUndefined(
            "AUC needs at least one positive and one negative sample".into(),
        ));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    // Walk thresholds from high to low; each block of tied scores moves the
    // ROC point right by dfp and up by dtp, adding a trapezoid.
    let mut tp = 0u64;
    let mut twice_area = 0u64;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        let (mut dtp, mut dfp) = (0u64, 0u64);
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] == 1 {
                dtp += 1;
            } else {
                dfp += 1;
            }
            i += 1;
        }
        twice_area += dfp * (2 * tp + dtp);
        tp += dtp;
    }
    Ok(twice_area as f64 / (2 * positives * negatives) as f64)
}

/// All metrics for one set of scores.
pub fn metrics_from_scores(scores: &[f64], labels: &[u8], threshold: f64) -> Result<MetricsReport> {
    check_inputs(scores, labels)?;
    if scores.is_empty() {
        return Err(Error::argument("cannot evaluate an empty sample set"));
    }
    let (tp, fp, tn, fn_) = confusion(scores, labels, threshold);
    let auc = match roc_auc(scores, labels) {
        Ok(a) => Some(a),
        Err(Error::MetricUndefined(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(MetricsReport::from_counts(tp, fp, tn, fn_, threshold, auc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_separation() {
        let m = metrics_from_scores(&[0.9, 0.8, 0.1, 0.2], &[1, 1, 0, 0], 0.5).unwrap();
        assert_eq!(
            (m.accuracy, m.sensitivity, m.specificity, m.precision),
            (1.0, Some(1.0), Some(1.0), Some(1.0))
        );
        assert_eq!(m.auc, Some(1.0));
    }

    #[test]
    fn formulas_from_counts() {
        let m = MetricsReport::from_counts(3, 2, 4, 1, 0.5, None);
        assert_eq!(m.sensitivity, Some(0.75));
        assert!((m.specificity.unwrap() - 4.0 / 6.0).abs() < 1e-15);
        assert_eq!(m.precision, Some(0.6));
        assert_eq!(m.accuracy, 0.7);
        assert_eq!(m.total(), 10);
    }

    #[test]
    fn ties_at_threshold_are_positive() {
        let m = metrics_from_scores(&[0.5; 4], &[1, 0, 1, 0], 0.5).unwrap();
        assert_eq!((m.tp, m.fp, m.tn, m.fn_), (2, 2, 0, 0));
        assert_eq!(m.specificity, Some(0.0));
        assert_eq!(m.auc, Some(0.5));
    }

    #[test]
    fn undefined_ratios_are_flagged() {
        let m = metrics_from_scores(&[0.1, 0.2], &[0, 0], 0.5).unwrap();
        assert_eq!(m.precision, None);
        assert_eq!(m.sensitivity, None);
        assert_eq!(m.auc, None);
        assert_eq!(m.specificity, Some(1.0));
    }

    #[test]
    fn auc_pairwise_example() {
        let auc = roc_auc(&[0.8, 0.4, 0.6, 0.2], &[1, 1, 0, 0]).unwrap();
        assert_eq!(auc, 0.75);
    }

    #[test]
    fn auc_label_flip() {
        let scores = [0.3, 0.1, 0.7, 0.7, 0.2, 0.9];
        let labels = [1, 0, 0, 1, 1, 0];
        let flipped: Vec<u8> = labels.iter().map(|y| 1 - y).collect();
        let a = roc_auc(&scores, &labels).unwrap();
        let b = roc_auc(&scores, &flipped).unwrap();
        assert!((a + b - 1.0).abs() < 1e-15);
    }

    #[test]
    fn auc_errors() {
        assert!(matches!(roc_auc(&[0.1, 0.2], &[1, 1]), Err(Error::MetricUndefined(_))));
        assert!(roc_auc(&[0.1], &[1, 0]).is_err());
        assert!(roc_auc(&[0.1, 0.2], &[1, 2]).is_err());
        assert!(metrics_from_scores(&[], &[], 0.5).is_err());
    }
}
