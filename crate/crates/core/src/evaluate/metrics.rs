//! Classification and regression metrics.
//!
//! Ratios with a zero denominator are reported as absent (`None`), never
//! silently coerced to a number.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard decision threshold: a score of 0.5 or more counts as positive.
pub const DECISION_THRESHOLD: f64 = 0.5;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub true_positives: u64,
    pub false_positives: u64,
    pub true_negatives: u64,
    pub false_negatives: u64,
}

impl ConfusionCounts {
    /// Tally hard decisions at [`DECISION_THRESHOLD`].
    pub fn from_scores(scores: &[f64], labels: &[f64]) -> Result<Self> {
        check_scored_labels(scores, labels)?;
        let mut counts = ConfusionCounts::default();
        for (&score, &label) in scores.iter().zip(labels) {
            let positive = score >= DECISION_THRESHOLD;
            match (label == 1.0, positive) {
                (true, true) => counts.true_positives += 1,
                (true, false) => counts.false_negatives += 1,
                (false, true) => counts.false_positives += 1,
                (false, false) => counts.true_negatives += 1,
            }
        }
        Ok(counts)
    }

    pub fn total(&self) -> u64 {
        self.true_positives + self.false_positives + self.true_negatives + self.false_negatives
    }
}

/// Per-run classification metrics; a field is `None` when its defining
/// ratio has a zero denominator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassificationMetrics {
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub precision: Option<f64>,
    pub f1: Option<f64>,
    pub balanced_accuracy: Option<f64>,
}

/// Derive the standard ratios from a confusion table.
pub fn confusion_metrics(c: &ConfusionCounts) -> ClassificationMetrics {
    let ratio = |num: u64, den: u64| (den > 0).then(|| num as f64 / den as f64);
    let sensitivity = ratio(c.true_positives, c.true_positives + c.false_negatives);
    let specificity = ratio(c.true_negatives, c.true_negatives + c.false_positives);
    let precision = ratio(c.true_positives, c.true_positives + c.false_positives);
    let f1 = match (precision, sensitivity) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        _ => None,
    };
    let balanced_accuracy = match (sensitivity, specificity) {
        (Some(sens), Some(spec)) => Some(0.5 * (sens + spec)),
        _ => None,
    };
    ClassificationMetrics {
        sensitivity,
        specificity,
        precision,
        f1,
        balanced_accuracy,
    }
}

fn check_scored_labels(scores: &[f64], labels: &[f64]) -> Result<()> {
    if scores.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if scores.len() != labels.len() {
        return Err(Error::Dimension(format!(
            "{} scores vs {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::Numeric(format!("non-finite score {bad}")));
    }
    if let Some(bad) = labels.iter().find(|&&l| l != 0.0 && l != 1.0) {
        return Err(Error::Validation(format!(
            "labels must be 0 or 1, got {bad}"
        )));
    }
    Ok(())
}

/// ROC curve and trapezoidal AUC via a descending threshold sweep.
///
/// Tied scores advance TP and FP together, producing the diagonal
/// segments that make the trapezoidal area equal the Mann-Whitney U
/// statistic with tie correction. Points run from (0,0) to (1,1),
/// nondecreasing in both coordinates.
pub fn roc_auc(scores: &[f64], labels: &[f64]) -> Result<(Vec<(f64, f64)>, f64)> {
    check_scored_labels(scores, labels)?;
    let positives = labels.iter().filter(|&&l| l == 1.0).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::DegenerateLabels(
            "AUC is undefined when only one class is present".into(),
        ));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap());

    let mut points = Vec::with_capacity(scores.len() + 1);
    points.push((0.0, 0.0));
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut i = 0;
    while i < order.len() {
        // One threshold step consumes the whole group of tied scores.
        let group_score = scores[order[i]];
        while i < order.len() && scores[order[i]] == group_score {
            if labels[order[i]] == 1.0 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / negatives as f64, tp as f64 / positives as f64));
    }

    let mut auc = 0.0;
    for pair in points.windows(2) {
        let (x0, y0) = pair[0];
        let (x1, y1) = pair[1];
        auc += (x1 - x0) * (y0 + y1) * 0.5;
    }
    Ok((points, auc))
}

/// Vertical averaging of ROC curves onto a fixed 101-point FPR grid.
///
/// At a vertical jump the upper TPR is used, so a perfect curve stays
/// perfect on the grid.
pub fn mean_roc(curves: &[Vec<(f64, f64)>]) -> Result<Vec<(f64, f64)>> {
    if curves.is_empty() {
        return Err(Error::Validation("mean ROC over zero curves".into()));
    }
    for curve in curves {
        if curve.len() < 2 {
            return Err(Error::Validation(format!(
                "ROC curve with {} points cannot be interpolated",
                curve.len()
            )));
        }
    }
    let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
    let mut means = Vec::with_capacity(grid.len());
    for &x in &grid {
        // Summing in sorted order makes the average independent of the
        // order the curves were supplied in.
        let mut tprs: Vec<f64> = curves.iter().map(|c| interpolate_tpr(c, x)).collect();
        tprs.sort_by(f64::total_cmp);
        let sum: f64 = tprs.iter().sum();
        means.push((x, sum / curves.len() as f64));
    }
    Ok(means)
}

fn interpolate_tpr(curve: &[(f64, f64)], x: f64) -> f64 {
    // Last point at or below x; ties on FPR resolve to the topmost.
    let mut j = 0;
    for (k, &(fpr, _)) in curve.iter().enumerate() {
        if fpr <= x {
            j = k;
        } else {
            break;
        }
    }
    let (x0, y0) = curve[j];
    if x0 >= x || j + 1 == curve.len() {
        return y0;
    }
    let (x1, y1) = curve[j + 1];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Root mean square error, in the units of the targets.
pub fn rmse(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    if predictions.is_empty() {
        return Err(Error::Validation("RMSE of an empty set".into()));
    }
    if predictions.len() != targets.len() {
        return Err(Error::Dimension(format!(
            "{} predictions vs {} targets",
            predictions.len(),
            targets.len()
        )));
    }
    let sum: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(&p, &t)| (p - t) * (p - t))
        .sum();
    Ok((sum / predictions.len() as f64).sqrt())
}
