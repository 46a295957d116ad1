use crate::error::{Error, Result};

/// Probabilities are clamped to `[EPS, 1 - EPS]` before taking logs so a
/// saturated sigmoid cannot produce an infinite loss.
pub const BCE_CLAMP: f64 = 1e-7;

fn check_pair(preds: &[f64], targets: &[f64]) -> Result<()> {
    if preds.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if preds.len() != targets.len() {
        return Err(Error::Dimension(format!(
            "{} predictions vs {} targets",
            preds.len(),
            targets.len()
        )));
    }
    if preds.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite prediction in loss".into()));
    }
    Ok(())
}

/// Mean binary cross-entropy with optional per-sample weights. Targets must
/// be exactly 0 or 1. Returns the scalar loss and its gradient with respect
/// to each prediction; the clamp is treated as pass-through when
/// differentiating, matching common framework behaviour.
pub fn weighted_bce(
    preds: &[f64],
    targets: &[f64],
    weights: Option<&[f64]>,
) -> Result<(f64, Vec<f64>)> {
    check_pair(preds, targets)?;
    if let Some(w) = weights {
        if w.len() != preds.len() {
            return Err(Error::Dimension(format!(
                "{} weights vs {} predictions",
                w.len(),
                preds.len()
            )));
        }
        if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Validation(
                "sample weights must be finite and non-negative".into(),
            ));
        }
    }
    let n = preds.len() as f64;
    let mut total = 0.0;
    let mut grad = vec![0.0; preds.len()];
    for i in 0..preds.len() {
        let y = targets[i];
        if y != 0.0 && y != 1.0 {
            return Err(Error::Validation(format!(
                "binary cross-entropy target must be 0 or 1, got {y}"
            )));
        }
        let w = weights.map_or(1.0, |w| w[i]);
        let p = preds[i].clamp(BCE_CLAMP, 1.0 - BCE_CLAMP);
        total -= w * (y * p.ln() + (1.0 - y) * (1.0 - p).ln());
        grad[i] = -(w / n) * (y / p - (1.0 - y) / (1.0 - p));
    }
    Ok((total / n, grad))
}

/// Mean squared error and its gradient with respect to each prediction.
pub fn mse(preds: &[f64], targets: &[f64]) -> Result<(f64, Vec<f64>)> {
    check_pair(preds, targets)?;
    let n = preds.len() as f64;
    let mut total = 0.0;
    let mut grad = vec![0.0; preds.len()];
    for i in 0..preds.len() {
        let d = preds[i] - targets[i];
        total += d * d;
        grad[i] = 2.0 * d / n;
    }
    Ok((total / n, grad))
}
