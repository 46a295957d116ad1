//! Steady-state MET derivation from breath-by-breath VO2.

use crate::error::{Error, Result};

/// Resting VO2 in ml/min/kg; MET = VO2 / 3.5.
pub const MET_VO2_DIVISOR: f64 = 3.5;

/// Half-width of the centered running-average window (30 s total).
pub const SMOOTH_HALF_WINDOW_S: f64 = 15.0;

/// Steady-state averaging window, seconds after activity start.
pub const STEADY_STATE_START_S: f64 = 120.0;
pub const STEADY_STATE_END_S: f64 = 240.0;

/// Steady-state MET of one activity bout.
///
/// Smooths the breath-by-breath series with a 30 s centered running mean
/// (time-based, truncated at the series edges), averages the smoothed
/// values over minutes 2 to 4 after `activity_start_s`, and divides by
/// 3.5 ml/min/kg.
///
/// The series must be in chronological order and span the full averaging
/// window; shorter coverage is an insufficient-data error, nonpositive
/// VO2 a validation error.
pub fn met_from_vo2(vo2_series: &[(f64, f64)], activity_start_s: f64) -> Result<f64> {
    if vo2_series.is_empty() {
        return Err(Error::InsufficientData("empty VO2 series".into()));
    }
    if !activity_start_s.is_finite() {
        return Err(Error::Validation(format!(
            "activity start time must be finite, got {activity_start_s}"
        )));
    }
    for (i, &(t, v)) in vo2_series.iter().enumerate() {
        if !t.is_finite() || !v.is_finite() {
            return Err(Error::Validation(format!(
                "non-finite VO2 sample ({t}, {v}) at index {i}"
            )));
        }
        if v <= 0.0 {
            return Err(Error::Validation(format!(
                "nonpositive VO2 value {v} ml/min/kg at t = {t} s"
            )));
        }
        if i > 0 && t < vo2_series[i - 1].0 {
            return Err(Error::Validation(format!(
                "VO2 timestamps must be nondecreasing, got {t} s after {} s",
                vo2_series[i - 1].0
            )));
        }
    }

    let first_t = vo2_series[0].0;
    let last_t = vo2_series[vo2_series.len() - 1].0;
    let window_lo = activity_start_s + STEADY_STATE_START_S;
    let window_hi = activity_start_s + STEADY_STATE_END_S;
    if first_t > window_lo || last_t < window_hi {
        return Err(Error::InsufficientData(format!(
            "VO2 series covers [{first_t}, {last_t}] s but the steady-state \
             window needs [{window_lo}, {window_hi}] s"
        )));
    }

    // 30 s centered running mean via a two-pointer sweep; `lo..hi` is the
    // index range with |t_j - t_i| <= 15 s.
    let n = vo2_series.len();
    let mut smoothed = vec![0.0; n];
    let mut lo = 0;
    let mut hi = 0;
    for i in 0..n {
        let t = vo2_series[i].0;
        while vo2_series[lo].0 < t - SMOOTH_HALF_WINDOW_S {
            lo += 1;
        }
        while hi < n && vo2_series[hi].0 <= t + SMOOTH_HALF_WINDOW_S {
            hi += 1;
        }
        let sum: f64 = vo2_series[lo..hi].iter().map(|&(_, v)| v).sum();
        smoothed[i] = sum / (hi - lo) as f64;
    }

    let mut total = 0.0;
    let mut count = 0usize;
    for (i, &(t, _)) in vo2_series.iter().enumerate() {
        if t >= window_lo && t <= window_hi {
            total += smoothed[i];
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::InsufficientData(format!(
            "no VO2 samples inside the steady-state window [{window_lo}, {window_hi}] s"
        )));
    }
    Ok(total / count as f64 / MET_VO2_DIVISOR)
}
