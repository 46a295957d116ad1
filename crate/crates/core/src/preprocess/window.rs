//! Segmentation of 30 Hz bouts into consecutive non-overlapping 15 s
//! windows.

use super::types::{ActivityBout, WindowSample, AXES, TARGET_RATE_HZ, WINDOW_LEN};
use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Windows cut from one bout plus bookkeeping for operator reporting.
#[derive(Clone, Debug)]
pub struct WindowizeOutcome {
    /// In temporal order; concatenating them reproduces the bout's first
    /// `450 * floor(n / 450)` samples exactly.
    pub windows: Vec<WindowSample>,
    /// Trailing samples (fewer than one window) that were dropped.
    pub discarded_samples: usize,
    /// True when the bout was too short for even one window.
    pub short_bout: bool,
}

/// Cut a 30 Hz bout into `floor(n / 450)` windows.
///
/// Each window inherits the bout's class flags and steady-state MET. A
/// bout shorter than 450 samples yields zero windows and sets the
/// `short_bout` flag rather than failing.
pub fn windowize(bout: &ActivityBout, participant_id: &str) -> Result<WindowizeOutcome> {
    if (bout.sample_rate_hz - TARGET_RATE_HZ).abs() > 1e-9 {
        return Err(Error::Validation(format!(
            "windowize requires a {TARGET_RATE_HZ} Hz bout, got {} Hz ({:?}); resample first",
            bout.sample_rate_hz, bout.activity_name
        )));
    }
    let met = bout.steady_state_met()?;
    let n = bout.samples.shape()[0];
    let count = n / WINDOW_LEN;

    let mut windows = Vec::with_capacity(count);
    for w in 0..count {
        let lo = w * WINDOW_LEN * AXES;
        let values = Tensor::from_vec(
            &[WINDOW_LEN, AXES],
            bout.samples.data()[lo..lo + WINDOW_LEN * AXES].to_vec(),
        )?;
        windows.push(WindowSample::new(
            values,
            bout.class_flags,
            met,
            participant_id,
            &bout.activity_name,
        )?);
    }
    Ok(WindowizeOutcome {
        windows,
        discarded_samples: n - count * WINDOW_LEN,
        short_bout: count == 0,
    })
}
