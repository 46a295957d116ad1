//! Raw signal preprocessing: from per-participant recordings to labeled
//! 450x3 window samples.
//!
//! The stages mirror the data path of the study protocol: every bout is
//! resampled to 30 Hz, cut into consecutive non-overlapping 15 s windows,
//! tagged with its activity's class flags, and, when calorimetry is
//! present, with the bout's steady-state MET.

pub mod activities;
pub mod label;
pub mod met;
pub mod resample;
pub mod types;
pub mod window;

pub use activities::{ActivityClass, ActivityInfo, CATALOG, CLASSIFICATION_ACTIVITY_COUNT};
pub use label::{label_windows, LabeledSets};
pub use met::{met_from_vo2, MET_VO2_DIVISOR};
pub use resample::{resample_to_30hz, resample_to_30hz_with, ResampleMethod};
pub use types::{
    ActivityBout, ClassFlags, Demographics, ParticipantRecord, WindowSample, AXES,
    TARGET_RATE_HZ, WINDOW_LEN,
};
pub use window::{windowize, WindowizeOutcome};

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Output of [`preprocess_dataset`]: the window pool plus the counts the
/// CLI reports.
#[derive(Clone, Debug, Default)]
pub struct PreprocessSummary {
    pub windows: Vec<WindowSample>,
    /// Bouts shorter than one window (they contribute zero windows).
    pub short_bout_warnings: usize,
    /// Total trailing samples dropped by floor-division windowing.
    pub discarded_samples: usize,
}

/// Run the full preprocessing path over a dataset: resample each bout to
/// 30 Hz with `method`, then windowize. Windows come out grouped by
/// participant, in record order.
pub fn preprocess_dataset(
    records: &[ParticipantRecord],
    method: ResampleMethod,
) -> Result<PreprocessSummary> {
    let mut seen = HashSet::new();
    for record in records {
        if !seen.insert(record.participant_id.as_str()) {
            return Err(Error::Validation(format!(
                "duplicate participant id {:?}",
                record.participant_id
            )));
        }
    }

    let mut summary = PreprocessSummary::default();
    for record in records {
        for bout in &record.bouts {
            let samples = resample_to_30hz_with(&bout.samples, bout.sample_rate_hz, method)?;
            let resampled = ActivityBout {
                activity_name: bout.activity_name.clone(),
                sample_rate_hz: TARGET_RATE_HZ,
                samples,
                vo2_series: bout.vo2_series.clone(),
                class_flags: bout.class_flags,
            };
            let outcome = windowize(&resampled, &record.participant_id)?;
            summary.short_bout_warnings += outcome.short_bout as usize;
            summary.discarded_samples += outcome.discarded_samples;
            summary.windows.extend(outcome.windows);
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Tensor;

    fn record(id: &str, n: usize, rate: f64) -> ParticipantRecord {
        let data: Vec<f64> = (0..n * AXES).map(|i| (i % 97) as f64 * 0.01).collect();
        let bout = ActivityBout::new(
            "COMPUTER WORK",
            rate,
            Tensor::from_vec(&[n, AXES], data).unwrap(),
            None,
            ClassFlags {
                sedentary: true,
                ..ClassFlags::NONE
            },
        )
        .unwrap();
        ParticipantRecord {
            participant_id: id.into(),
            bouts: vec![bout],
            demographics: None,
        }
    }

    #[test]
    fn dataset_path_resamples_then_windows() {
        // 60 s at 100 Hz per participant: 1800 samples at 30 Hz, 4 windows.
        let records = vec![record("a", 6000, 100.0), record("b", 6000, 100.0)];
        let summary = preprocess_dataset(&records, ResampleMethod::Fourier).unwrap();
        assert_eq!(summary.windows.len(), 8);
        assert_eq!(summary.short_bout_warnings, 0);
        assert!(summary.windows[..4].iter().all(|w| w.participant_id == "a"));
        assert!(summary.windows[4..].iter().all(|w| w.participant_id == "b"));
    }

    #[test]
    fn short_bouts_are_counted_not_fatal() {
        let records = vec![record("a", 400, 30.0)];
        let summary = preprocess_dataset(&records, ResampleMethod::Fourier).unwrap();
        assert!(summary.windows.is_empty());
        assert_eq!(summary.short_bout_warnings, 1);
        assert_eq!(summary.discarded_samples, 400);
    }

    #[test]
    fn duplicate_participant_ids_rejected() {
        let records = vec![record("a", 450, 30.0), record("a", 450, 30.0)];
        assert!(matches!(
            preprocess_dataset(&records, ResampleMethod::Fourier),
            Err(Error::Validation(_))
        ));
    }
}
