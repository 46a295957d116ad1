//! Split of preprocessed windows into classification and regression sets.

use super::activities::{self, ActivityClass};
use super::types::WindowSample;
use crate::error::{Error, Result};

/// Windows grouped by task eligibility.
#[derive(Clone, Debug, Default)]
pub struct LabeledSets {
    /// Windows of the 29 class-flagged activities.
    pub classification: Vec<WindowSample>,
    /// Windows of all 33 activities (energy-expenditure estimation).
    pub regression: Vec<WindowSample>,
}

/// Partition windows into the classification set (energy-expenditure-only
/// activities excluded) and the regression set (everything).
///
/// Every window's activity must exist in the catalog and its flags must
/// match the catalog row, which rules out label leakage from a
/// miscopied manifest.
pub fn label_windows(windows: &[WindowSample]) -> Result<LabeledSets> {
    let mut sets = LabeledSets::default();
    for window in windows {
        let info = activities::lookup(&window.source_activity).ok_or_else(|| {
            Error::Validation(format!(
                "unknown activity {:?} (participant {})",
                window.source_activity, window.participant_id
            ))
        })?;
        if window.labels != info.class.flags() {
            return Err(Error::Validation(format!(
                "window of {:?} (participant {}) carries flags {:?}, catalog says {:?}",
                window.source_activity,
                window.participant_id,
                window.labels,
                info.class.flags()
            )));
        }
        sets.regression.push(window.clone());
        if info.class != ActivityClass::EnergyExpenditureOnly {
            sets.classification.push(window.clone());
        }
    }
    Ok(sets)
}
