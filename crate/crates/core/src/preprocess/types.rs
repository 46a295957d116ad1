//! Domain records flowing through the preprocessing stage.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Samples per model window: 15 s at the 30 Hz model rate.
pub const WINDOW_LEN: usize = 450;

/// Tri-axial input: every signal row is (x, y, z) in units of g.
pub const AXES: usize = 3;

/// Every bout is brought to this rate before windowing.
pub const TARGET_RATE_HZ: f64 = 30.0;

/// Binary class membership for the three classification tasks.
///
/// At most one flag is true: catalog activities are either one-hot or
/// all-false (the energy-expenditure-only activities).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassFlags {
    pub sedentary: bool,
    pub locomotion: bool,
    pub lifestyle: bool,
}

impl ClassFlags {
    pub const NONE: ClassFlags = ClassFlags {
        sedentary: false,
        locomotion: false,
        lifestyle: false,
    };

    pub fn count(self) -> usize {
        self.sedentary as usize + self.locomotion as usize + self.lifestyle as usize
    }

    pub fn at_most_one(self) -> bool {
        self.count() <= 1
    }

    pub fn any(self) -> bool {
        self.count() > 0
    }
}

/// One continuous recording of a single scripted activity.
#[derive(Clone, Debug)]
pub struct ActivityBout {
    pub activity_name: String,
    pub sample_rate_hz: f64,
    /// Tri-axial acceleration, shape `[n, 3]`, units of g.
    pub samples: Tensor,
    /// Breath-by-breath (time s, VO2 ml/min/kg) pairs, times relative to
    /// bout start, present only when calorimetry was recorded.
    pub vo2_series: Option<Vec<(f64, f64)>>,
    pub class_flags: ClassFlags,
}

impl ActivityBout {
    pub fn new(
        activity_name: impl Into<String>,
        sample_rate_hz: f64,
        samples: Tensor,
        vo2_series: Option<Vec<(f64, f64)>>,
        class_flags: ClassFlags,
    ) -> Result<Self> {
        let activity_name = activity_name.into();
        samples.expect_rank(2, "bout samples")?;
        if samples.shape()[1] != AXES {
            return Err(Error::Dimension(format!(
                "bout {activity_name:?}: expected {AXES} signal axes, got {}",
                samples.shape()[1]
            )));
        }
        if !sample_rate_hz.is_finite() || sample_rate_hz <= 0.0 {
            return Err(Error::Validation(format!(
                "bout {activity_name:?}: sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        if !class_flags.at_most_one() {
            return Err(Error::Validation(format!(
                "bout {activity_name:?}: at most one class flag may be set, got {class_flags:?}"
            )));
        }
        Ok(ActivityBout {
            activity_name,
            sample_rate_hz,
            samples,
            vo2_series,
            class_flags,
        })
    }

    /// Steady-state MET from the attached VO2 series, if one is present.
    ///
    /// VO2 timestamps are relative to bout start, so the activity starts
    /// at t = 0 for the steady-state window.
    pub fn steady_state_met(&self) -> Result<Option<f64>> {
        self.vo2_series
            .as_deref()
            .map(|series| super::met::met_from_vo2(series, 0.0))
            .transpose()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Demographics {
    pub age_years: f64,
    pub sex: String,
    pub bmi: f64,
}

/// All recordings of one participant.
#[derive(Clone, Debug)]
pub struct ParticipantRecord {
    pub participant_id: String,
    pub bouts: Vec<ActivityBout>,
    pub demographics: Option<Demographics>,
}

/// A 15 s model input window with its labels, the unit fed to training.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowSample {
    /// Shape `[450, 3]`, finite by construction.
    pub values: Tensor,
    pub labels: ClassFlags,
    /// Steady-state MET of the source bout; present iff VO2 was recorded.
    pub met: Option<f64>,
    pub participant_id: String,
    pub source_activity: String,
}

impl WindowSample {
    pub fn new(
        values: Tensor,
        labels: ClassFlags,
        met: Option<f64>,
        participant_id: impl Into<String>,
        source_activity: impl Into<String>,
    ) -> Result<Self> {
        values.expect_shape(&[WINDOW_LEN, AXES], "window values")?;
        if let Some(m) = met {
            if !m.is_finite() || m < 0.0 {
                return Err(Error::Validation(format!(
                    "window MET must be a finite non-negative value, got {m}"
                )));
            }
        }
        Ok(WindowSample {
            values,
            labels,
            met,
            participant_id: participant_id.into(),
            source_activity: source_activity.into(),
        })
    }
}
