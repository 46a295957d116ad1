//! Seeded synthetic dataset generator.
//!
//! The real study data is private, so the pipeline ships a generator that
//! produces separable-by-construction participants: each activity class
//! is a band-limited sinusoid with class-specific amplitude plus optional
//! white noise, and every bout carries an analytically known MET. The
//! generator is the oracle dataset for end-to-end tests: class bands are
//! disjoint by validation, and MET targets are recoverable from the spec
//! alone (no hidden randomness in targets).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::{
    ActivityBout, ActivityClass, Demographics, ParticipantRecord, MET_VO2_DIVISOR,
};
use crate::tensor::Tensor;

/// Synthetic signals are generated at 100 Hz so the resampling path is
/// always exercised.
pub const GENERATION_RATE_HZ: f64 = 100.0;

/// MET targets are clipped to this range, matching the intensity span of
/// the catalog activities.
pub const MET_MIN: f64 = 1.0;
pub const MET_MAX: f64 = 8.0;

/// Half-width of a class frequency band, as a fraction of its base
/// frequency. Bout frequencies are drawn uniformly from the band.
pub const BAND_HALF_WIDTH: f64 = 0.15;

/// Deterministic per-bout amplitude envelope: bout `b` of a class scales
/// the class amplitude by a value in this range, spreading MET targets.
pub const AMP_SCALE_LO: f64 = 0.6;
pub const AMP_SCALE_HI: f64 = 1.4;

/// Sinusoid-plus-noise model of one activity class.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassSignalModel {
    pub base_freq_hz: f64,
    pub amplitude_g: f64,
    pub noise_sd: f64,
}

impl ClassSignalModel {
    /// Frequency band the class's bouts are drawn from.
    pub fn band(&self) -> (f64, f64) {
        (
            self.base_freq_hz * (1.0 - BAND_HALF_WIDTH),
            self.base_freq_hz * (1.0 + BAND_HALF_WIDTH),
        )
    }
}

/// Affine amplitude-to-MET map, clipped to `[MET_MIN, MET_MAX]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetModel {
    pub intercept: f64,
    pub slope_per_g: f64,
}

impl MetModel {
    pub fn met_for_amplitude(&self, amplitude_g: f64) -> f64 {
        (self.intercept + self.slope_per_g * amplitude_g).clamp(MET_MIN, MET_MAX)
    }
}

/// Full description of a synthetic dataset. Serialized as the `synth`
/// command's JSON spec file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthSpec {
    pub n_participants: usize,
    pub bouts_per_class: usize,
    pub bout_seconds: f64,
    pub sedentary: ClassSignalModel,
    pub locomotion: ClassSignalModel,
    pub lifestyle: ClassSignalModel,
    pub met_model: MetModel,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            n_participants: 20,
            bouts_per_class: 2,
            bout_seconds: 60.0,
            sedentary: ClassSignalModel {
                base_freq_hz: 0.3,
                amplitude_g: 0.05,
                noise_sd: 0.01,
            },
            locomotion: ClassSignalModel {
                base_freq_hz: 2.0,
                amplitude_g: 0.5,
                noise_sd: 0.01,
            },
            lifestyle: ClassSignalModel {
                base_freq_hz: 4.0,
                amplitude_g: 1.0,
                noise_sd: 0.01,
            },
            met_model: MetModel {
                intercept: 0.3,
                slope_per_g: 5.5,
            },
            seed: 0,
        }
    }
}

/// The classes the generator emits, in generation order.
pub const GENERATED_CLASSES: [ActivityClass; 3] = [
    ActivityClass::Sedentary,
    ActivityClass::Locomotion,
    ActivityClass::Lifestyle,
];

/// Catalog activities the generator cycles through per class, so the
/// synthetic manifests look like real ones and pass catalog validation.
fn class_activity_names(class: ActivityClass) -> &'static [&'static str] {
    match class {
        ActivityClass::Sedentary => &["COMPUTER WORK", "TV WATCHING", "STANDING STILL"],
        ActivityClass::Locomotion => &[
            "LEISURE WALK",
            "RAPID WALK",
            "STAIR ASCENT",
            "STAIR DESCENT",
            "WALKING AT RPE 1",
            "WALKING AT RPE 5",
        ],
        ActivityClass::Lifestyle => &[
            "SWEEPING",
            "VACUUMING",
            "MOPPING",
            "IRONING",
            "WASHING DISHES",
            "DRESSING",
        ],
        ActivityClass::EnergyExpenditureOnly => &[],
    }
}

impl SynthSpec {
    pub fn class_model(&self, class: ActivityClass) -> &ClassSignalModel {
        match class {
            ActivityClass::Sedentary => &self.sedentary,
            ActivityClass::Locomotion => &self.locomotion,
            ActivityClass::Lifestyle | ActivityClass::EnergyExpenditureOnly => &self.lifestyle,
        }
    }

    /// Deterministic amplitude of bout `b` of a class: the class
    /// amplitude scaled along `[AMP_SCALE_LO, AMP_SCALE_HI]`.
    pub fn bout_amplitude(&self, class: ActivityClass, bout_idx: usize) -> f64 {
        let scale = if self.bouts_per_class <= 1 {
            1.0
        } else {
            let frac = bout_idx as f64 / (self.bouts_per_class - 1) as f64;
            AMP_SCALE_LO + (AMP_SCALE_HI - AMP_SCALE_LO) * frac
        };
        self.class_model(class).amplitude_g * scale
    }

    /// The MET target attached to bout `b` of a class; a pure function of
    /// the spec, never of the drawn noise.
    pub fn expected_met(&self, class: ActivityClass, bout_idx: usize) -> f64 {
        self.met_model
            .met_for_amplitude(self.bout_amplitude(class, bout_idx))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_participants == 0 {
            return Err(Error::Validation("n_participants must be at least 1".into()));
        }
        if self.bouts_per_class == 0 {
            return Err(Error::Validation("bouts_per_class must be at least 1".into()));
        }
        if !self.bout_seconds.is_finite() || self.bout_seconds <= 0.0 {
            return Err(Error::Validation(format!(
                "bout_seconds must be positive, got {}",
                self.bout_seconds
            )));
        }
        let models = [
            ("sedentary", &self.sedentary),
            ("locomotion", &self.locomotion),
            ("lifestyle", &self.lifestyle),
        ];
        for (name, model) in &models {
            if !model.base_freq_hz.is_finite() || model.base_freq_hz <= 0.0 {
                return Err(Error::Validation(format!(
                    "{name}: base frequency must be positive, got {}",
                    model.base_freq_hz
                )));
            }
            if !model.amplitude_g.is_finite() || model.amplitude_g <= 0.0 {
                return Err(Error::Validation(format!(
                    "{name}: amplitude must be positive, got {}",
                    model.amplitude_g
                )));
            }
            if !model.noise_sd.is_finite() || model.noise_sd < 0.0 {
                return Err(Error::Validation(format!(
                    "{name}: noise SD must be non-negative, got {}",
                    model.noise_sd
                )));
            }
            let (_, hi) = model.band();
            if hi >= 15.0 {
                return Err(Error::Validation(format!(
                    "{name}: band reaches {hi:.3} Hz, at or above the 15 Hz target Nyquist"
                )));
            }
        }
        for i in 0..models.len() {
            for j in i + 1..models.len() {
                let (alo, ahi) = models[i].1.band();
                let (blo, bhi) = models[j].1.band();
                if alo <= bhi && blo <= ahi {
                    return Err(Error::Validation(format!(
                        "overlapping frequency bands: {} [{alo:.3}, {ahi:.3}] Hz and {} [{blo:.3}, {bhi:.3}] Hz",
                        models[i].0, models[j].0
                    )));
                }
            }
        }
        if !self.met_model.intercept.is_finite() || !self.met_model.slope_per_g.is_finite() {
            return Err(Error::Validation("met_model must be finite".into()));
        }
        Ok(())
    }
}

/// Generate the dataset described by `spec`.
///
/// Participant `idx` is drawn from `ChaCha8(seed + idx)`, so records are
/// independent of generation order and the whole dataset is a pure
/// function of the spec. Per participant and bout the generator draws a
/// frequency inside the class band, a random amplitude direction across
/// the three axes (the per-axis split varies, the total power does not),
/// per-axis phases, and per-sample Gaussian noise.
pub fn generate(spec: &SynthSpec) -> Result<Vec<ParticipantRecord>> {
    spec.validate()?;
    (0..spec.n_participants)
        .map(|idx| generate_participant(spec, idx))
        .collect()
}

fn generate_participant(spec: &SynthSpec, idx: usize) -> Result<ParticipantRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_add(idx as u64));
    let participant_id = format!("SP{:04}", idx + 1);

    let demographics = Demographics {
        age_years: (rng.gen_range(20.0..90.0_f64) * 10.0).round() / 10.0,
        sex: if rng.gen_bool(0.66) { "F" } else { "M" }.to_string(),
        bmi: (rng.gen_range(18.0..36.0_f64) * 10.0).round() / 10.0,
    };

    let n_samples = (spec.bout_seconds * GENERATION_RATE_HZ).round() as usize;
    let mut bouts = Vec::new();
    for class in GENERATED_CLASSES {
        let model = spec.class_model(class);
        let names = class_activity_names(class);
        let (band_lo, band_hi) = model.band();
        for b in 0..spec.bouts_per_class {
            let freq = rng.gen_range(band_lo..=band_hi);
            let amplitude = spec.bout_amplitude(class, b);

            // Random unit direction: per-axis amplitudes vary while their
            // squared sum stays exactly the bout amplitude.
            let mut dir = [0.0_f64; 3];
            loop {
                for d in &mut dir {
                    *d = rng.sample(StandardNormal);
                }
                let norm = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
                if norm > 1e-6 {
                    for d in &mut dir {
                        *d /= norm;
                    }
                    break;
                }
            }
            let phases = [
                rng.gen_range(0.0..std::f64::consts::TAU),
                rng.gen_range(0.0..std::f64::consts::TAU),
                rng.gen_range(0.0..std::f64::consts::TAU),
            ];

            let mut data = Vec::with_capacity(n_samples * 3);
            for i in 0..n_samples {
                let t = i as f64 / GENERATION_RATE_HZ;
                for a in 0..3 {
                    let mut v = amplitude
                        * dir[a]
                        * (std::f64::consts::TAU * freq * t + phases[a]).sin();
                    if model.noise_sd > 0.0 {
                        let z: f64 = rng.sample(StandardNormal);
                        v += model.noise_sd * z;
                    }
                    data.push(v);
                }
            }

            let met = spec.expected_met(class, b);
            // Constant VO2 at met * 3.5 every 2 s; the trace extends to the
            // steady-state horizon even when the bout is shorter, so desk
            // scale bouts still carry a MET.
            let vo2_end = spec.bout_seconds.max(250.0);
            let vo2: Vec<(f64, f64)> = (0..=(vo2_end / 2.0) as usize)
                .map(|k| (2.0 * k as f64, met * MET_VO2_DIVISOR))
                .collect();

            bouts.push(ActivityBout::new(
                names[b % names.len()],
                GENERATION_RATE_HZ,
                Tensor::from_vec(&[n_samples, 3], data)?,
                Some(vo2),
                class.flags(),
            )?);
        }
    }

    Ok(ParticipantRecord {
        participant_id,
        bouts,
        demographics: Some(demographics),
    })
}
