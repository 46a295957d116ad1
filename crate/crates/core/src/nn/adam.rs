use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Adam hyperparameters. Defaults follow the common framework settings:
/// learning rate 1e-3, beta1 0.9, beta2 0.999, epsilon 1e-7.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-7,
        }
    }
}

impl AdamConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Validation(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        for (name, beta) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&beta) {
                return Err(Error::Validation(format!(
                    "{name} must lie in [0, 1), got {beta}"
                )));
            }
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::Validation(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Adam optimizer state over a fixed-size flat parameter space. The first
/// and second moment vectors cover every trainable parameter; callers pass
/// the parameters as an ordered list of slices whose concatenation must
/// match the length given at construction. Bias correction uses a single
/// step counter shared by all slices within one `step` call.
#[derive(Clone, Debug)]
pub struct AdamState {
    config: AdamConfig,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamState {
    pub fn new(config: AdamConfig, param_count: usize) -> Result<Self> {
        config.validate()?;
        if param_count == 0 {
            return Err(Error::Dimension("optimizer over zero parameters".into()));
        }
        Ok(AdamState {
            config,
            m: vec![0.0; param_count],
            v: vec![0.0; param_count],
            t: 0,
        })
    }

    pub fn steps_taken(&self) -> u64 {
        self.t
    }

    /// Applies one update. `params[i]` and `grads[i]` must have equal
    /// lengths, and the slices together must span the full parameter count.
    pub fn step(&mut self, params: &mut [&mut [f64]], grads: &[&[f64]]) -> Result<()> {
        if params.len() != grads.len() {
            return Err(Error::Dimension(format!(
                "{} parameter slices vs {} gradient slices",
                params.len(),
                grads.len()
            )));
        }
        let total: usize = params.iter().map(|p| p.len()).sum();
        if total != self.m.len() {
            return Err(Error::Dimension(format!(
                "parameter slices span {total} values, optimizer state has {}",
                self.m.len()
            )));
        }

        self.t += 1;
        let c = &self.config;
        let inv1 = 1.0 / (1.0 - c.beta1.powi(self.t as i32));
        let inv2 = 1.0 / (1.0 - c.beta2.powi(self.t as i32));

        let mut offset = 0;
        for (p_slice, g_slice) in params.iter_mut().zip(grads.iter()) {
            if p_slice.len() != g_slice.len() {
                return Err(Error::Dimension(format!(
                    "parameter slice of {} values paired with gradient slice of {}",
                    p_slice.len(),
                    g_slice.len()
                )));
            }
            for (i, (&g, p)) in g_slice.iter().zip(p_slice.iter_mut()).enumerate() {
                if !g.is_finite() {
                    return Err(Error::Numeric(format!(
                        "non-finite gradient {g} at optimizer offset {}",
                        offset + i
                    )));
                }
                let m = &mut self.m[offset + i];
                let v = &mut self.v[offset + i];
                *m = c.beta1 * *m + (1.0 - c.beta1) * g;
                *v = c.beta2 * *v + (1.0 - c.beta2) * g * g;
                *p -= c.learning_rate * (*m * inv1) / ((*v * inv2).sqrt() + c.epsilon);
            }
            offset += g_slice.len();
        }
        Ok(())
    }
}
