use serde::{Deserialize, Serialize};

/// Element-wise activation applied after a layer's affine map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    ReLU,
    Sigmoid,
    Tanh,
    Linear,
}

impl Activation {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::ReLU => {
                if z > 0.0 {
                    z
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => sigmoid(z),
            Activation::Tanh => crate::kernels::tanh(z),
            Activation::Linear => z,
        }
    }

    /// Derivative expressed through the activation's own output value.
    ///
    /// Every activation we use admits this form, which lets backward
    /// passes cache only post-activation values.
    #[inline]
    pub fn derivative_from_output(self, out: f64) -> f64 {
        match self {
            Activation::ReLU => {
                if out > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => out * (1.0 - out),
            Activation::Tanh => 1.0 - out * out,
            Activation::Linear => 1.0,
        }
    }

    pub fn apply_slice(self, values: &mut [f64]) {
        if self == Activation::Linear {
            return;
        }
        for v in values.iter_mut() {
            *v = self.apply(*v);
        }
    }
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}
