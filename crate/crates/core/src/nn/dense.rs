use crate::error::{Error, Result};
use crate::kernels::{axpy, dot};
use crate::tensor::Tensor;

use super::activation::Activation;

/// Fully connected layer on a flat feature vector: `y = act(x W + b)`
/// with `weights` of shape `[C_in, C_out]` and `bias` of shape `[C_out]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    pub weights: Tensor,
    pub bias: Tensor,
    pub activation: Activation,
}

#[derive(Clone, Debug)]
pub struct DenseCache {
    input: Tensor,
    output: Tensor,
}

#[derive(Clone, Debug)]
pub struct DenseGrads {
    pub weights: Tensor,
    pub bias: Tensor,
}

impl Dense {
    pub fn new(weights: Tensor, bias: Tensor, activation: Activation) -> Result<Self> {
        weights.expect_rank(2, "dense weights")?;
        let out = weights.shape()[1];
        bias.expect_shape(&[out], "dense bias")?;
        Ok(Dense {
            weights,
            bias,
            activation,
        })
    }

    pub fn in_features(&self) -> usize {
        self.weights.shape()[0]
    }

    pub fn out_features(&self) -> usize {
        self.weights.shape()[1]
    }

    pub fn forward(&self, input: &Tensor) -> Result<Tensor> {
        input.expect_shape(&[self.in_features()], "dense input")?;
        let c_out = self.out_features();
        let mut out = self.bias.data().to_vec();
        let w = self.weights.data();
        for (c, &xv) in input.data().iter().enumerate() {
            if xv != 0.0 {
                axpy(xv, &w[c * c_out..(c + 1) * c_out], &mut out);
            }
        }
        self.activation.apply_slice(&mut out);
        Tensor::from_vec(&[c_out], out)
    }

    pub fn forward_cached(&self, input: &Tensor) -> Result<(Tensor, DenseCache)> {
        let output = self.forward(input)?;
        let cache = DenseCache {
            input: input.clone(),
            output: output.clone(),
        };
        Ok((output, cache))
    }

    pub fn backward(&self, grad_out: &Tensor, cache: &DenseCache) -> Result<(Tensor, DenseGrads)> {
        let (c_in, c_out) = (self.in_features(), self.out_features());
        grad_out.expect_shape(&[c_out], "dense upstream gradient")?;
        if cache.input.shape() != [c_in] || cache.output.shape() != [c_out] {
            return Err(Error::State(
                "dense cache does not match this layer's shapes".into(),
            ));
        }

        let mut dz = vec![0.0; c_out];
        for (o, d) in dz.iter_mut().enumerate() {
            *d = grad_out.data()[o]
                * self.activation.derivative_from_output(cache.output.data()[o]);
        }

        let w = self.weights.data();
        let mut grad_w = vec![0.0; c_in * c_out];
        let mut grad_x = vec![0.0; c_in];
        for c in 0..c_in {
            let xv = cache.input.data()[c];
            if xv != 0.0 {
                axpy(xv, &dz, &mut grad_w[c * c_out..(c + 1) * c_out]);
            }
            grad_x[c] = dot(&w[c * c_out..(c + 1) * c_out], &dz);
        }

        Ok((
            Tensor::from_vec(&[c_in], grad_x)?,
            DenseGrads {
                weights: Tensor::from_vec(&[c_in, c_out], grad_w)?,
                bias: Tensor::from_vec(&[c_out], dz)?,
            },
        ))
    }
}
