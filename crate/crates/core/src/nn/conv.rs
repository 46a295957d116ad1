use crate::error::{Error, Result};
use crate::kernels::{axpy, matmul_acc, transpose};
use crate::tensor::Tensor;

use super::activation::Activation;

/// 1-D convolution over `[T, C_in]` sequences with stride 1 and
/// length-preserving zero padding, followed by an element-wise activation.
///
/// Weights are `[K, C_in, C_out]`; padding is `floor((K-1)/2)` on the left
/// and `ceil((K-1)/2)` on the right so the output is `[T, C_out]` for any
/// kernel width.
#[derive(Clone, Debug, PartialEq)]
pub struct Conv1d {
    pub weights: Tensor,
    pub bias: Tensor,
    pub activation: Activation,
}

/// Forward state needed by [`Conv1d::backward`].
#[derive(Clone, Debug)]
pub struct ConvCache {
    pub(crate) input: Tensor,
    pub(crate) output: Tensor,
}

#[derive(Clone, Debug)]
pub struct ConvGrads {
    pub weights: Tensor,
    pub bias: Tensor,
}

impl Conv1d {
    pub fn new(weights: Tensor, bias: Tensor, activation: Activation) -> Result<Self> {
        weights.expect_rank(3, "conv weights")?;
        let out_channels = weights.shape()[2];
        bias.expect_shape(&[out_channels], "conv bias")?;
        Ok(Conv1d {
            weights,
            bias,
            activation,
        })
    }

    pub fn kernel_width(&self) -> usize {
        self.weights.shape()[0]
    }

    pub fn in_channels(&self) -> usize {
        self.weights.shape()[1]
    }

    pub fn out_channels(&self) -> usize {
        self.weights.shape()[2]
    }

    fn pad_left(&self) -> usize {
        (self.kernel_width() - 1) / 2
    }

    /// Output rows `t0..t1` that tap `kk` can reach inside the signal, and
    /// the input row feeding output `t0`. Tap `kk` of output `t` reads input
    /// `t + kk - pad_left`.
    fn tap_span(&self, t_len: usize, kk: usize) -> (usize, usize, usize) {
        let pad_left = self.pad_left();
        let t0 = pad_left.saturating_sub(kk);
        let t1 = (t_len + pad_left).saturating_sub(kk).min(t_len);
        let s0 = t0 + kk - pad_left;
        (t0, t1, s0)
    }

    pub fn forward(&self, input: &Tensor) -> Result<Tensor> {
        input.expect_rank(2, "conv input")?;
        let (t_len, c_in) = (input.shape()[0], input.shape()[1]);
        if c_in != self.in_channels() {
            return Err(Error::Dimension(format!(
                "conv input has {c_in} channels, weights expect {}",
                self.in_channels()
            )));
        }
        let c_out = self.out_channels();
        let k = self.kernel_width();

        let mut out = vec![0.0; t_len * c_out];
        for row in out.chunks_exact_mut(c_out) {
            row.copy_from_slice(self.bias.data());
        }
        let w = self.weights.data();
        let x = input.data();
        // One matrix product per kernel tap: out[t0..t1, :] += X[s0.., :] W[kk].
        for kk in 0..k {
            let (t0, t1, s0) = self.tap_span(t_len, kk);
            if t0 >= t1 {
                continue;
            }
            matmul_acc(
                t1 - t0,
                c_in,
                c_out,
                &x[s0 * c_in..],
                c_in,
                &w[kk * c_in * c_out..],
                c_out,
                &mut out[t0 * c_out..],
                c_out,
            );
        }
        self.activation.apply_slice(&mut out);
        Tensor::from_vec(&[t_len, c_out], out)
    }

    pub fn forward_cached(&self, input: &Tensor) -> Result<(Tensor, ConvCache)> {
        let output = self.forward(input)?;
        let cache = ConvCache {
            input: input.clone(),
            output: output.clone(),
        };
        Ok((output, cache))
    }

    /// Gradients of a scalar loss w.r.t. input, weights and bias, given the
    /// upstream gradient at this layer's output.
    pub fn backward(
        &self,
        grad_out: &Tensor,
        cache: &ConvCache,
    ) -> Result<(Tensor, ConvGrads)> {
        let (t_len, c_in) = (cache.input.shape()[0], cache.input.shape()[1]);
        if c_in != self.in_channels() {
            return Err(Error::State(format!(
                "conv cache has {c_in} input channels, weights expect {}",
                self.in_channels()
            )));
        }
        let c_out = self.out_channels();
        grad_out.expect_shape(&[t_len, c_out], "conv upstream gradient")?;
        cache.output.expect_shape(&[t_len, c_out], "conv cached output")?;

        let k = self.kernel_width();
        let x = cache.input.data();
        let w = self.weights.data();

        // dz = grad_out * act'(output)
        let mut dz = grad_out.data().to_vec();
        for (d, &o) in dz.iter_mut().zip(cache.output.data()) {
            *d *= self.activation.derivative_from_output(o);
        }

        let mut grad_b = vec![0.0; c_out];
        for dz_row in dz.chunks_exact(c_out) {
            axpy(1.0, dz_row, &mut grad_b);
        }

        // Per tap: grad_W[kk] = X^T dZ and grad_X += dZ W[kk]^T over the
        // rows that tap actually touched in the forward pass.
        let mut x_t = vec![0.0; t_len * c_in];
        transpose(x, t_len, c_in, &mut x_t);
        let mut w_t = vec![0.0; c_in * c_out];
        let mut grad_w = vec![0.0; k * c_in * c_out];
        let mut grad_x = vec![0.0; t_len * c_in];

        for kk in 0..k {
            let (t0, t1, s0) = self.tap_span(t_len, kk);
            if t0 >= t1 {
                continue;
            }
            let m = t1 - t0;
            matmul_acc(
                c_in,
                m,
                c_out,
                &x_t[s0..],
                t_len,
                &dz[t0 * c_out..],
                c_out,
                &mut grad_w[kk * c_in * c_out..],
                c_out,
            );
            transpose(&w[kk * c_in * c_out..(kk + 1) * c_in * c_out], c_in, c_out, &mut w_t);
            matmul_acc(
                m,
                c_out,
                c_in,
                &dz[t0 * c_out..],
                c_out,
                &w_t,
                c_in,
                &mut grad_x[s0 * c_in..],
                c_in,
            );
        }

        Ok((
            Tensor::from_vec(&[t_len, c_in], grad_x)?,
            ConvGrads {
                weights: Tensor::from_vec(&[k, c_in, c_out], grad_w)?,
                bias: Tensor::from_vec(&[c_out], grad_b)?,
            },
        ))
    }
}
