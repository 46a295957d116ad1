use crate::error::{Error, Result};
use crate::kernels::{axpy, dot, gemv_rows_acc, matmul_acc, tanh, transpose};
use crate::tensor::Tensor;

use super::activation::sigmoid;

/// Sequence-to-vector LSTM.
///
/// Standard gate equations with sigmoid input/forget/output gates and a
/// tanh candidate: `c_t = f ⊙ c_{t-1} + i ⊙ g`, `h_t = o ⊙ tanh(c_t)`,
/// starting from `h_0 = c_0 = 0`. Only the final hidden state `h_T` is
/// returned; the full per-timestep state is cached for backpropagation
/// through time.
///
/// Gate blocks are stored in the order `[input, forget, candidate, output]`
/// along the `4H` axis of `input_weights` (`[C_in, 4H]`),
/// `recurrent_weights` (`[H, 4H]`) and `bias` (`[4H]`).
#[derive(Clone, Debug, PartialEq)]
pub struct Lstm {
    pub input_weights: Tensor,
    pub recurrent_weights: Tensor,
    pub bias: Tensor,
}

/// Per-timestep state from a forward pass: gate activations, cell states
/// and hidden states, plus the input sequence itself.
#[derive(Clone, Debug)]
pub struct LstmCache {
    input: Tensor,
    /// `[T, 4H]`, post-nonlinearity gate values in block order i, f, g, o.
    gates: Vec<f64>,
    /// `[T, H]` cell states.
    cells: Vec<f64>,
    /// `[T, H]` `tanh` of the cell states, reused by the backward pass.
    tanh_cells: Vec<f64>,
    /// `[T, H]` hidden states.
    hidden: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct LstmGrads {
    pub input_weights: Tensor,
    pub recurrent_weights: Tensor,
    pub bias: Tensor,
}

impl Lstm {
    pub fn new(input_weights: Tensor, recurrent_weights: Tensor, bias: Tensor) -> Result<Self> {
        input_weights.expect_rank(2, "lstm input weights")?;
        recurrent_weights.expect_rank(2, "lstm recurrent weights")?;
        let four_h = input_weights.shape()[1];
        if !four_h.is_multiple_of(4) {
            return Err(Error::Dimension(format!(
                "lstm gate axis must be a multiple of 4, got {four_h}"
            )));
        }
        let hidden = four_h / 4;
        recurrent_weights.expect_shape(&[hidden, four_h], "lstm recurrent weights")?;
        bias.expect_shape(&[four_h], "lstm bias")?;
        Ok(Lstm {
            input_weights,
            recurrent_weights,
            bias,
        })
    }

    pub fn in_features(&self) -> usize {
        self.input_weights.shape()[0]
    }

    pub fn hidden(&self) -> usize {
        self.recurrent_weights.shape()[0]
    }

    pub fn forward(&self, input: &Tensor) -> Result<Tensor> {
        let (h_final, _) = self.run_forward(input, false)?;
        Ok(h_final)
    }

    pub fn forward_cached(&self, input: &Tensor) -> Result<(Tensor, LstmCache)> {
        let (h_final, cache) = self.run_forward(input, true)?;
        Ok((h_final, cache.expect("cache requested")))
    }

    fn run_forward(&self, input: &Tensor, want_cache: bool) -> Result<(Tensor, Option<LstmCache>)> {
        input.expect_rank(2, "lstm input")?;
        let (t_len, c_in) = (input.shape()[0], input.shape()[1]);
        if c_in != self.in_features() {
            return Err(Error::Dimension(format!(
                "lstm input has {c_in} features, weights expect {}",
                self.in_features()
            )));
        }
        if t_len == 0 {
            return Err(Error::Dimension("lstm input has zero timesteps".into()));
        }
        let h = self.hidden();
        let four_h = 4 * h;
        let x = input.data();
        let w = self.input_weights.data();
        let u = self.recurrent_weights.data();

        // Input contributions to every gate pre-activation at once:
        // Zx = X W, one matrix product instead of per-step accumulation.
        let mut zx = vec![0.0; t_len * four_h];
        matmul_acc(t_len, c_in, four_h, x, c_in, w, four_h, &mut zx, four_h);

        let mut gates = vec![0.0; if want_cache { t_len * four_h } else { four_h }];
        let mut cells = vec![0.0; if want_cache { t_len * h } else { 0 }];
        let mut tanh_cells = vec![0.0; if want_cache { t_len * h } else { 0 }];
        let mut hiddens = vec![0.0; if want_cache { t_len * h } else { 0 }];

        let mut h_prev = vec![0.0; h];
        let mut c_prev = vec![0.0; h];
        let mut z = vec![0.0; four_h];

        for t in 0..t_len {
            for (zi, (&bi, &zxi)) in z
                .iter_mut()
                .zip(self.bias.data().iter().zip(&zx[t * four_h..(t + 1) * four_h]))
            {
                *zi = bi + zxi;
            }
            gemv_rows_acc(&h_prev, u, four_h, &mut z);
            let gate_row = if want_cache {
                &mut gates[t * four_h..(t + 1) * four_h]
            } else {
                &mut gates[..]
            };
            for j in 0..h {
                let i_g = sigmoid(z[j]);
                let f_g = sigmoid(z[h + j]);
                let g_g = tanh(z[2 * h + j]);
                let o_g = sigmoid(z[3 * h + j]);
                gate_row[j] = i_g;
                gate_row[h + j] = f_g;
                gate_row[2 * h + j] = g_g;
                gate_row[3 * h + j] = o_g;
                let c_new = f_g * c_prev[j] + i_g * g_g;
                let tanh_c = tanh(c_new);
                c_prev[j] = c_new;
                h_prev[j] = o_g * tanh_c;
                if want_cache {
                    tanh_cells[t * h + j] = tanh_c;
                }
            }
            if want_cache {
                cells[t * h..(t + 1) * h].copy_from_slice(&c_prev);
                hiddens[t * h..(t + 1) * h].copy_from_slice(&h_prev);
            }
        }

        let h_final = Tensor::from_vec(&[h], h_prev)?;
        let cache = want_cache.then(|| LstmCache {
            input: input.clone(),
            gates,
            cells,
            tanh_cells,
            hidden: hiddens,
        });
        Ok((h_final, cache))
    }

    /// Backpropagation through time from the gradient at the final hidden
    /// state. Returns the input-sequence gradient and parameter gradients.
    pub fn backward(&self, grad_h_final: &Tensor, cache: &LstmCache) -> Result<(Tensor, LstmGrads)> {
        let h = self.hidden();
        let four_h = 4 * h;
        grad_h_final.expect_shape(&[h], "lstm upstream gradient")?;
        let (t_len, c_in) = (cache.input.shape()[0], cache.input.shape()[1]);
        if c_in != self.in_features() || cache.gates.len() != t_len * four_h {
            return Err(Error::State(
                "lstm cache does not match this layer's shapes".into(),
            ));
        }

        let x = cache.input.data();
        let w = self.input_weights.data();
        let u = self.recurrent_weights.data();

        // The state recurrences are inherently sequential, so the reverse
        // loop only produces the per-step gate gradients dz; every parameter
        // gradient is then a single matrix product over the whole sequence.
        let mut dz_all = vec![0.0; t_len * four_h];
        let mut dh = grad_h_final.data().to_vec();
        let mut dc = vec![0.0; h];

        for t in (0..t_len).rev() {
            let gate_row = &cache.gates[t * four_h..(t + 1) * four_h];
            let tanh_row = &cache.tanh_cells[t * h..(t + 1) * h];
            let dz = &mut dz_all[t * four_h..(t + 1) * four_h];
            for j in 0..h {
                let i_g = gate_row[j];
                let f_g = gate_row[h + j];
                let g_g = gate_row[2 * h + j];
                let o_g = gate_row[3 * h + j];
                let c_prev = if t > 0 { cache.cells[(t - 1) * h + j] } else { 0.0 };
                let tanh_c = tanh_row[j];

                let dcj = dc[j] + dh[j] * o_g * (1.0 - tanh_c * tanh_c);
                dz[j] = dcj * g_g * i_g * (1.0 - i_g);
                dz[h + j] = dcj * c_prev * f_g * (1.0 - f_g);
                dz[2 * h + j] = dcj * i_g * (1.0 - g_g * g_g);
                dz[3 * h + j] = dh[j] * tanh_c * o_g * (1.0 - o_g);
                dc[j] = dcj * f_g;
            }
            if t > 0 {
                for j in 0..h {
                    dh[j] = dot(&u[j * four_h..(j + 1) * four_h], dz);
                }
            }
        }

        let mut grad_b = vec![0.0; four_h];
        for dz_row in dz_all.chunks_exact(four_h) {
            axpy(1.0, dz_row, &mut grad_b);
        }

        // grad_W = X^T dZ
        let mut x_t = vec![0.0; t_len * c_in];
        transpose(x, t_len, c_in, &mut x_t);
        let mut grad_w = vec![0.0; c_in * four_h];
        matmul_acc(c_in, t_len, four_h, &x_t, t_len, &dz_all, four_h, &mut grad_w, four_h);

        // grad_U = H^T dZ, pairing h_{t-1} with dz_t; t = 0 has no history.
        let mut grad_u = vec![0.0; h * four_h];
        if t_len > 1 {
            let mut h_t = vec![0.0; (t_len - 1) * h];
            transpose(&cache.hidden[..(t_len - 1) * h], t_len - 1, h, &mut h_t);
            matmul_acc(
                h,
                t_len - 1,
                four_h,
                &h_t,
                t_len - 1,
                &dz_all[four_h..],
                four_h,
                &mut grad_u,
                four_h,
            );
        }

        // grad_X = dZ W^T
        let mut w_t = vec![0.0; c_in * four_h];
        transpose(w, c_in, four_h, &mut w_t);
        let mut grad_x = vec![0.0; t_len * c_in];
        matmul_acc(t_len, four_h, c_in, &dz_all, four_h, &w_t, c_in, &mut grad_x, c_in);

        Ok((
            Tensor::from_vec(&[t_len, c_in], grad_x)?,
            LstmGrads {
                input_weights: Tensor::from_vec(&[c_in, four_h], grad_w)?,
                recurrent_weights: Tensor::from_vec(&[h, four_h], grad_u)?,
                bias: Tensor::from_vec(&[four_h], grad_b)?,
            },
        ))
    }
}
