use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

use super::conv::{Conv1d, ConvCache, ConvGrads};
use super::dense::{Dense, DenseCache, DenseGrads};
use super::lstm::{Lstm, LstmCache, LstmGrads};
use super::spec::LayerSpec;

#[derive(Clone, Debug, PartialEq)]
pub enum Layer {
    Conv1d(Conv1d),
    Lstm(Lstm),
    Dense(Dense),
}

#[derive(Clone, Debug)]
pub enum LayerCache {
    Conv1d(ConvCache),
    Lstm(LstmCache),
    Dense(DenseCache),
}

#[derive(Clone, Debug)]
pub enum LayerGrads {
    Conv1d(ConvGrads),
    Lstm(LstmGrads),
    Dense(DenseGrads),
}

impl Layer {
    pub fn spec(&self) -> LayerSpec {
        match self {
            Layer::Conv1d(c) => LayerSpec::Conv1d {
                in_channels: c.in_channels(),
                out_channels: c.out_channels(),
                kernel_width: c.kernel_width(),
                activation: c.activation,
            },
            Layer::Lstm(l) => LayerSpec::Lstm {
                in_features: l.in_features(),
                hidden: l.hidden(),
            },
            Layer::Dense(d) => LayerSpec::Dense {
                in_features: d.in_features(),
                out_features: d.out_features(),
                activation: d.activation,
            },
        }
    }

    pub fn forward(&self, input: &Tensor) -> Result<Tensor> {
        match self {
            Layer::Conv1d(c) => c.forward(input),
            Layer::Lstm(l) => l.forward(input),
            Layer::Dense(d) => d.forward(input),
        }
    }

    pub fn forward_cached(&self, input: &Tensor) -> Result<(Tensor, LayerCache)> {
        Ok(match self {
            Layer::Conv1d(c) => {
                let (out, cache) = c.forward_cached(input)?;
                (out, LayerCache::Conv1d(cache))
            }
            Layer::Lstm(l) => {
                let (out, cache) = l.forward_cached(input)?;
                (out, LayerCache::Lstm(cache))
            }
            Layer::Dense(d) => {
                let (out, cache) = d.forward_cached(input)?;
                (out, LayerCache::Dense(cache))
            }
        })
    }

    pub fn backward(&self, grad_out: &Tensor, cache: &LayerCache) -> Result<(Tensor, LayerGrads)> {
        Ok(match (self, cache) {
            (Layer::Conv1d(c), LayerCache::Conv1d(cache)) => {
                let (gx, g) = c.backward(grad_out, cache)?;
                (gx, LayerGrads::Conv1d(g))
            }
            (Layer::Lstm(l), LayerCache::Lstm(cache)) => {
                let (gx, g) = l.backward(grad_out, cache)?;
                (gx, LayerGrads::Lstm(g))
            }
            (Layer::Dense(d), LayerCache::Dense(cache)) => {
                let (gx, g) = d.backward(grad_out, cache)?;
                (gx, LayerGrads::Dense(g))
            }
            _ => {
                return Err(Error::State(
                    "layer cache kind does not match layer kind".into(),
                ))
            }
        })
    }

    /// Parameter tensors in the canonical order used everywhere a network is
    /// flattened: conv weights then bias; LSTM input weights, recurrent
    /// weights, bias; dense weights then bias.
    pub fn param_tensors(&self) -> Vec<&Tensor> {
        match self {
            Layer::Conv1d(c) => vec![&c.weights, &c.bias],
            Layer::Lstm(l) => vec![&l.input_weights, &l.recurrent_weights, &l.bias],
            Layer::Dense(d) => vec![&d.weights, &d.bias],
        }
    }

    pub fn param_tensors_mut(&mut self) -> Vec<&mut Tensor> {
        match self {
            Layer::Conv1d(c) => vec![&mut c.weights, &mut c.bias],
            Layer::Lstm(l) => vec![&mut l.input_weights, &mut l.recurrent_weights, &mut l.bias],
            Layer::Dense(d) => vec![&mut d.weights, &mut d.bias],
        }
    }
}

impl LayerGrads {
    fn tensors(&self) -> Vec<&Tensor> {
        match self {
            LayerGrads::Conv1d(g) => vec![&g.weights, &g.bias],
            LayerGrads::Lstm(g) => vec![&g.input_weights, &g.recurrent_weights, &g.bias],
            LayerGrads::Dense(g) => vec![&g.weights, &g.bias],
        }
    }

    fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        match self {
            LayerGrads::Conv1d(g) => vec![&mut g.weights, &mut g.bias],
            LayerGrads::Lstm(g) => vec![&mut g.input_weights, &mut g.recurrent_weights, &mut g.bias],
            LayerGrads::Dense(g) => vec![&mut g.weights, &mut g.bias],
        }
    }
}

/// Gradients for every parameter of a network, in layer order.
#[derive(Clone, Debug)]
pub struct NetworkGrads {
    pub layers: Vec<LayerGrads>,
}

impl NetworkGrads {
    /// Elementwise accumulation; shapes must match exactly.
    pub fn add(&mut self, other: &NetworkGrads) -> Result<()> {
        if self.layers.len() != other.layers.len() {
            return Err(Error::Dimension(
                "gradient accumulators cover different layer counts".into(),
            ));
        }
        for (mine, theirs) in self.layers.iter_mut().zip(other.layers.iter()) {
            let src = theirs.tensors();
            let dst = mine.tensors_mut();
            if src.len() != dst.len() {
                return Err(Error::Dimension("gradient layer kinds differ".into()));
            }
            for (d, s) in dst.into_iter().zip(src) {
                if d.shape() != s.shape() {
                    return Err(Error::Dimension(
                        "gradient tensors have mismatched shapes".into(),
                    ));
                }
                for (dv, sv) in d.data_mut().iter_mut().zip(s.data()) {
                    *dv += sv;
                }
            }
        }
        Ok(())
    }

    pub fn scale(&mut self, factor: f64) {
        for layer in &mut self.layers {
            for t in layer.tensors_mut() {
                for v in t.data_mut() {
                    *v *= factor;
                }
            }
        }
    }

    /// Flat gradient slices in canonical parameter order.
    pub fn slices(&self) -> Vec<&[f64]> {
        self.layers
            .iter()
            .flat_map(|l| l.tensors().into_iter().map(|t| t.data()))
            .collect()
    }
}

/// A feed-forward stack of layers applied in sequence. Sequence-shaped
/// tensors `[T, C]` flow through convolutions, collapse to a vector at the
/// LSTM, and stay vectors through the dense head.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    layers: Vec<Layer>,
}

fn glorot_uniform(rng: &mut ChaCha8Rng, shape: &[usize], fan_in: usize, fan_out: usize) -> Tensor {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    let len: usize = shape.iter().product();
    let data: Vec<f64> = (0..len).map(|_| rng.gen_range(-limit..=limit)).collect();
    Tensor::from_vec(shape, data).expect("generated data matches shape")
}

impl Network {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        let specs: Vec<LayerSpec> = layers.iter().map(|l| l.spec()).collect();
        validate_chain(&specs)?;
        Ok(Network { layers })
    }

    /// Builds a network with freshly initialized parameters. Weights use
    /// Glorot uniform draws from a ChaCha8 stream seeded with `seed`, so the
    /// same seed always yields bit-identical parameters. Biases start at
    /// zero except the LSTM forget-gate block, which starts at one.
    pub fn from_specs(specs: &[LayerSpec], seed: u64) -> Result<Self> {
        validate_chain(specs)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut layers = Vec::with_capacity(specs.len());
        for spec in specs {
            let layer = match *spec {
                LayerSpec::Conv1d {
                    in_channels,
                    out_channels,
                    kernel_width,
                    activation,
                } => {
                    let fan_in = kernel_width * in_channels;
                    let fan_out = kernel_width * out_channels;
                    let weights = glorot_uniform(
                        &mut rng,
                        &[kernel_width, in_channels, out_channels],
                        fan_in,
                        fan_out,
                    );
                    let bias = Tensor::zeros(&[out_channels]);
                    Layer::Conv1d(Conv1d::new(weights, bias, activation)?)
                }
                LayerSpec::Lstm { in_features, hidden } => {
                    let four_h = 4 * hidden;
                    let input_weights =
                        glorot_uniform(&mut rng, &[in_features, four_h], in_features, four_h);
                    let recurrent_weights =
                        glorot_uniform(&mut rng, &[hidden, four_h], hidden, four_h);
                    let mut bias = Tensor::zeros(&[four_h]);
                    bias.data_mut()[hidden..2 * hidden].fill(1.0);
                    Layer::Lstm(Lstm::new(input_weights, recurrent_weights, bias)?)
                }
                LayerSpec::Dense {
                    in_features,
                    out_features,
                    activation,
                } => {
                    let weights = glorot_uniform(
                        &mut rng,
                        &[in_features, out_features],
                        in_features,
                        out_features,
                    );
                    let bias = Tensor::zeros(&[out_features]);
                    Layer::Dense(Dense::new(weights, bias, activation)?)
                }
            };
            layers.push(layer);
        }
        Ok(Network { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn specs(&self) -> Vec<LayerSpec> {
        self.layers.iter().map(|l| l.spec()).collect()
    }

    pub fn parameter_count(&self) -> usize {
        self.layers
            .iter()
            .flat_map(|l| l.param_tensors())
            .map(|t| t.len())
            .sum()
    }

    pub fn forward(&self, input: &Tensor) -> Result<Tensor> {
        let mut current = input.clone();
        for layer in &self.layers {
            current = layer.forward(&current)?;
        }
        Ok(current)
    }

    pub fn forward_cached(&self, input: &Tensor) -> Result<(Tensor, Vec<LayerCache>)> {
        let mut caches = Vec::with_capacity(self.layers.len());
        let mut current = input.clone();
        for layer in &self.layers {
            let (out, cache) = layer.forward_cached(&current)?;
            caches.push(cache);
            current = out;
        }
        Ok((current, caches))
    }

    /// Backpropagates from the gradient at the network output. `caches` must
    /// come from a `forward_cached` call on this same network.
    pub fn backward(&self, grad_output: &Tensor, caches: &[LayerCache]) -> Result<NetworkGrads> {
        if caches.len() != self.layers.len() {
            return Err(Error::State(format!(
                "{} caches for {} layers",
                caches.len(),
                self.layers.len()
            )));
        }
        let mut grad = grad_output.clone();
        let mut layer_grads: Vec<Option<LayerGrads>> = vec![None; self.layers.len()];
        for (idx, (layer, cache)) in self.layers.iter().zip(caches.iter()).enumerate().rev() {
            let (gx, g) = layer.backward(&grad, cache)?;
            layer_grads[idx] = Some(g);
            grad = gx;
        }
        Ok(NetworkGrads {
            layers: layer_grads
                .into_iter()
                .map(|g| g.expect("every layer visited"))
                .collect(),
        })
    }

    /// Zero-valued gradient accumulator shaped like this network.
    pub fn zero_grads(&self) -> NetworkGrads {
        let layers = self
            .layers
            .iter()
            .map(|layer| match layer {
                Layer::Conv1d(c) => LayerGrads::Conv1d(ConvGrads {
                    weights: Tensor::zeros(c.weights.shape()),
                    bias: Tensor::zeros(c.bias.shape()),
                }),
                Layer::Lstm(l) => LayerGrads::Lstm(LstmGrads {
                    input_weights: Tensor::zeros(l.input_weights.shape()),
                    recurrent_weights: Tensor::zeros(l.recurrent_weights.shape()),
                    bias: Tensor::zeros(l.bias.shape()),
                }),
                Layer::Dense(d) => LayerGrads::Dense(DenseGrads {
                    weights: Tensor::zeros(d.weights.shape()),
                    bias: Tensor::zeros(d.bias.shape()),
                }),
            })
            .collect();
        NetworkGrads { layers }
    }

    /// Flat parameter slices in canonical order, for serialization.
    pub fn param_slices(&self) -> Vec<&[f64]> {
        self.layers
            .iter()
            .flat_map(|l| l.param_tensors().into_iter().map(|t| t.data()))
            .collect()
    }

    /// Mutable flat parameter slices in canonical order, for the optimizer.
    pub fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        self.layers
            .iter_mut()
            .flat_map(|l| l.param_tensors_mut().into_iter().map(|t| t.data_mut()))
            .collect()
    }
}

fn validate_chain(specs: &[LayerSpec]) -> Result<()> {
    if specs.is_empty() {
        return Err(Error::Validation("network has no layers".into()));
    }
    // Track (feature width, sequence-shaped?) through the stack. The input
    // is a sequence; only an LSTM may collapse it to a vector.
    let mut features = match specs[0] {
        LayerSpec::Conv1d { in_channels, .. } => in_channels,
        LayerSpec::Lstm { in_features, .. } => in_features,
        LayerSpec::Dense { .. } => {
            return Err(Error::Validation(
                "network must start from sequence input, not a dense layer".into(),
            ))
        }
    };
    let mut sequence = true;
    for (idx, spec) in specs.iter().enumerate() {
        match *spec {
            LayerSpec::Conv1d {
                in_channels,
                out_channels,
                ..
            } => {
                if !sequence {
                    return Err(Error::Validation(format!(
                        "layer {idx}: convolution after sequence was collapsed"
                    )));
                }
                if in_channels != features {
                    return Err(Error::Dimension(format!(
                        "layer {idx}: expects {in_channels} channels, previous layer provides {features}"
                    )));
                }
                features = out_channels;
            }
            LayerSpec::Lstm { in_features, hidden } => {
                if !sequence {
                    return Err(Error::Validation(format!(
                        "layer {idx}: LSTM after sequence was collapsed"
                    )));
                }
                if in_features != features {
                    return Err(Error::Dimension(format!(
                        "layer {idx}: expects {in_features} features, previous layer provides {features}"
                    )));
                }
                features = hidden;
                sequence = false;
            }
            LayerSpec::Dense {
                in_features,
                out_features,
                ..
            } => {
                if sequence {
                    return Err(Error::Validation(format!(
                        "layer {idx}: dense layer on sequence input"
                    )));
                }
                if in_features != features {
                    return Err(Error::Dimension(format!(
                        "layer {idx}: expects {in_features} features, previous layer provides {features}"
                    )));
                }
                features = out_features;
            }
        }
    }
    Ok(())
}
