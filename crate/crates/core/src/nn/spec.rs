use super::activation::Activation;

/// Shape-level description of one layer, used to build networks and to
/// account for trainable parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LayerSpec {
    Conv1d {
        in_channels: usize,
        out_channels: usize,
        kernel_width: usize,
        activation: Activation,
    },
    /// Sequence-to-vector LSTM: consumes `[T, in_features]`, emits the
    /// final hidden state `[hidden]`.
    Lstm { in_features: usize, hidden: usize },
    Dense {
        in_features: usize,
        out_features: usize,
        activation: Activation,
    },
}

impl LayerSpec {
    /// Number of trainable parameters (weights plus biases).
    pub fn parameter_count(&self) -> usize {
        match *self {
            LayerSpec::Conv1d {
                in_channels,
                out_channels,
                kernel_width,
                ..
            } => kernel_width * in_channels * out_channels + out_channels,
            LayerSpec::Lstm {
                in_features,
                hidden,
            } => 4 * ((in_features + hidden) * hidden + hidden),
            LayerSpec::Dense {
                in_features,
                out_features,
                ..
            } => in_features * out_features + out_features,
        }
    }

    /// Output shape given an input shape, if the layer accepts it.
    pub fn output_shape(&self, input: &[usize]) -> Option<Vec<usize>> {
        match *self {
            LayerSpec::Conv1d {
                in_channels,
                out_channels,
                ..
            } => match input {
                [t, c] if *c == in_channels => Some(vec![*t, out_channels]),
                _ => None,
            },
            LayerSpec::Lstm {
                in_features,
                hidden,
            } => match input {
                [_, c] if *c == in_features => Some(vec![hidden]),
                _ => None,
            },
            LayerSpec::Dense {
                in_features,
                out_features,
                ..
            } => match input {
                [c] if *c == in_features => Some(vec![out_features]),
                _ => None,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conv_count_matches_published_layer_sizes() {
        let spec = LayerSpec::Conv1d {
            in_channels: 3,
            out_channels: 16,
            kernel_width: 8,
            activation: Activation::ReLU,
        };
        assert_eq!(spec.parameter_count(), 400);

        let spec = LayerSpec::Conv1d {
            in_channels: 16,
            out_channels: 32,
            kernel_width: 8,
            activation: Activation::ReLU,
        };
        assert_eq!(spec.parameter_count(), 4128);

        let spec = LayerSpec::Conv1d {
            in_channels: 32,
            out_channels: 64,
            kernel_width: 8,
            activation: Activation::ReLU,
        };
        assert_eq!(spec.parameter_count(), 16448);
    }

    #[test]
    fn lstm_count_matches_published_layer_size() {
        let spec = LayerSpec::Lstm {
            in_features: 64,
            hidden: 50,
        };
        assert_eq!(spec.parameter_count(), 23_000);
        assert_eq!(spec.parameter_count(), 4 * ((64 + 50) * 50 + 50));
    }

    #[test]
    fn dense_counts_match_published_layer_sizes() {
        let spec = LayerSpec::Dense {
            in_features: 50,
            out_features: 10,
            activation: Activation::ReLU,
        };
        assert_eq!(spec.parameter_count(), 510);
        let spec = LayerSpec::Dense {
            in_features: 10,
            out_features: 1,
            activation: Activation::Sigmoid,
        };
        assert_eq!(spec.parameter_count(), 11);
    }
}
