//! Network assembly and training: the published stack, class-imbalance
//! handling, seeded mini-batch training with early stopping, and
//! inference.

pub mod balance;
pub mod train;

pub use balance::{class_weights, downsample_majority};
pub use train::{predict, train, EarlyStopper, EpochStats, TrainedModel};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{Activation, AdamConfig, LayerSpec, Network};

/// The four modeled problems: three binary classifications plus MET
/// regression.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Sedentary,
    Locomotion,
    Lifestyle,
    MetRegression,
}

impl Task {
    pub fn is_classification(self) -> bool {
        !matches!(self, Task::MetRegression)
    }

    pub fn name(self) -> &'static str {
        match self {
            Task::Sedentary => "sedentary",
            Task::Locomotion => "locomotion",
            Task::Lifestyle => "lifestyle",
            Task::MetRegression => "met_regression",
        }
    }

    /// Accepts both snake_case and kebab-case spellings.
    pub fn parse_name(raw: &str) -> Option<Task> {
        match raw.to_ascii_lowercase().replace('-', "_").as_str() {
            "sedentary" => Some(Task::Sedentary),
            "locomotion" => Some(Task::Locomotion),
            "lifestyle" => Some(Task::Lifestyle),
            "met_regression" => Some(Task::MetRegression),
            _ => None,
        }
    }
}

/// Training hyperparameters; defaults follow the training protocol
/// (50 epochs, early-stopping patience 5).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub task: Task,
    pub epochs: usize,
    pub patience: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub optimizer: AdamConfig,
}

impl ModelConfig {
    pub fn new(task: Task) -> Self {
        ModelConfig {
            task,
            epochs: 50,
            patience: 5,
            batch_size: 32,
            seed: 0,
            optimizer: AdamConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::Validation("epochs must be at least 1".into()));
        }
        if self.patience == 0 {
            return Err(Error::Validation("patience must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Validation("batch_size must be at least 1".into()));
        }
        self.optimizer.validate()
    }
}

/// The published layer stack; only the head activation depends on the
/// task (sigmoid for classification, linear for regression).
pub fn architecture(task: Task) -> Vec<LayerSpec> {
    let head = if task.is_classification() {
        Activation::Sigmoid
    } else {
        Activation::Linear
    };
    vec![
        LayerSpec::Conv1d {
            in_channels: 3,
            out_channels: 16,
            kernel_width: 8,
            activation: Activation::ReLU,
        },
        LayerSpec::Conv1d {
            in_channels: 16,
            out_channels: 32,
            kernel_width: 8,
            activation: Activation::ReLU,
        },
        LayerSpec::Conv1d {
            in_channels: 32,
            out_channels: 64,
            kernel_width: 8,
            activation: Activation::ReLU,
        },
        LayerSpec::Lstm {
            in_features: 64,
            hidden: 50,
        },
        LayerSpec::Dense {
            in_features: 50,
            out_features: 10,
            activation: Activation::ReLU,
        },
        LayerSpec::Dense {
            in_features: 10,
            out_features: 1,
            activation: head,
        },
    ]
}

/// Build and initialize the stack for `task` from `seed`.
pub fn build_network(task: Task, seed: u64) -> Result<Network> {
    Network::from_specs(&architecture(task), seed)
}

/// Scalar training target of each window under `task`.
pub fn task_targets(
    windows: &[crate::preprocess::WindowSample],
    task: Task,
) -> Result<Vec<f64>> {
    windows
        .iter()
        .map(|w| match task {
            Task::Sedentary => Ok(w.labels.sedentary as u8 as f64),
            Task::Locomotion => Ok(w.labels.locomotion as u8 as f64),
            Task::Lifestyle => Ok(w.labels.lifestyle as u8 as f64),
            Task::MetRegression => w.met.ok_or_else(|| {
                Error::Validation(format!(
                    "window of {:?} (participant {}) has no MET target",
                    w.source_activity, w.participant_id
                ))
            }),
        })
        .collect()
}
