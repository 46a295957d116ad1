//! Seeded mini-batch training with early stopping, and inference.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{build_network, class_weights, task_targets, ModelConfig};
use crate::error::{Error, Result};
use crate::nn::{mse, weighted_bce, AdamState, Network};
use crate::preprocess::WindowSample;
use crate::tensor::Tensor;

/// RNG stream id for epoch shuffles (initialization uses stream 0 under
/// the same seed).
const SHUFFLE_STREAM: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub train_loss: f64,
    pub val_loss: f64,
}

/// A trained network plus everything needed to audit the run.
#[derive(Clone, Debug)]
pub struct TrainedModel {
    pub config: ModelConfig,
    pub network: Network,
    /// One entry per epoch actually run.
    pub history: Vec<EpochStats>,
    /// Number of epochs run; equals `history.len()`.
    pub stopped_epoch: usize,
    /// Epoch whose parameters were restored (lowest validation loss).
    pub best_epoch: usize,
}

impl TrainedModel {
    pub fn predict(&self, windows: &[WindowSample]) -> Result<Vec<f64>> {
        predict(&self.network, windows)
    }
}

/// Early-stopping bookkeeping: stop once the validation loss has gone
/// `patience` consecutive epochs without improving on the best seen.
#[derive(Clone, Debug)]
pub struct EarlyStopper {
    patience: usize,
    best_loss: f64,
    best_epoch: usize,
    stale: usize,
}

/// What [`EarlyStopper::observe`] decided about the epoch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EpochDecision {
    /// This epoch set a new best validation loss.
    pub improved: bool,
    /// Training should stop after this epoch.
    pub stop: bool,
}

impl EarlyStopper {
    pub fn new(patience: usize) -> Self {
        EarlyStopper {
            patience,
            best_loss: f64::INFINITY,
            best_epoch: 0,
            stale: 0,
        }
    }

    pub fn observe(&mut self, epoch: usize, val_loss: f64) -> EpochDecision {
        if val_loss < self.best_loss {
            self.best_loss = val_loss;
            self.best_epoch = epoch;
            self.stale = 0;
            EpochDecision {
                improved: true,
                stop: false,
            }
        } else {
            self.stale += 1;
            EpochDecision {
                improved: false,
                stop: self.stale >= self.patience,
            }
        }
    }

    pub fn best_epoch(&self) -> usize {
        self.best_epoch
    }
}

fn snapshot(network: &Network) -> Vec<f64> {
    network
        .param_slices()
        .iter()
        .flat_map(|s| s.iter().copied())
        .collect()
}

fn restore(network: &mut Network, saved: &[f64]) {
    let mut offset = 0;
    for slice in network.param_slices_mut() {
        slice.copy_from_slice(&saved[offset..offset + slice.len()]);
        offset += slice.len();
    }
}

/// Train the published stack on `train_set`, monitoring `val_set`.
///
/// Preconditions (enforced upstream by the cross-validation harness):
/// train and val are disjoint by participant, and a classification val
/// set arrives majority-downsampled.
///
/// Classification samples are weighted inverse to their class frequency
/// inside the loss mean; regression uses plain MSE. Mini-batches are
/// reshuffled every epoch from a seeded generator, the optimizer steps
/// once per batch, and the returned parameters are those of the epoch
/// with the lowest validation loss.
pub fn train(
    train_set: &[WindowSample],
    val_set: &[WindowSample],
    config: &ModelConfig,
) -> Result<TrainedModel> {
    config.validate()?;
    if train_set.is_empty() {
        return Err(Error::Validation("empty training set".into()));
    }
    if val_set.is_empty() {
        return Err(Error::Validation("empty validation set".into()));
    }
    let task = config.task;
    let train_targets = task_targets(train_set, task)?;
    let val_targets = task_targets(val_set, task)?;
    let sample_weights: Option<Vec<f64>> = if task.is_classification() {
        let (w0, w1) = class_weights(&train_targets)?;
        Some(
            train_targets
                .iter()
                .map(|&t| if t == 1.0 { w1 } else { w0 })
                .collect(),
        )
    } else {
        None
    };

    let mut network = build_network(task, config.seed)?;
    let mut adam = AdamState::new(config.optimizer, network.parameter_count())?;
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(config.seed);
    shuffle_rng.set_stream(SHUFFLE_STREAM);

    let mut stopper = EarlyStopper::new(config.patience);
    let mut best_params = snapshot(&network);
    let mut history = Vec::new();
    let mut indices: Vec<usize> = (0..train_set.len()).collect();
    let mut stopped_epoch = 0;

    for epoch in 1..=config.epochs {
        indices.shuffle(&mut shuffle_rng);
        let mut weighted_total = 0.0;
        for (batch_idx, batch) in indices.chunks(config.batch_size).enumerate() {
            let value = train_batch(
                &mut network,
                &mut adam,
                train_set,
                &train_targets,
                sample_weights.as_deref(),
                batch,
                task.is_classification(),
            )
            .map_err(|e| match e {
                Error::Numeric(msg) => {
                    Error::Numeric(format!("epoch {epoch}, batch {batch_idx}: {msg}"))
                }
                other => other,
            })?;
            weighted_total += value * batch.len() as f64;
        }
        let train_loss = weighted_total / train_set.len() as f64;
        let val_loss = evaluate_loss(&network, val_set, &val_targets, task.is_classification())?;
        if !val_loss.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite validation loss at epoch {epoch}"
            )));
        }
        history.push(EpochStats {
            train_loss,
            val_loss,
        });
        stopped_epoch = epoch;
        let decision = stopper.observe(epoch, val_loss);
        if decision.improved {
            best_params = snapshot(&network);
        }
        if decision.stop {
            break;
        }
    }

    restore(&mut network, &best_params);
    Ok(TrainedModel {
        config: *config,
        network,
        history,
        stopped_epoch,
        best_epoch: stopper.best_epoch(),
    })
}

fn train_batch(
    network: &mut Network,
    adam: &mut AdamState,
    windows: &[WindowSample],
    targets: &[f64],
    weights: Option<&[f64]>,
    batch: &[usize],
    classification: bool,
) -> Result<f64> {
    let mut preds = Vec::with_capacity(batch.len());
    let mut caches = Vec::with_capacity(batch.len());
    for &i in batch {
        let (out, cache) = network.forward_cached(&windows[i].values)?;
        preds.push(out.scalar()?);
        caches.push(cache);
    }
    let batch_targets: Vec<f64> = batch.iter().map(|&i| targets[i]).collect();
    let batch_weights: Option<Vec<f64>> =
        weights.map(|w| batch.iter().map(|&i| w[i]).collect());
    let (value, grad_preds) = if classification {
        weighted_bce(&preds, &batch_targets, batch_weights.as_deref())?
    } else {
        mse(&preds, &batch_targets)?
    };

    let mut grads = network.zero_grads();
    for (k, cache) in caches.iter().enumerate() {
        let g = network.backward(&Tensor::vector(vec![grad_preds[k]])?, cache)?;
        grads.add(&g)?;
    }
    let grad_slices = grads.slices();
    let mut params = network.param_slices_mut();
    adam.step(&mut params, &grad_slices)?;
    Ok(value)
}

fn evaluate_loss(
    network: &Network,
    windows: &[WindowSample],
    targets: &[f64],
    classification: bool,
) -> Result<f64> {
    let preds = predict(network, windows)?;
    let (value, _) = if classification {
        weighted_bce(&preds, targets, None)?
    } else {
        mse(&preds, targets)?
    };
    Ok(value)
}

/// Forward every window through the network; classification outputs are
/// probabilities in (0, 1), regression outputs are MET estimates.
pub fn predict(network: &Network, windows: &[WindowSample]) -> Result<Vec<f64>> {
    windows
        .iter()
        .map(|w| network.forward(&w.values)?.scalar())
        .collect()
}
