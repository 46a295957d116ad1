//! Participant-batched nested cross-validation.
//!
//! The outer loop holds out each batch as the test set; the inner loop
//! holds out each remaining batch as the validation set, so B batches
//! yield B(B-1) runs. Every run trains a fresh network on the leftover
//! batches, early-stops on the validation batch, and is scored on the
//! untouched test batch.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::folds::{make_fold_plan, FoldPlan};
use super::metrics::{
    confusion_metrics, mean_roc, rmse, roc_auc, ClassificationMetrics, ConfusionCounts,
};
use crate::error::{Error, Result};
use crate::model::{downsample_majority, predict, task_targets, train, ModelConfig, Task};
use crate::nn::AdamConfig;
use crate::preprocess::WindowSample;

/// Harness configuration. `workers` only controls concurrency and is
/// deliberately excluded from serialized echoes so reports from
/// different worker counts stay byte-identical.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CvConfig {
    #[serde(default = "default_n_batches")]
    pub n_batches: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(skip_serializing, default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    #[serde(default = "default_patience")]
    pub patience: usize,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    #[serde(default)]
    pub optimizer: AdamConfig,
}

fn default_n_batches() -> usize {
    10
}
fn default_workers() -> usize {
    1
}
fn default_epochs() -> usize {
    50
}
fn default_patience() -> usize {
    5
}
fn default_batch_size() -> usize {
    32
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            n_batches: default_n_batches(),
            seed: 0,
            workers: default_workers(),
            epochs: default_epochs(),
            patience: default_patience(),
            batch_size: default_batch_size(),
            optimizer: AdamConfig::default(),
        }
    }
}

impl CvConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_batches < 2 {
            return Err(Error::Validation(format!(
                "nested CV needs at least 2 batches, got {}",
                self.n_batches
            )));
        }
        if self.workers == 0 {
            return Err(Error::Validation("worker count must be positive".into()));
        }
        let model = ModelConfig {
            epochs: self.epochs,
            patience: self.patience,
            batch_size: self.batch_size,
            seed: self.seed,
            optimizer: self.optimizer,
            ..ModelConfig::new(Task::Sedentary)
        };
        model.validate()
    }

    fn model_config(&self, task: Task, run_seed: u64) -> ModelConfig {
        ModelConfig {
            task,
            epochs: self.epochs,
            patience: self.patience,
            batch_size: self.batch_size,
            seed: run_seed,
            optimizer: self.optimizer,
        }
    }
}

/// Outcome of a single (test batch, validation batch) run.
///
/// Classification fields are absent for regression runs and vice versa;
/// `auc`/`roc_points` are also absent when the test batch holds a single
/// class, where the curve is undefined.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub run_id: usize,
    pub test_batch: usize,
    pub val_batch: usize,
    pub test_windows: usize,
    pub stopped_epoch: usize,
    pub confusion: Option<ConfusionCounts>,
    pub metrics: Option<ClassificationMetrics>,
    pub roc_points: Option<Vec<(f64, f64)>>,
    pub auc: Option<f64>,
    pub rmse: Option<f64>,
}

/// Mean and population standard deviation of one metric over the runs
/// where it was defined.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: f64,
    pub sd: f64,
    pub n_runs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub sensitivity: Option<MetricSummary>,
    pub specificity: Option<MetricSummary>,
    pub precision: Option<MetricSummary>,
    pub f1: Option<MetricSummary>,
    pub balanced_accuracy: Option<MetricSummary>,
    pub auc: Option<MetricSummary>,
    pub rmse: Option<MetricSummary>,
    pub mean_roc: Option<Vec<(f64, f64)>>,
    /// SD convention used above.
    pub sd_convention: String,
    /// How test metrics were computed (full vs downsampled test sets).
    pub evaluation_note: String,
}

/// Everything `report.json` carries.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CvReport {
    pub library_version: String,
    pub task: Task,
    pub config: CvConfig,
    pub fold_plan: FoldPlan,
    pub runs: Vec<RunReport>,
    pub summary: SummaryReport,
}

/// Run the full nested cross-validation over `windows`.
///
/// Participants are partitioned into `config.n_batches` seeded batches;
/// per-run seeds derive as `config.seed + run_index`, which keeps results
/// independent of `config.workers`. Classification validation sets are
/// majority-downsampled before training; test sets are evaluated in full.
pub fn run_nested_cv(
    windows: &[WindowSample],
    task: Task,
    config: &CvConfig,
) -> Result<CvReport> {
    config.validate()?;
    if windows.is_empty() {
        return Err(Error::EmptyBatch);
    }

    // Participant ids in first-appearance order, so the fold plan does
    // not depend on window sort order beyond participant order.
    let mut ids: Vec<String> = Vec::new();
    let mut seen: HashSet<&str> = HashSet::new();
    for w in windows {
        if seen.insert(&w.participant_id) {
            ids.push(w.participant_id.clone());
        }
    }
    let plan = make_fold_plan(&ids, config.n_batches, config.seed)?;

    let mut batch_of: HashMap<&str, usize> = HashMap::new();
    for (b, batch) in plan.batches.iter().enumerate() {
        for id in batch {
            batch_of.insert(id, b);
        }
    }
    let mut batch_windows: Vec<Vec<usize>> = vec![Vec::new(); plan.n_batches()];
    for (i, w) in windows.iter().enumerate() {
        batch_windows[batch_of[w.participant_id.as_str()]].push(i);
    }

    let run_one = |(run_id, &(test_b, val_b)): (usize, &(usize, usize))| -> Result<RunReport> {
        execute_run(
            windows,
            task,
            config,
            &batch_windows,
            run_id,
            test_b,
            val_b,
        )
    };
    let runs: Vec<RunReport> = if config.workers == 1 {
        plan.runs.iter().enumerate().map(run_one).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::State(format!("worker pool: {e}")))?;
        pool.install(|| {
            plan.runs
                .par_iter()
                .enumerate()
                .map(run_one)
                .collect::<Result<Vec<_>>>()
        })?
    };

    let summary = summarize(&runs)?;
    Ok(CvReport {
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        task,
        config: *config,
        fold_plan: plan,
        runs,
        summary,
    })
}

#[allow(clippy::too_many_arguments)]
fn execute_run(
    windows: &[WindowSample],
    task: Task,
    config: &CvConfig,
    batch_windows: &[Vec<usize>],
    run_id: usize,
    test_b: usize,
    val_b: usize,
) -> Result<RunReport> {
    let gather = |idx: &[usize]| -> Vec<WindowSample> {
        idx.iter().map(|&i| windows[i].clone()).collect()
    };
    let test_set = gather(&batch_windows[test_b]);
    let mut val_set = gather(&batch_windows[val_b]);
    let train_idx: Vec<usize> = (0..batch_windows.len())
        .filter(|&b| b != test_b && b != val_b)
        .flat_map(|b| batch_windows[b].iter().copied())
        .collect();
    let train_set = gather(&train_idx);

    check_split_integrity(run_id, &train_set, &val_set, &test_set)?;

    let run_seed = config.seed.wrapping_add(run_id as u64);
    if task.is_classification() {
        // Balance the validation set so early stopping is not dominated
        // by the majority class. A single-class validation batch cannot
        // be balanced and is used as-is.
        let val_targets = task_targets(&val_set, task)?;
        match downsample_majority(&val_targets, run_seed) {
            Ok(keep) => val_set = keep.into_iter().map(|i| val_set[i].clone()).collect(),
            Err(Error::DegenerateLabels(_)) => {}
            Err(e) => return Err(e),
        }
    }

    let model_config = config.model_config(task, run_seed);
    let trained = train(&train_set, &val_set, &model_config)?;
    let scores = predict(&trained.network, &test_set)?;
    let targets = task_targets(&test_set, task)?;

    let mut report = RunReport {
        run_id,
        test_batch: test_b,
        val_batch: val_b,
        test_windows: test_set.len(),
        stopped_epoch: trained.stopped_epoch,
        confusion: None,
        metrics: None,
        roc_points: None,
        auc: None,
        rmse: None,
    };
    if task.is_classification() {
        let confusion = ConfusionCounts::from_scores(&scores, &targets)?;
        report.metrics = Some(confusion_metrics(&confusion));
        report.confusion = Some(confusion);
        match roc_auc(&scores, &targets) {
            Ok((points, auc)) => {
                report.roc_points = Some(points);
                report.auc = Some(auc);
            }
            // Single-class test batch: curve undefined, leave absent.
            Err(Error::DegenerateLabels(_)) => {}
            Err(e) => return Err(e),
        }
    } else {
        report.rmse = Some(rmse(&scores, &targets)?);
    }
    Ok(report)
}

fn check_split_integrity(
    run_id: usize,
    train_set: &[WindowSample],
    val_set: &[WindowSample],
    test_set: &[WindowSample],
) -> Result<()> {
    let participants = |set: &[WindowSample]| -> HashSet<String> {
        set.iter().map(|w| w.participant_id.clone()).collect()
    };
    let tr = participants(train_set);
    let va = participants(val_set);
    let te = participants(test_set);
    for (a, b, what) in [(&tr, &va, "train/val"), (&tr, &te, "train/test"), (&va, &te, "val/test")]
    {
        if let Some(id) = a.intersection(b).next() {
            return Err(Error::Integrity(format!(
                "run {run_id}: participant {id} appears in both {what} splits"
            )));
        }
    }
    Ok(())
}

/// Aggregate per-run metrics; the result is invariant under permutation
/// of the runs.
fn summarize(runs: &[RunReport]) -> Result<SummaryReport> {
    let collect = |f: &dyn Fn(&RunReport) -> Option<f64>| -> Option<MetricSummary> {
        let mut values: Vec<f64> = runs.iter().filter_map(f).collect();
        if values.is_empty() {
            return None;
        }
        values.sort_by(f64::total_cmp);
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Some(MetricSummary {
            mean,
            sd: var.sqrt(),
            n_runs: values.len(),
        })
    };

    let mut curves: Vec<Vec<(f64, f64)>> = runs
        .iter()
        .filter_map(|r| r.roc_points.clone())
        .collect();
    curves.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(p, q)| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)))
            .find(|c| c.is_ne())
            .unwrap_or_else(|| a.len().cmp(&b.len()))
    });
    let mean_curve = if curves.is_empty() {
        None
    } else {
        Some(mean_roc(&curves)?)
    };

    Ok(SummaryReport {
        sensitivity: collect(&|r| r.metrics.and_then(|m| m.sensitivity)),
        specificity: collect(&|r| r.metrics.and_then(|m| m.specificity)),
        precision: collect(&|r| r.metrics.and_then(|m| m.precision)),
        f1: collect(&|r| r.metrics.and_then(|m| m.f1)),
        balanced_accuracy: collect(&|r| r.metrics.and_then(|m| m.balanced_accuracy)),
        auc: collect(&|r| r.auc),
        rmse: collect(&|r| r.rmse),
        mean_roc: mean_curve,
        sd_convention: "population (divisor N over runs)".to_string(),
        evaluation_note:
            "metrics computed on full test batches; only validation sets are downsampled"
                .to_string(),
    })
}
