use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use har_core::error::{Error, Result};
use har_core::evaluate::{run_nested_cv, CvConfig, CvReport, MetricSummary};
use har_core::io;
use har_core::model::{downsample_majority, predict, task_targets, train, ModelConfig, Task};
use har_core::nn::AdamConfig;
use har_core::preprocess::{
    label_windows, preprocess_dataset, ResampleMethod, WindowSample, CATALOG,
    CLASSIFICATION_ACTIVITY_COUNT,
};
use har_core::synth::{generate, SynthSpec};

use crate::args::{Cli, Command};
use crate::run_manifest::ManifestBuilder;

/// RNG stream for the train/validation participant split; streams 0-2
/// belong to the library (init, shuffling, downsampling).
const VAL_SPLIT_STREAM: u64 = 3;
const DEFAULT_VAL_FRACTION: f64 = 0.2;

pub fn dispatch(cli: Cli) -> Result<()> {
    let Cli {
        seed,
        config,
        workers,
        command,
    } = cli;
    let config = config.as_deref();
    match command {
        Command::Synth { out_dir } => cmd_synth(seed, config, &out_dir),
        Command::Preprocess {
            manifest,
            out,
            method,
        } => cmd_preprocess(&manifest, &out, method),
        Command::Train {
            archive,
            task,
            out,
            val_fraction,
        } => cmd_train(seed, config, &archive, task, &out, val_fraction),
        Command::NestedCv {
            archive,
            task,
            out_dir,
        } => cmd_nested_cv(seed, config, workers, &archive, task, &out_dir),
        Command::Predict {
            checkpoint,
            archive,
            out,
        } => cmd_predict(&checkpoint, &archive, &out),
        Command::Report { report } => cmd_report(&report),
    }
}

/// Parse a JSON config file; a parse failure is a usage error carrying
/// serde's line/column diagnostics.
fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let bytes = io::read_file(p)?;
            serde_json::from_slice(&bytes)
                .map_err(|e| Error::Validation(format!("{}: {e}", p.display())))
        }
    }
}

fn cmd_synth(seed: Option<u64>, config: Option<&Path>, out_dir: &Path) -> Result<()> {
    let mut spec: SynthSpec = load_config(config)?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    let records = generate(&spec)?;
    let manifest_path = io::save_dataset(&records, out_dir)?;

    let bouts: usize = records.iter().map(|r| r.bouts.len()).sum();
    println!("participants: {}", records.len());
    println!("bouts: {bouts}");
    println!("dataset manifest: {}", manifest_path.display());

    ManifestBuilder::new("synth", serde_json::to_value(&spec)?, spec.seed)
        .output(&manifest_path)
        .write_beside(out_dir)?;
    Ok(())
}

fn cmd_preprocess(manifest: &Path, out: &Path, method: Option<ResampleMethod>) -> Result<()> {
    let method = method.unwrap_or_default();
    let records = io::load_dataset(manifest)?;
    let summary = preprocess_dataset(&records, method)?;
    io::write_windows(out, &summary.windows)?;

    let sets = label_windows(&summary.windows)?;
    println!(
        "activity catalog: {} activities, {} eligible for classification",
        CATALOG.len(),
        CLASSIFICATION_ACTIVITY_COUNT
    );
    println!("participants: {}", records.len());
    println!(
        "windows: {} total, {} classification, {} regression",
        summary.windows.len(),
        sets.classification.len(),
        sets.regression.len()
    );
    println!(
        "short bouts: {}, discarded trailing samples: {}",
        summary.short_bout_warnings, summary.discarded_samples
    );

    let mut by_class: BTreeMap<&str, usize> = BTreeMap::new();
    let mut by_participant: BTreeMap<&str, usize> = BTreeMap::new();
    for w in &summary.windows {
        let class = if w.labels.sedentary {
            "sedentary"
        } else if w.labels.locomotion {
            "locomotion"
        } else if w.labels.lifestyle {
            "lifestyle"
        } else {
            "ee-only"
        };
        *by_class.entry(class).or_default() += 1;
        *by_participant.entry(&w.participant_id).or_default() += 1;
    }
    for (class, n) in &by_class {
        println!("windows[{class}]: {n}");
    }
    for (pid, n) in &by_participant {
        println!("windows[{pid}]: {n}");
    }
    println!("archive: {}", out.display());

    ManifestBuilder::new(
        "preprocess",
        serde_json::json!({ "method": method }),
        0,
    )
    .input(manifest)
    .output(out)
    .write_beside(out)?;
    Ok(())
}

/// Optional training hyperparameters for the `train` config file.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct TrainFileConfig {
    epochs: Option<usize>,
    patience: Option<usize>,
    batch_size: Option<usize>,
    seed: Option<u64>,
    optimizer: Option<AdamConfig>,
    val_fraction: Option<f64>,
}

fn cmd_train(
    seed: Option<u64>,
    config: Option<&Path>,
    archive: &Path,
    task: Task,
    out: &Path,
    val_fraction_flag: Option<f64>,
) -> Result<()> {
    let file: TrainFileConfig = load_config(config)?;
    let mut model_config = ModelConfig::new(task);
    if let Some(v) = file.epochs {
        model_config.epochs = v;
    }
    if let Some(v) = file.patience {
        model_config.patience = v;
    }
    if let Some(v) = file.batch_size {
        model_config.batch_size = v;
    }
    if let Some(v) = file.optimizer {
        model_config.optimizer = v;
    }
    if let Some(s) = file.seed {
        model_config.seed = s;
    }
    if let Some(s) = seed {
        model_config.seed = s;
    }
    let val_fraction = val_fraction_flag
        .or(file.val_fraction)
        .unwrap_or(DEFAULT_VAL_FRACTION);
    if !(val_fraction > 0.0 && val_fraction < 1.0) {
        return Err(Error::Validation(format!(
            "val fraction must be in (0, 1), got {val_fraction}"
        )));
    }

    let windows = read_nonempty_archive(archive)?;
    let pool = select_task_windows(windows, task)?;
    let (train_set, val_set) = split_by_participant(pool, val_fraction, model_config.seed)?;
    let val_set = balance_validation(val_set, task, model_config.seed)?;
    println!(
        "training windows: {}, validation windows: {}",
        train_set.len(),
        val_set.len()
    );

    let trained = train(&train_set, &val_set, &model_config)?;
    io::save_checkpoint(out, &model_config, &trained.network)?;

    println!(
        "epochs run: {} (best validation at epoch {})",
        trained.stopped_epoch, trained.best_epoch
    );
    if let (Some(first), Some(last)) = (trained.history.first(), trained.history.last()) {
        println!(
            "train loss {:.6} -> {:.6}, val loss {:.6} -> {:.6}",
            first.train_loss, last.train_loss, first.val_loss, last.val_loss
        );
    }
    println!("checkpoint: {}", out.display());

    let mut config_echo = serde_json::to_value(model_config)?;
    config_echo["val_fraction"] = serde_json::json!(val_fraction);
    ManifestBuilder::new("train", config_echo, model_config.seed)
        .epochs(model_config.epochs)
        .input(archive)
        .output(out)
        .write_beside(out)?;
    Ok(())
}

fn cmd_nested_cv(
    seed: Option<u64>,
    config: Option<&Path>,
    workers: Option<usize>,
    archive: &Path,
    task: Task,
    out_dir: &Path,
) -> Result<()> {
    let mut cv: CvConfig = load_config(config)?;
    if let Some(s) = seed {
        cv.seed = s;
    }
    if let Some(w) = workers {
        cv.workers = w;
    }

    let windows = read_nonempty_archive(archive)?;
    let pool = select_task_windows(windows, task)?;
    let report = run_nested_cv(&pool, task, &cv)?;
    let written = io::write_cv_outputs(out_dir, &report)?;

    print_summary(&report);
    println!("report: {}", out_dir.join("report.json").display());

    let mut builder = ManifestBuilder::new("nested-cv", serde_json::to_value(cv)?, cv.seed)
        .workers(cv.workers)
        .epochs(cv.epochs)
        .input(archive);
    for path in &written {
        builder = builder.output(path);
    }
    builder.write_beside(out_dir)?;
    Ok(())
}

fn cmd_predict(checkpoint: &Path, archive: &Path, out: &Path) -> Result<()> {
    let (config, network) = io::load_checkpoint(checkpoint)?;
    let windows = read_nonempty_archive(archive)?;
    let scores = predict(&network, &windows)?;
    io::write_predictions_csv(out, &scores)?;

    println!("task: {}", config.task.name());
    println!("windows scored: {}", scores.len());
    println!("predictions: {}", out.display());

    ManifestBuilder::new("predict", serde_json::to_value(config)?, config.seed)
        .input(checkpoint)
        .input(archive)
        .output(out)
        .write_beside(out)?;
    Ok(())
}

fn cmd_report(path: &Path) -> Result<()> {
    let bytes = io::read_file(path)?;
    let report: CvReport = serde_json::from_slice(&bytes)
        .map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?;
    print_summary(&report);
    Ok(())
}

fn read_nonempty_archive(archive: &Path) -> Result<Vec<WindowSample>> {
    let windows = io::read_windows(archive)?;
    if windows.is_empty() {
        return Err(Error::Validation(format!(
            "window archive {} holds no windows",
            archive.display()
        )));
    }
    Ok(windows)
}

/// Windows eligible for `task`: the 29-activity classification set, or
/// the full regression set narrowed to windows with MET targets.
fn select_task_windows(windows: Vec<WindowSample>, task: Task) -> Result<Vec<WindowSample>> {
    let sets = label_windows(&windows)?;
    if task.is_classification() {
        return Ok(sets.classification);
    }
    let total = sets.regression.len();
    let with_met: Vec<WindowSample> = sets
        .regression
        .into_iter()
        .filter(|w| w.met.is_some())
        .collect();
    if with_met.is_empty() {
        return Err(Error::Validation(
            "no windows carry MET targets; regression needs VO2 data".into(),
        ));
    }
    if with_met.len() < total {
        eprintln!(
            "note: skipping {} windows without MET targets",
            total - with_met.len()
        );
    }
    Ok(with_met)
}

/// Seeded participant-level split, so no participant spans train and
/// validation.
fn split_by_participant(
    pool: Vec<WindowSample>,
    val_fraction: f64,
    seed: u64,
) -> Result<(Vec<WindowSample>, Vec<WindowSample>)> {
    let mut ids: Vec<&str> = Vec::new();
    let mut seen = HashSet::new();
    for w in &pool {
        if seen.insert(w.participant_id.as_str()) {
            ids.push(&w.participant_id);
        }
    }
    if ids.len() < 2 {
        return Err(Error::Validation(format!(
            "need at least 2 participants to split train/validation, got {}",
            ids.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(VAL_SPLIT_STREAM);
    let mut shuffled = ids.clone();
    shuffled.shuffle(&mut rng);
    let n_val = ((shuffled.len() as f64 * val_fraction).round() as usize)
        .clamp(1, shuffled.len() - 1);
    let val_ids: HashSet<String> = shuffled[..n_val].iter().map(|s| s.to_string()).collect();

    let mut train_set = Vec::new();
    let mut val_set = Vec::new();
    for w in pool {
        if val_ids.contains(&w.participant_id) {
            val_set.push(w);
        } else {
            train_set.push(w);
        }
    }
    Ok((train_set, val_set))
}

/// Classification validation sets are majority-downsampled; a
/// single-class one cannot be balanced and is used as-is.
fn balance_validation(
    val_set: Vec<WindowSample>,
    task: Task,
    seed: u64,
) -> Result<Vec<WindowSample>> {
    if !task.is_classification() {
        return Ok(val_set);
    }
    let targets = task_targets(&val_set, task)?;
    match downsample_majority(&targets, seed) {
        Ok(keep) => {
            let keep: HashSet<usize> = keep.into_iter().collect();
            Ok(val_set
                .into_iter()
                .enumerate()
                .filter(|(i, _)| keep.contains(i))
                .map(|(_, w)| w)
                .collect())
        }
        Err(Error::DegenerateLabels(_)) => {
            eprintln!("note: validation set holds a single class; using it unbalanced");
            Ok(val_set)
        }
        Err(e) => Err(e),
    }
}

fn print_summary(report: &CvReport) {
    println!("task: {}", report.task.name());
    println!("runs: {}", report.runs.len());
    let line = |name: &str, metric: &Option<MetricSummary>| match metric {
        Some(m) => println!(
            "{name}: {:.4} ({:.4}) over {} runs",
            m.mean, m.sd, m.n_runs
        ),
        None => println!("{name}: undefined"),
    };
    if report.task.is_classification() {
        line("balanced accuracy", &report.summary.balanced_accuracy);
        line("sensitivity", &report.summary.sensitivity);
        line("specificity", &report.summary.specificity);
        line("precision", &report.summary.precision);
        line("f1", &report.summary.f1);
        line("auc", &report.summary.auc);
    } else {
        line("rmse", &report.summary.rmse);
    }
}
