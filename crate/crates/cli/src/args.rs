use std::path::PathBuf;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "har", version, about = "Wrist-accelerometer activity pipeline")]
pub struct Cli {
    /// Override the seed from the config file (default 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// JSON config file for the subcommand; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Concurrent runs for nested-cv (results do not depend on this).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a seeded synthetic dataset (CSV tree plus manifest).
    Synth {
        /// Directory to create the dataset in.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Resample raw bouts to 30 Hz and cut 15 s windows into an archive.
    Preprocess {
        /// Dataset manifest (as written by `synth`).
        #[arg(long)]
        manifest: PathBuf,
        /// Window archive to write.
        #[arg(long)]
        out: PathBuf,
        /// Resampling method.
        #[arg(long, value_parser = parse_method)]
        method: Option<har_core::preprocess::ResampleMethod>,
    },
    /// Train one model on a window archive.
    Train {
        /// Window archive from `preprocess`.
        #[arg(long)]
        archive: PathBuf,
        /// sedentary | locomotion | lifestyle | met-regression
        #[arg(long, value_parser = parse_task)]
        task: har_core::model::Task,
        /// Checkpoint file to write.
        #[arg(long)]
        out: PathBuf,
        /// Fraction of participants held out for validation.
        #[arg(long)]
        val_fraction: Option<f64>,
    },
    /// Participant-batched nested cross-validation.
    #[command(name = "nested-cv")]
    NestedCv {
        /// Window archive from `preprocess`.
        #[arg(long)]
        archive: PathBuf,
        /// sedentary | locomotion | lifestyle | met-regression
        #[arg(long, value_parser = parse_task)]
        task: har_core::model::Task,
        /// Directory for report.json and ROC CSVs.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Score windows with a trained checkpoint.
    Predict {
        /// Checkpoint from `train`.
        #[arg(long)]
        checkpoint: PathBuf,
        /// Window archive to score.
        #[arg(long)]
        archive: PathBuf,
        /// Predictions CSV to write (window_id,score).
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the summary table of an existing report.json.
    Report {
        /// report.json from `nested-cv`.
        #[arg(long)]
        report: PathBuf,
    },
}

fn parse_task(s: &str) -> Result<har_core::model::Task, String> {
    har_core::model::Task::parse_name(s).ok_or_else(|| {
        format!("unknown task {s:?} (expected sedentary, locomotion, lifestyle, or met-regression)")
    })
}

fn parse_method(s: &str) -> Result<har_core::preprocess::ResampleMethod, String> {
    match s {
        "fourier" => Ok(har_core::preprocess::ResampleMethod::Fourier),
        "lowpass_decimate" | "lowpass-decimate" => {
            Ok(har_core::preprocess::ResampleMethod::LowpassDecimate)
        }
        other => Err(format!(
            "unknown method {other:?} (expected fourier or lowpass_decimate)"
        )),
    }
}
