//! Cross-validation outputs: `report.json`, one `roc_run_<k>.csv` per
//! classification run, and `roc_mean.csv`; plus the predictions CSV
//! (`window_id,score`) emitted by inference.

use std::fs;
use std::path::{Path, PathBuf};

use super::atomic_write;
use crate::error::{Error, Result};
use crate::evaluate::CvReport;

/// Write everything a CV run produces under `out_dir`; returns the
/// paths written, report first.
pub fn write_cv_outputs(out_dir: &Path, report: &CvReport) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();

    let report_path = out_dir.join("report.json");
    let mut json = serde_json::to_vec_pretty(report)?;
    json.push(b'\n');
    atomic_write(&report_path, &json)?;
    written.push(report_path);

    for run in &report.runs {
        if let Some(points) = &run.roc_points {
            let path = out_dir.join(format!("roc_run_{}.csv", run.run_id));
            write_roc_csv(&path, points)?;
            written.push(path);
        }
    }
    if let Some(points) = &report.summary.mean_roc {
        let path = out_dir.join("roc_mean.csv");
        write_roc_csv(&path, points)?;
        written.push(path);
    }
    Ok(written)
}

fn write_roc_csv(path: &Path, points: &[(f64, f64)]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(["fpr", "tpr"]).map_err(Error::Csv)?;
    for &(fpr, tpr) in points {
        w.serialize((fpr, tpr)).map_err(Error::Csv)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::State(format!("flushing {}: {e}", path.display())))?;
    atomic_write(path, &bytes)
}

/// `window_id,score` rows; ids are the zero-based positions in the
/// window archive the scores came from.
pub fn write_predictions_csv(path: &Path, scores: &[f64]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(["window_id", "score"]).map_err(Error::Csv)?;
    for (i, &score) in scores.iter().enumerate() {
        w.serialize((i, score)).map_err(Error::Csv)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::State(format!("flushing {}: {e}", path.display())))?;
    atomic_write(path, &bytes)
}
