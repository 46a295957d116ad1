//! Audit trail: a JSON manifest written atomically next to every
//! command's outputs, recording exactly what produced them.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use har_core::io::atomic_write;
use har_core::Result;

#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    /// Effective config after flag overrides.
    pub config: serde_json::Value,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epochs: Option<usize>,
    pub wall_time_s: f64,
}

pub struct ManifestBuilder {
    manifest: RunManifest,
    started: Instant,
}

impl ManifestBuilder {
    pub fn new(command: &str, config: serde_json::Value, seed: u64) -> Self {
        ManifestBuilder {
            manifest: RunManifest {
                command: command.to_string(),
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                config,
                inputs: Vec::new(),
                outputs: Vec::new(),
                seed,
                workers: None,
                epochs: None,
                wall_time_s: 0.0,
            },
            started: Instant::now(),
        }
    }

    pub fn input(mut self, path: &Path) -> Self {
        self.manifest.inputs.push(path.display().to_string());
        self
    }

    pub fn output(mut self, path: &Path) -> Self {
        self.manifest.outputs.push(path.display().to_string());
        self
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.manifest.workers = Some(workers);
        self
    }

    pub fn epochs(mut self, epochs: usize) -> Self {
        self.manifest.epochs = Some(epochs);
        self
    }

    /// Stamp the wall time and write `<dir>/run_manifest.json` or, for
    /// file outputs, `<file stem>.manifest.json` beside the file.
    pub fn write_beside(mut self, target: &Path) -> Result<PathBuf> {
        let path = if target.is_dir() {
            target.join("run_manifest.json")
        } else {
            let stem = target
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "run".to_string());
            target.with_file_name(format!("{stem}.manifest.json"))
        };
        self.manifest.wall_time_s = self.started.elapsed().as_secs_f64();
        let mut json = serde_json::to_vec_pretty(&self.manifest)?;
        json.push(b'\n');
        atomic_write(&path, &json)?;
        Ok(path)
    }
}
