use std::path::PathBuf;

use thiserror::Error;

/// Error type shared across the pipeline.
///
/// The CLI maps these onto its exit-code contract: data/usage problems
/// (validation, unsupported rates, missing inputs) are usage failures,
/// everything else is a runtime failure.
#[derive(Error, Debug)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid state: {0}")]
    State(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("empty batch")]
    EmptyBatch,

    #[error("degenerate labels: {0}")]
    DegenerateLabels(String),

    #[error("unsupported sample rate {rate_hz} Hz: inputs below 30 Hz would require upsampling")]
    UnsupportedRate { rate_hz: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("split integrity violated: {0}")]
    Integrity(String),

    #[error("bad file format: {0}")]
    Format(String),

    #[error("missing input file: {0}")]
    MissingFile(PathBuf),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by bad user input rather than runtime failure.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Validation(_)
                | Error::Dimension(_)
                | Error::EmptyBatch
                | Error::DegenerateLabels(_)
                | Error::UnsupportedRate { .. }
                | Error::InsufficientData(_)
                | Error::MissingFile(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
