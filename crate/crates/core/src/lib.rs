//! Wrist-accelerometer activity recognition and energy expenditure
//! estimation: preprocessing of raw tri-axial signals, a small CNN-LSTM
//! trained from scratch, participant-batched nested cross-validation, and
//! the metrics used to report results.
//!
//! All randomness flows through explicitly seeded ChaCha8 generators, so
//! every pipeline stage is reproducible bit for bit from its seed.

pub mod error;
pub mod evaluate;
pub mod io;
pub mod kernels;
pub mod model;
pub mod nn;
pub mod preprocess;
pub mod synth;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::Tensor;
