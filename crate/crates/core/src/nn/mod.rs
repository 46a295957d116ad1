//! Neural network building blocks: layers with explicit forward and
//! backward passes, loss functions, and the Adam optimizer. Everything is
//! plain `f64` on the CPU and fully deterministic given a seed.

pub mod activation;
pub mod adam;
pub mod conv;
pub mod dense;
pub mod gradcheck;
pub mod loss;
pub mod lstm;
pub mod network;
pub mod spec;

pub use activation::Activation;
pub use adam::{AdamConfig, AdamState};
pub use conv::Conv1d;
pub use dense::Dense;
pub use gradcheck::{check_network_gradients, GradCheckReport, GradCheckSettings, LossKind};
pub use loss::{mse, weighted_bce, BCE_CLAMP};
pub use lstm::Lstm;
pub use network::{Layer, LayerCache, LayerGrads, Network, NetworkGrads};
pub use spec::LayerSpec;
