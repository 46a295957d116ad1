//! Finite-difference verification of backpropagation. Probes randomly
//! chosen parameter coordinates of a network, compares central differences
//! of the loss against the analytic gradient, and guards against
//! coordinates whose FD estimate straddles a ReLU kink, where central
//! differences are meaningless.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

use super::loss::{mse, weighted_bce};
use super::network::Network;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LossKind {
    WeightedBce,
    Mse,
}

fn loss_value(kind: LossKind, pred: f64, target: f64) -> Result<f64> {
    let (value, _) = match kind {
        LossKind::WeightedBce => weighted_bce(&[pred], &[target], None)?,
        LossKind::Mse => mse(&[pred], &[target])?,
    };
    Ok(value)
}

fn loss_grad(kind: LossKind, pred: f64, target: f64) -> Result<f64> {
    let (_, grad) = match kind {
        LossKind::WeightedBce => weighted_bce(&[pred], &[target], None)?,
        LossKind::Mse => mse(&[pred], &[target])?,
    };
    Ok(grad[0])
}

#[derive(Clone, Copy, Debug)]
pub struct GradCheckSettings {
    /// Central-difference step.
    pub step: f64,
    /// Maximum accepted relative error between FD and analytic gradients.
    pub rel_tol: f64,
    /// Number of parameter coordinates to verify.
    pub coords: usize,
    /// Seed for coordinate selection.
    pub seed: u64,
}

impl Default for GradCheckSettings {
    fn default() -> Self {
        GradCheckSettings {
            step: 1e-4,
            rel_tol: 1e-4,
            coords: 50,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GradCheckReport {
    pub checked: usize,
    /// Coordinates discarded because halving the step moved the FD estimate
    /// too much, the signature of a ReLU kink inside the probe interval.
    pub skipped_kinks: usize,
    pub max_rel_err: f64,
    pub worst_coord: usize,
}

/// Verifies analytic gradients of `loss(network(input), target)` against
/// central finite differences at randomly chosen parameter coordinates.
/// The network must produce a single output value.
pub fn check_network_gradients(
    network: &Network,
    input: &Tensor,
    target: f64,
    loss: LossKind,
    settings: &GradCheckSettings,
) -> Result<GradCheckReport> {
    if settings.coords == 0 {
        return Err(Error::Validation("gradient check over zero coordinates".into()));
    }

    // One backward pass yields every analytic partial at once.
    let (pred, caches) = network.forward_cached(input)?;
    let p = pred.scalar()?;
    let upstream = Tensor::vector(vec![loss_grad(loss, p, target)?])?;
    let grads = network.backward(&upstream, &caches)?;
    let analytic: Vec<f64> = grads.slices().iter().flat_map(|s| s.iter().copied()).collect();

    let mut net = network.clone();
    let total = net.parameter_count();
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);

    let mut report = GradCheckReport {
        checked: 0,
        skipped_kinks: 0,
        max_rel_err: 0.0,
        worst_coord: 0,
    };
    let mut attempts = 0usize;
    let max_attempts = settings.coords.saturating_mul(50);

    while report.checked < settings.coords {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::Numeric(format!(
                "gradient check could not find {} kink-free coordinates in {} attempts",
                settings.coords, max_attempts
            )));
        }
        let coord = rng.gen_range(0..total);

        let fd_full = central_difference(&mut net, input, target, loss, coord, settings.step)?;
        let fd_half = central_difference(&mut net, input, target, loss, coord, settings.step / 2.0)?;

        // For a smooth loss both estimates agree to O(step^2); a large gap
        // means the probe interval crosses a kink, so the coordinate is
        // uninformative and another is drawn instead.
        let gap = (fd_full - fd_half).abs();
        if gap > 0.25 * fd_full.abs().max(fd_half.abs()) + 1e-10 {
            report.skipped_kinks += 1;
            continue;
        }

        let g = analytic[coord];
        // Absolute comparison takes over when both gradients are tiny.
        let denom = g.abs().max(fd_half.abs()).max(1e-5);
        let rel = (g - fd_half).abs() / denom;
        if rel > report.max_rel_err {
            report.max_rel_err = rel;
            report.worst_coord = coord;
        }
        report.checked += 1;
    }
    Ok(report)
}

fn central_difference(
    net: &mut Network,
    input: &Tensor,
    target: f64,
    loss: LossKind,
    coord: usize,
    step: f64,
) -> Result<f64> {
    let plus = loss_at(net, input, target, loss, coord, step)?;
    let minus = loss_at(net, input, target, loss, coord, -step)?;
    Ok((plus - minus) / (2.0 * step))
}

fn loss_at(
    net: &mut Network,
    input: &Tensor,
    target: f64,
    loss: LossKind,
    coord: usize,
    delta: f64,
) -> Result<f64> {
    write_coord(net, coord, delta, true);
    let result = net
        .forward(input)
        .and_then(|out| out.scalar())
        .and_then(|p| loss_value(loss, p, target));
    write_coord(net, coord, delta, false);
    result
}

/// Adds (or subtracts back) `delta` at the flat parameter index `coord`.
fn write_coord(net: &mut Network, coord: usize, delta: f64, apply: bool) {
    let mut remaining = coord;
    for slice in net.param_slices_mut() {
        if remaining < slice.len() {
            if apply {
                slice[remaining] += delta;
            } else {
                slice[remaining] -= delta;
            }
            return;
        }
        remaining -= slice.len();
    }
    panic!("coordinate {coord} out of range");
}
