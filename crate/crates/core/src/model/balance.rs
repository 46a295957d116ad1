//! Class-imbalance handling: inverse-frequency loss weights for training
//! and seeded majority downsampling for validation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// RNG stream id so downsampling draws never collide with weight
/// initialization or shuffling done under the same seed.
const DOWNSAMPLE_STREAM: u64 = 2;

/// Inverse-frequency class weights `(w0, w1)` with mean weight 1:
/// `w_c = N / (2 * N_c)`.
pub fn class_weights(labels: &[f64]) -> Result<(f64, f64)> {
    let mut n0 = 0usize;
    let mut n1 = 0usize;
    for &label in labels {
        if label == 0.0 {
            n0 += 1;
        } else if label == 1.0 {
            n1 += 1;
        } else {
            return Err(Error::Validation(format!(
                "labels must be 0 or 1, got {label}"
            )));
        }
    }
    if n0 == 0 || n1 == 0 {
        return Err(Error::DegenerateLabels(format!(
            "class weights need both classes, got {n0} zeros and {n1} ones"
        )));
    }
    let n = (n0 + n1) as f64;
    Ok((n / (2.0 * n0 as f64), n / (2.0 * n1 as f64)))
}

/// Indices retained after downsampling the majority class to the
/// minority count, preserving input order.
///
/// Every minority sample survives; the majority subset is a seeded
/// uniform draw without replacement. Already balanced input comes back
/// whole.
pub fn downsample_majority(labels: &[f64], seed: u64) -> Result<Vec<usize>> {
    let mut zeros = Vec::new();
    let mut ones = Vec::new();
    for (i, &label) in labels.iter().enumerate() {
        if label == 0.0 {
            zeros.push(i);
        } else if label == 1.0 {
            ones.push(i);
        } else {
            return Err(Error::Validation(format!(
                "labels must be 0 or 1, got {label}"
            )));
        }
    }
    if zeros.is_empty() || ones.is_empty() {
        return Err(Error::DegenerateLabels(
            "downsampling needs both classes present".into(),
        ));
    }
    if zeros.len() == ones.len() {
        return Ok((0..labels.len()).collect());
    }

    let (minority, majority) = if zeros.len() < ones.len() {
        (zeros, ones)
    } else {
        (ones, zeros)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(DOWNSAMPLE_STREAM);
    let mut kept: Vec<usize> = majority
        .choose_multiple(&mut rng, minority.len())
        .copied()
        .collect();
    kept.extend_from_slice(&minority);
    kept.sort_unstable();
    Ok(kept)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_split_gets_unit_weights() {
        let labels: Vec<f64> = [vec![0.0; 500], vec![1.0; 500]].concat();
        assert_eq!(class_weights(&labels).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn three_to_one_split_weights() {
        let labels: Vec<f64> = [vec![0.0; 750], vec![1.0; 250]].concat();
        let (w0, w1) = class_weights(&labels).unwrap();
        assert!((w0 - 0.667).abs() < 5e-4);
        assert_eq!(w1, 2.0);
    }

    #[test]
    fn weighted_counts_sum_to_n() {
        for (n0, n1) in [(1, 9), (400, 100), (33, 67), (5, 5)] {
            let labels: Vec<f64> = [vec![0.0; n0], vec![1.0; n1]].concat();
            let (w0, w1) = class_weights(&labels).unwrap();
            let total = n0 as f64 * w0 + n1 as f64 * w1;
            assert!((total - (n0 + n1) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn single_class_is_degenerate() {
        assert!(matches!(
            class_weights(&[1.0, 1.0]),
            Err(Error::DegenerateLabels(_))
        ));
        assert!(matches!(
            downsample_majority(&[0.0, 0.0], 1),
            Err(Error::DegenerateLabels(_))
        ));
    }

    #[test]
    fn downsample_equalizes_and_keeps_minority() {
        let labels: Vec<f64> = [vec![0.0; 100], vec![1.0; 40]].concat();
        let kept = downsample_majority(&labels, 9).unwrap();
        let zeros = kept.iter().filter(|&&i| labels[i] == 0.0).count();
        let ones = kept.iter().filter(|&&i| labels[i] == 1.0).count();
        assert_eq!((zeros, ones), (40, 40));
        // All minority indices (100..140) survive.
        for i in 100..140 {
            assert!(kept.contains(&i));
        }
        // Order preserved.
        assert!(kept.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn balanced_input_passes_through_in_order() {
        let labels = [0.0, 1.0, 1.0, 0.0];
        assert_eq!(downsample_majority(&labels, 3).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn fixed_seed_fixed_subset() {
        let labels: Vec<f64> = [vec![0.0; 80], vec![1.0; 20]].concat();
        let a = downsample_majority(&labels, 42).unwrap();
        let b = downsample_majority(&labels, 42).unwrap();
        assert_eq!(a, b);
        let c = downsample_majority(&labels, 43).unwrap();
        assert_ne!(a, c, "different seeds should pick different subsets");
    }
}
