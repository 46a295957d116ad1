//! Sample-rate conversion down to the 30 Hz model rate.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::types::TARGET_RATE_HZ;
use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Resampling algorithm. The choice is recorded in run manifests so a
/// dataset can be rebuilt bit for bit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResampleMethod {
    /// FFT-domain truncation: drop bins above the target Nyquist, inverse
    /// transform at the new length. Band content below 15 Hz is preserved
    /// exactly up to rounding.
    #[default]
    Fourier,
    /// Windowed-sinc low-pass at the target Nyquist, then fractional
    /// decimation with linear interpolation.
    LowpassDecimate,
}

impl ResampleMethod {
    /// Stable identifier used in manifests and CLI flags.
    pub fn name(self) -> &'static str {
        match self {
            ResampleMethod::Fourier => "fourier",
            ResampleMethod::LowpassDecimate => "lowpass_decimate",
        }
    }
}

/// Resample an `[n, 3]` signal from `rate_hz` down to 30 Hz with the
/// default Fourier method.
///
/// Output length is `round(n * 30 / rate_hz)`. A 30 Hz input is returned
/// unchanged. Rates below 30 Hz would require upsampling and are
/// rejected.
pub fn resample_to_30hz(samples: &Tensor, rate_hz: f64) -> Result<Tensor> {
    resample_to_30hz_with(samples, rate_hz, ResampleMethod::default())
}

pub fn resample_to_30hz_with(
    samples: &Tensor,
    rate_hz: f64,
    method: ResampleMethod,
) -> Result<Tensor> {
    samples.expect_rank(2, "resample input")?;
    if !rate_hz.is_finite() || rate_hz < TARGET_RATE_HZ {
        return Err(Error::UnsupportedRate { rate_hz });
    }
    let n = samples.shape()[0];
    let axes = samples.shape()[1];
    let m = (n as f64 * TARGET_RATE_HZ / rate_hz).round() as usize;
    if m == n {
        return Ok(samples.clone());
    }
    if m == 0 {
        return Err(Error::InsufficientData(format!(
            "{n} samples at {rate_hz} Hz resample to zero output samples"
        )));
    }

    let mut planner = FftPlanner::new();
    let mut out = vec![0.0; m * axes];
    let mut column = vec![0.0; n];
    for axis in 0..axes {
        for (i, v) in column.iter_mut().enumerate() {
            *v = samples.data()[i * axes + axis];
        }
        let resampled = match method {
            ResampleMethod::Fourier => fourier_axis(&column, m, &mut planner),
            ResampleMethod::LowpassDecimate => lowpass_decimate_axis(&column, rate_hz, m),
        };
        for (j, v) in resampled.iter().enumerate() {
            out[j * axes + axis] = *v;
        }
    }
    Tensor::from_vec(&[m, axes], out)
}

/// FFT resampling of one axis to `m < n` points.
///
/// Keeps the `m`-point spectrum's worth of low-frequency bins (positive
/// and negative), folding the component just above the new Nyquist onto
/// the Nyquist bin when `m` is even, then inverse transforms. The 1/n
/// factor combines the unnormalized inverse FFT (1/m) with the length
/// rescaling (m/n).
fn fourier_axis(x: &[f64], m: usize, planner: &mut FftPlanner<f64>) -> Vec<f64> {
    let n = x.len();
    debug_assert!(m < n);
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(m);

    let mut spectrum: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft.process(&mut spectrum);

    let mut kept = vec![Complex::new(0.0, 0.0); m];
    let nyq = m / 2 + 1;
    kept[..nyq].copy_from_slice(&spectrum[..nyq]);
    if m > 2 {
        let neg = m - nyq;
        kept[nyq..].copy_from_slice(&spectrum[n - neg..]);
    }
    if m.is_multiple_of(2) {
        // The original +m/2 and -m/2 components alias onto one bin.
        kept[m / 2] += spectrum[n - m / 2];
    }

    ifft.process(&mut kept);
    let scale = 1.0 / n as f64;
    kept.iter().map(|c| c.re * scale).collect()
}

/// Low-pass then decimate: Hamming-windowed sinc at 15 Hz cutoff with a
/// 0.4 s half-width, mirror-padded convolution, then linear interpolation
/// at the 30 Hz output grid.
fn lowpass_decimate_axis(x: &[f64], rate_hz: f64, m: usize) -> Vec<f64> {
    let n = x.len();
    let cutoff = 0.5 * TARGET_RATE_HZ / rate_hz; // cycles per input sample
    let half = (0.4 * rate_hz).round().max(1.0) as usize;

    let mut taps = vec![0.0; 2 * half + 1];
    for (i, tap) in taps.iter_mut().enumerate() {
        let k = i as f64 - half as f64;
        let sinc = if k == 0.0 {
            2.0 * cutoff
        } else {
            (2.0 * std::f64::consts::PI * cutoff * k).sin() / (std::f64::consts::PI * k)
        };
        let window = 0.54 - 0.46 * (std::f64::consts::PI * i as f64 / half as f64).cos();
        *tap = sinc * window;
    }
    let gain: f64 = taps.iter().sum();
    for tap in &mut taps {
        *tap /= gain; // unity DC gain
    }

    let filtered: Vec<f64> = (0..n)
        .map(|i| {
            taps.iter()
                .enumerate()
                .map(|(j, &t)| t * x[reflect(i as isize + j as isize - half as isize, n)])
                .sum()
        })
        .collect();

    let step = rate_hz / TARGET_RATE_HZ;
    (0..m)
        .map(|j| {
            let pos = j as f64 * step;
            let lo = (pos.floor() as usize).min(n - 1);
            let hi = (lo + 1).min(n - 1);
            let frac = pos - lo as f64;
            filtered[lo] * (1.0 - frac) + filtered[hi] * frac
        })
        .collect()
}

/// Mirror an out-of-range index back into `[0, n)` (whole-sample
/// reflection about the endpoints).
fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    if n == 1 {
        return 0;
    }
    let period = 2 * (n - 1);
    let mut k = i.rem_euclid(period);
    if k >= n {
        k = period - k;
    }
    k as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::AXES;

    fn tone(n: usize, rate: f64, freq: f64) -> Tensor {
        let data: Vec<f64> = (0..n)
            .flat_map(|i| {
                let t = i as f64 / rate;
                let v = (2.0 * std::f64::consts::PI * freq * t).sin();
                [v, 0.5 * v, -v]
            })
            .collect();
        Tensor::from_vec(&[n, AXES], data).unwrap()
    }

    #[test]
    fn identity_at_30hz() {
        let x = tone(900, 30.0, 2.0);
        let y = resample_to_30hz(&x, 30.0).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn fifteen_seconds_at_100hz_gives_450_rows() {
        let x = tone(1500, 100.0, 2.0);
        let y = resample_to_30hz(&x, 100.0).unwrap();
        assert_eq!(y.shape(), &[450, AXES]);
    }

    #[test]
    fn eighty_hz_input_maps_to_three_eighths_length() {
        let x = tone(1200, 80.0, 2.0);
        let y = resample_to_30hz(&x, 80.0).unwrap();
        assert_eq!(y.shape(), &[450, AXES]);
    }

    #[test]
    fn rejects_rates_below_target() {
        let x = tone(100, 25.0, 2.0);
        assert!(matches!(
            resample_to_30hz(&x, 25.0),
            Err(Error::UnsupportedRate { .. })
        ));
    }

    #[test]
    fn rejects_degenerate_output_length() {
        let x = tone(1, 100.0, 2.0);
        assert!(matches!(
            resample_to_30hz(&x, 100.0),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn reflect_mirrors_without_repeating_edges() {
        assert_eq!(reflect(-1, 5), 1);
        assert_eq!(reflect(-2, 5), 2);
        assert_eq!(reflect(5, 5), 3);
        assert_eq!(reflect(6, 5), 2);
        assert_eq!(reflect(0, 1), 0);
        assert_eq!(reflect(-7, 1), 0);
    }

    #[test]
    fn method_names_are_stable() {
        assert_eq!(ResampleMethod::Fourier.name(), "fourier");
        assert_eq!(ResampleMethod::LowpassDecimate.name(), "lowpass_decimate");
        assert_eq!(ResampleMethod::default(), ResampleMethod::Fourier);
    }
}
