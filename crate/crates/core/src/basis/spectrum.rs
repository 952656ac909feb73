//! Frequency-range selection from a spectral analysis of the forcing term.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Result, RfmError};

/// Relative amplitude below which spectral content is ignored.
pub const DEFAULT_SPECTRAL_THRESHOLD: f64 = 1e-8;

/// Feature range used when the forcing carries no spectral information.
pub const DEFAULT_FEATURE_RANGE: f64 = 1.0;

/// Highest significant angular frequency of uniformly spaced samples.
///
/// The samples are tapered with a Kaiser window whose side lobes sit below
/// `threshold`, zero padded, and transformed. The result is the location of
/// the highest-frequency spectral peak whose amplitude exceeds `threshold`
/// times the largest peak, refined by Gaussian interpolation. Returns `None`
/// for an identically zero signal.
pub fn dominant_max_frequency(samples: &[f64], spacing: f64, threshold: f64) -> Result<Option<f64>> {
    if samples.len() < 16 {
        return Err(RfmError::DegenerateSampling(format!(
            "spectral analysis needs at least 16 samples, got {}",
            samples.len()
        )));
    }
    if !(spacing > 0.0) || !(threshold > 0.0 && threshold < 1.0) {
        return Err(RfmError::InvalidBasis(format!(
            "spacing {spacing} / threshold {threshold}"
        )));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(RfmError::NonFinite);
    }
    if samples.iter().all(|&v| v == 0.0) {
        return Ok(None);
    }
    let n = samples.len();
    // peak side-lobe level 20 dB below the threshold
    let sidelobe_db = -20.0 * threshold.log10() + 20.0;
    let beta = 0.12438 * (sidelobe_db + 6.3);
    let padded = (16 * n).next_power_of_two();
    let i0_beta = bessel_i0(beta);
    let mut buf: Vec<Complex64> = (0..padded)
        .map(|i| {
            if i < n {
                let t = 2.0 * i as f64 / (n - 1) as f64 - 1.0;
                let w = bessel_i0(beta * (1.0 - t * t).max(0.0).sqrt()) / i0_beta;
                Complex64::new(w * samples[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    FftPlanner::new().plan_fft_forward(padded).process(&mut buf);
    let amp: Vec<f64> = buf[..=padded / 2].iter().map(|c| c.norm()).collect();
    let peak = amp.iter().cloned().fold(0.0, f64::max);
    let cutoff = threshold * peak;
    let last = amp.len() - 1;
    let top = (1..last)
        .rev()
        .find(|&k| amp[k] > cutoff && amp[k] >= amp[k - 1] && amp[k] > amp[k + 1]);
    let bin = match top {
        Some(k) => {
            let (l, c, r) = (amp[k - 1].ln(), amp[k].ln(), amp[k + 1].ln());
            let denom = l - 2.0 * c + r;
            let shift = if denom.abs() > 0.0 { 0.5 * (l - r) / denom } else { 0.0 };
            k as f64 + shift.clamp(-0.5, 0.5)
        }
        None => 0.0,
    };
    Ok(Some(2.0 * std::f64::consts::PI * bin / (padded as f64 * spacing)))
}

/// Recommended lower bound for the feature range of a patch with radius
/// `radius`: the highest forcing frequency mapped to normalized patch
/// coordinates. Falls back to [`DEFAULT_FEATURE_RANGE`] for zero forcing
/// or a forcing without oscillatory content.
pub fn select_feature_range(samples: &[f64], spacing: f64, radius: f64, threshold: f64) -> Result<f64> {
    match dominant_max_frequency(samples, spacing, threshold)? {
        Some(w) if w > 0.0 => Ok(w * radius),
        _ => Ok(DEFAULT_FEATURE_RANGE),
    }
}

/// Modified Bessel function of the first kind, order zero (power series).
fn bessel_i0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..500 {
        term *= q / (k * k) as f64;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}
