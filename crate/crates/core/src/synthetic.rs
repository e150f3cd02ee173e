//! Synthetic data for examples and tests.

use std::f64::consts::PI;

use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{Error, Result};
use crate::mlp::Dataset;
use crate::rng::Rng;
use crate::signal::Signal;

/// RR intervals whose length follows a respiratory sinusoid.
///
/// Interval `i` is `mean_ms + amplitude_ms * sin(2π f t_i)` where `t_i` is
/// the time at which the interval starts. Intervals are generated until the
/// series spans `duration_s`.
pub fn respiratory_rr(mean_ms: f64, amplitude_ms: f64, resp_hz: f64, duration_s: f64) -> Vec<f64> {
    let mut rr = Vec::new();
    let mut t_ms = 0.0;
    while t_ms < duration_s * 1000.0 {
        let v = mean_ms + amplitude_ms * (2.0 * PI * resp_hz * t_ms / 1000.0).sin();
        rr.push(v);
        t_ms += v;
    }
    rr
}

/// A clean ECG-like trace with one beat per RR interval.
///
/// Each beat is a sum of Gaussian P, Q, R, S and T waves; the R wave peaks
/// exactly on the returned sample index. Gaussian noise with standard
/// deviation `noise_std` (relative to an R amplitude of 1) is added.
pub fn ecg_from_rr(rr_ms: &[f64], fs: f64, noise_std: f64, rng: &mut Rng) -> Result<(Signal, Vec<usize>)> {
    if rr_ms.is_empty() || rr_ms.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidInput("RR intervals must be positive".into()));
    }
    // (offset s, width s, amplitude) relative to the R peak
    const WAVES: [(f64, f64, f64); 5] =
        [(-0.2, 0.025, 0.1), (-0.03, 0.008, -0.12), (0.0, 0.01, 1.0), (0.03, 0.008, -0.2), (0.25, 0.05, 0.25)];
    let lead_s = 0.5;
    let total_s = lead_s + rr_ms.iter().sum::<f64>() / 1000.0 + 0.5;
    let n = (total_s * fs).ceil() as usize;
    let mut x = vec![0.0; n];
    let mut beats = Vec::with_capacity(rr_ms.len() + 1);
    let mut t = lead_s;
    for i in 0..=rr_ms.len() {
        let r_idx = (t * fs).round() as usize;
        beats.push(r_idx);
        let r_t = r_idx as f64 / fs;
        for &(offset, width, amp) in &WAVES {
            let centre = r_t + offset;
            let lo = (((centre - 5.0 * width) * fs).floor().max(0.0)) as usize;
            let hi = (((centre + 5.0 * width) * fs).ceil() as usize).min(n - 1);
            for (j, v) in x.iter_mut().enumerate().take(hi + 1).skip(lo) {
                let dt = j as f64 / fs - centre;
                *v += amp * (-0.5 * (dt / width).powi(2)).exp();
            }
        }
        if i < rr_ms.len() {
            t += rr_ms[i] / 1000.0;
        }
    }
    if noise_std > 0.0 {
        let noise = Normal::new(0.0, noise_std).map_err(|e| Error::Parameter(e.to_string()))?;
        x.iter_mut().for_each(|v| *v += noise.sample(rng));
    }
    Ok((Signal::new(x, fs)?, beats))
}

/// Two isotropic unit-variance Gaussian classes in `dim` dimensions whose
/// means are `separation` apart (class 1 shifted equally along every axis).
pub fn two_gaussians(per_class: usize, dim: usize, separation: f64, rng: &mut Rng) -> Result<Dataset> {
    let shift = separation / (dim as f64).sqrt();
    let mut rows = Vec::with_capacity(2 * per_class);
    let mut labels = Vec::with_capacity(2 * per_class);
    for class in 0..2u8 {
        for _ in 0..per_class {
            rows.push(
                (0..dim)
                    .map(|_| {
                        let z: f64 = StandardNormal.sample(rng);
                        z + f64::from(class) * shift
                    })
                    .collect(),
            );
            labels.push(class);
        }
    }
    Dataset::new(rows, labels)
}
