//! Single-channel signal cleaning and beat-to-RR conversion.
//!
//! The intended processing order is
//! [`standardize`] → [`butterworth_lowpass`] → [`hampel_residual`] →
//! [`detect_r_peaks`] → [`rr_from_peaks`]; [`preprocess`] chains the
//! first three with the default parameters.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Scale applied to the median absolute deviation so that it estimates the
/// standard deviation of Gaussian data.
pub const MAD_SCALE: f64 = 1.4826;

/// Default Hampel threshold in scaled MADs.
pub const DEFAULT_HAMPEL_SIGMAS: f64 = 3.0;

/// Default Butterworth order.
pub const DEFAULT_BUTTERWORTH_ORDER: usize = 4;

/// Default Butterworth cutoff in Hz (tuned for 100 Hz recordings).
pub const DEFAULT_CUTOFF_HZ: f64 = 25.0;

/// Minimum spacing between two detected beats, in seconds.
pub const REFRACTORY_S: f64 = 0.3;

/// A sampled single-channel signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    fs: f64,
}

impl Signal {
    pub fn new(samples: Vec<f64>, fs: f64) -> Result<Self> {
        if !(fs.is_finite() && fs > 0.0) {
            return Err(Error::Parameter(format!("sampling rate must be > 0, got {fs}")));
        }
        if samples.is_empty() {
            return Err(Error::InsufficientData("signal has no samples".into()));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("sample {i} is not finite")));
        }
        Ok(Self { samples, fs })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    fn with_samples(&self, samples: Vec<f64>) -> Self {
        Self { samples, fs: self.fs }
    }
}

/// Inter-beat intervals in milliseconds.
#[derive(Debug, Clone, PartialEq)]
pub struct RrSeries {
    intervals: Vec<f64>,
}

impl RrSeries {
    pub fn new(intervals: Vec<f64>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InsufficientData("RR series is empty".into()));
        }
        if let Some(i) = intervals.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidInput(format!(
                "RR interval {i} must be positive and finite, got {}",
                intervals[i]
            )));
        }
        Ok(Self { intervals })
    }

    pub fn intervals(&self) -> &[f64] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Total duration in milliseconds.
    pub fn duration_ms(&self) -> f64 {
        self.intervals.iter().sum()
    }
}

/// Rescales to zero mean and unit population standard deviation.
///
/// A signal whose standard deviation is below `1e-12` maps to all zeros.
pub fn standardize(signal: &Signal) -> Signal {
    let x = signal.samples();
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    if std < 1e-12 {
        return signal.with_samples(vec![0.0; x.len()]);
    }
    signal.with_samples(x.iter().map(|v| (v - mean) / std).collect())
}

pub(crate) fn median_in_place(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// What [`hampel_filter`] removes: `x - hampel(x)`.
///
/// QRS complexes are sparse within a one-second window, so the plain filter
/// would flatten them; the residual instead keeps them and zeroes the rest,
/// which suppresses baseline and low-amplitude noise ahead of peak detection.
pub fn hampel_residual(signal: &Signal, half_window: usize, n_sigmas: f64) -> Result<Signal> {
    let filtered = hampel_filter(signal, half_window, n_sigmas)?;
    let residual = signal.samples().iter().zip(filtered.samples()).map(|(x, f)| x - f).collect();
    Ok(signal.with_samples(residual))
}

/// Default Hampel half window: half the sampling rate, at least one sample.
pub fn default_half_window(fs: f64) -> usize {
    ((fs / 2.0).round() as usize).max(1)
}

/// Replaces outliers by their windowed median.
///
/// A sample is an outlier when it deviates from the median of
/// `[i - half_window, i + half_window]` (truncated at the edges) by more than
/// `n_sigmas * 1.4826 * MAD` of that window.
pub fn hampel_filter(signal: &Signal, half_window: usize, n_sigmas: f64) -> Result<Signal> {
    if half_window == 0 {
        return Err(Error::Parameter("Hampel half window must be >= 1".into()));
    }
    if !(n_sigmas > 0.0) {
        return Err(Error::Parameter(format!("n_sigmas must be > 0, got {n_sigmas}")));
    }
    let x = signal.samples();
    let n = x.len();
    let mut out = x.to_vec();
    let mut window = Vec::with_capacity(2 * half_window + 1);
    let mut deviations = Vec::with_capacity(2 * half_window + 1);
    for i in 0..n {
        let lo = i.saturating_sub(half_window);
        let hi = (i + half_window).min(n - 1);
        window.clear();
        window.extend_from_slice(&x[lo..=hi]);
        let med = median_in_place(&mut window);
        deviations.clear();
        deviations.extend(x[lo..=hi].iter().map(|v| (v - med).abs()));
        let mad = median_in_place(&mut deviations);
        if (x[i] - med).abs() > n_sigmas * MAD_SCALE * mad {
            out[i] = med;
        }
    }
    Ok(signal.with_samples(out))
}

/// One biquad in transposed direct form II, `a0` normalized to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl Biquad {
    fn response(&self, omega: f64) -> f64 {
        // |H(e^{jw})|
        let (c1, s1) = (omega.cos(), omega.sin());
        let (c2, s2) = ((2.0 * omega).cos(), (2.0 * omega).sin());
        let nr = self.b[0] + self.b[1] * c1 + self.b[2] * c2;
        let ni = -(self.b[1] * s1 + self.b[2] * s2);
        let dr = 1.0 + self.a[0] * c1 + self.a[1] * c2;
        let di = -(self.a[0] * s1 + self.a[1] * s2);
        ((nr * nr + ni * ni) / (dr * dr + di * di)).sqrt()
    }
}

/// Digital Butterworth low-pass built from second-order sections.
#[derive(Debug, Clone, PartialEq)]
pub struct ButterworthLowpass {
    sections: Vec<Biquad>,
    fs: f64,
}

impl ButterworthLowpass {
    /// Designs the filter with the bilinear transform and frequency prewarping.
    pub fn design(cutoff_hz: f64, fs: f64, order: usize) -> Result<Self> {
        if !matches!(order, 2 | 4 | 6) {
            return Err(Error::Parameter(format!("Butterworth order must be 2, 4 or 6, got {order}")));
        }
        if !(cutoff_hz > 0.0 && cutoff_hz < fs / 2.0) {
            return Err(Error::Parameter(format!(
                "cutoff {cutoff_hz} Hz must lie strictly between 0 and Nyquist ({} Hz)",
                fs / 2.0
            )));
        }
        let c = 1.0 / (PI * cutoff_hz / fs).tan();
        let sections = (1..=order / 2)
            .map(|k| {
                let zeta = (PI * (2 * k - 1) as f64 / (2 * order) as f64).sin();
                let a0 = c * c + 2.0 * zeta * c + 1.0;
                Biquad {
                    b: [1.0 / a0, 2.0 / a0, 1.0 / a0],
                    a: [(2.0 - 2.0 * c * c) / a0, (c * c - 2.0 * zeta * c + 1.0) / a0],
                }
            })
            .collect();
        Ok(Self { sections, fs })
    }

    pub fn sections(&self) -> &[Biquad] {
        &self.sections
    }

    /// Magnitude of the frequency response at `freq_hz`.
    pub fn magnitude(&self, freq_hz: f64) -> f64 {
        let omega = 2.0 * PI * freq_hz / self.fs;
        self.sections.iter().map(|s| s.response(omega)).product()
    }

    /// Filters `x` from a zero initial state.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        for s in &self.sections {
            let (mut z1, mut z2) = (0.0, 0.0);
            for v in y.iter_mut() {
                let input = *v;
                let out = s.b[0] * input + z1;
                z1 = s.b[1] * input - s.a[0] * out + z2;
                z2 = s.b[2] * input - s.a[1] * out;
                *v = out;
            }
        }
        y
    }
}

/// Low-pass filters the signal with a Butterworth design of the given order.
pub fn butterworth_lowpass(signal: &Signal, cutoff_hz: f64, order: usize) -> Result<Signal> {
    let filter = ButterworthLowpass::design(cutoff_hz, signal.fs(), order)?;
    Ok(signal.with_samples(filter.apply(signal.samples())))
}

/// Standardize, low-pass and isolate the spikes with the default parameters.
///
/// The cutoff is capped below Nyquist for low sampling rates.
pub fn preprocess(signal: &Signal) -> Result<Signal> {
    preprocess_with(signal, DEFAULT_CUTOFF_HZ, DEFAULT_BUTTERWORTH_ORDER, DEFAULT_HAMPEL_SIGMAS)
}

/// [`preprocess`] with explicit filter settings; the Hampel window stays at
/// its default for the signal's rate.
pub fn preprocess_with(signal: &Signal, cutoff_hz: f64, order: usize, n_sigmas: f64) -> Result<Signal> {
    let cutoff = cutoff_hz.min(0.45 * signal.fs());
    let s = standardize(signal);
    let s = butterworth_lowpass(&s, cutoff, order)?;
    hampel_residual(&s, default_half_window(signal.fs()), n_sigmas)
}

/// Fraction of the rolling amplitude above the rolling mean a peak must reach.
const THRESHOLD_FRACTION: f64 = 0.4;

/// Finds R peaks as thresholded local maxima at least 0.3 s apart.
///
/// The threshold at each sample is the mean over a centred two-second window
/// plus 40% of the distance from that mean to the window maximum. When two
/// candidates fall inside the refractory period the taller one wins.
pub fn detect_r_peaks(signal: &Signal) -> Vec<usize> {
    let x = signal.samples();
    let n = x.len();
    if n < 3 {
        return Vec::new();
    }
    let half = (signal.fs().round() as usize).max(1);
    let refractory = (REFRACTORY_S * signal.fs()).ceil() as usize;

    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for v in x {
        prefix.push(prefix.last().unwrap() + v);
    }

    let mut peaks: Vec<usize> = Vec::new();
    for i in 1..n - 1 {
        if !(x[i] >= x[i - 1] && x[i] > x[i + 1]) {
            continue;
        }
        let lo = i.saturating_sub(half);
        let hi = (i + half).min(n - 1);
        let mean = (prefix[hi + 1] - prefix[lo]) / (hi + 1 - lo) as f64;
        let max = x[lo..=hi].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max - mean <= 1e-12 {
            continue;
        }
        if x[i] <= mean + THRESHOLD_FRACTION * (max - mean) {
            continue;
        }
        match peaks.last().copied() {
            Some(prev) if i - prev < refractory => {
                // the beat before `prev` is already >= refractory away from `i`
                if x[i] > x[prev] {
                    *peaks.last_mut().unwrap() = i;
                }
            }
            _ => peaks.push(i),
        }
    }
    peaks
}

/// Converts beat positions into RR intervals in milliseconds.
pub fn rr_from_peaks(peaks: &[usize], fs: f64) -> Result<RrSeries> {
    if !(fs.is_finite() && fs > 0.0) {
        return Err(Error::Parameter(format!("sampling rate must be > 0, got {fs}")));
    }
    if peaks.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 beats, found {}",
            peaks.len()
        )));
    }
    if let Some(w) = peaks.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(format!(
            "peak indices must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    RrSeries::new(
        peaks
            .windows(2)
            .map(|w| (w[1] - w[0]) as f64 / fs * 1000.0)
            .collect(),
    )
}
