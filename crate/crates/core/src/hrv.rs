//! Heart-rate-variability features computed from an [`RrSeries`].
//!
//! The thirteen features, in their fixed order, are listed in
//! [`FEATURE_NAMES`]. Time-domain statistics use population (divisor `N`)
//! forms; successive-difference statistics average over the `N - 1`
//! differences, except pNN20/pNN50 which divide the exceedance count by `N`.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::signal::{median_in_place, RrSeries};

/// Column names of a feature row, in record order.
pub const FEATURE_NAMES: [&str; 13] = [
    "bpm",
    "ibi",
    "sdnn",
    "sdsd",
    "rmssd",
    "pnn20",
    "pnn50",
    "hr_mad",
    "sd1",
    "sd2",
    "s",
    "ratio",
    "breathing_rate",
];

/// Number of features per record.
pub const FEATURE_COUNT: usize = FEATURE_NAMES.len();

/// Minimum RR count for the successive-difference statistics.
pub const MIN_INTERVALS: usize = 3;

/// Minimum series duration for the breathing-rate estimate, in ms.
pub const MIN_BREATHING_DURATION_MS: f64 = 10_000.0;

/// Resampling rate of the RR tachogram, in Hz.
pub const TACHOGRAM_HZ: f64 = 4.0;

/// Respiratory search band, in Hz.
pub const BREATHING_BAND_HZ: (f64, f64) = (0.1, 0.4);

const BAND_STEP_HZ: f64 = 0.001;
const PEAK_HALF_WIDTH_HZ: f64 = 0.03;
const CONFIDENT_PEAK_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeDomain {
    pub bpm: f64,
    pub ibi: f64,
    pub sdnn: f64,
    pub sdsd: f64,
    pub rmssd: f64,
    pub pnn20: f64,
    pub pnn50: f64,
    pub hr_mad: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Poincare {
    pub sd1: f64,
    pub sd2: f64,
    /// Ellipse area `pi * sd1 * sd2`.
    pub s: f64,
    /// `sd1 / sd2`; `None` when `sd2` is zero.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreathingEstimate {
    /// Breaths per minute.
    pub rate: f64,
    /// Share of in-band power within 0.03 Hz of the peak.
    pub peak_power_fraction: f64,
    pub low_confidence: bool,
}

/// The thirteen-feature vector that feeds the classifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureRecord {
    pub bpm: f64,
    pub ibi: f64,
    pub sdnn: f64,
    pub sdsd: f64,
    pub rmssd: f64,
    pub pnn20: f64,
    pub pnn50: f64,
    pub hr_mad: f64,
    pub sd1: f64,
    pub sd2: f64,
    pub s: f64,
    /// Zero when undefined; see `ratio_undefined`.
    pub ratio: f64,
    pub breathing_rate: f64,
    pub ratio_undefined: bool,
    pub breathing_low_confidence: bool,
}

impl FeatureRecord {
    /// Values in [`FEATURE_NAMES`] order.
    pub fn to_array(&self) -> [f64; FEATURE_COUNT] {
        [
            self.bpm,
            self.ibi,
            self.sdnn,
            self.sdsd,
            self.rmssd,
            self.pnn20,
            self.pnn50,
            self.hr_mad,
            self.sd1,
            self.sd2,
            self.s,
            self.ratio,
            self.breathing_rate,
        ]
    }
}

fn require_intervals(rr: &RrSeries, what: &str) -> Result<()> {
    if rr.len() < MIN_INTERVALS {
        return Err(Error::InsufficientData(format!(
            "{what} needs at least {MIN_INTERVALS} RR intervals, got {}",
            rr.len()
        )));
    }
    Ok(())
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn population_std(x: &[f64]) -> f64 {
    // the rounded mean of identical values can miss them by an ulp
    if x.iter().all(|&v| v == x[0]) {
        return 0.0;
    }
    let m = mean(x);
    (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / x.len() as f64).sqrt()
}

pub fn time_domain_features(rr: &RrSeries) -> Result<TimeDomain> {
    require_intervals(rr, "time-domain features")?;
    let x = rr.intervals();
    let n = x.len() as f64;
    let mean_rr = mean(x);
    let diffs: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let abs_diffs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();

    let rmssd = (diffs.iter().map(|d| d * d).sum::<f64>() / diffs.len() as f64).sqrt();
    let over = |t: f64| abs_diffs.iter().filter(|&&d| d > t).count() as f64;
    let med = median_in_place(&mut x.to_vec());
    let hr_mad = x.iter().map(|v| (v - med).abs()).sum::<f64>() / n;

    Ok(TimeDomain {
        bpm: 60_000.0 / mean_rr,
        ibi: mean_rr,
        sdnn: population_std(x),
        sdsd: population_std(&abs_diffs),
        rmssd,
        pnn20: over(20.0) / n * 100.0,
        pnn50: over(50.0) / n * 100.0,
        hr_mad,
    })
}

pub fn poincare_features(rr: &RrSeries) -> Result<Poincare> {
    require_intervals(rr, "Poincare features")?;
    let x = rr.intervals();
    let (d1, d2): (Vec<f64>, Vec<f64>) = x
        .windows(2)
        .map(|w| ((w[0] - w[1]) / SQRT_2, (w[0] + w[1]) / SQRT_2))
        .unzip();
    let sd1 = population_std(&d1);
    let sd2 = population_std(&d2);
    let ratio = (sd2 > 1e-12).then(|| sd1 / sd2);
    Ok(Poincare { sd1, sd2, s: PI * sd1 * sd2, ratio })
}

/// Resamples the RR tachogram onto a uniform grid by linear interpolation.
///
/// Beat `i` sits at the cumulative sum of the first `i + 1` intervals and
/// carries the value of interval `i`. Returns samples spanning the first to
/// the last beat.
pub fn resample_tachogram(rr: &RrSeries, rate_hz: f64) -> Vec<f64> {
    let x = rr.intervals();
    let mut times = Vec::with_capacity(x.len());
    let mut t = 0.0;
    for v in x {
        t += v / 1000.0;
        times.push(t);
    }
    let start = times[0];
    let end = *times.last().unwrap();
    let count = ((end - start) * rate_hz).floor() as usize + 1;
    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    for k in 0..count {
        let tk = start + k as f64 / rate_hz;
        while seg + 2 < times.len() && times[seg + 1] < tk {
            seg += 1;
        }
        if times.len() == 1 {
            out.push(x[0]);
            continue;
        }
        let (t0, t1) = (times[seg], times[seg + 1]);
        let w = ((tk - t0) / (t1 - t0)).clamp(0.0, 1.0);
        out.push(x[seg] + w * (x[seg + 1] - x[seg]));
    }
    out
}

/// Periodogram power of `x` (sampled at `rate_hz`) at frequency `f`.
fn power_at(x: &[f64], rate_hz: f64, f: f64) -> f64 {
    let w = 2.0 * PI * f / rate_hz;
    let (mut re, mut im) = (0.0, 0.0);
    for (n, v) in x.iter().enumerate() {
        let (s, c) = (w * n as f64).sin_cos();
        re += v * c;
        im -= v * s;
    }
    (re * re + im * im) / x.len() as f64
}

/// Estimates respiration from the dominant RR modulation in 0.1-0.4 Hz.
///
/// The tachogram is resampled at 4 Hz, mean-removed, and its periodogram is
/// scanned on a 1 mHz grid across the band.
pub fn breathing_rate(rr: &RrSeries) -> Result<BreathingEstimate> {
    if rr.duration_ms() < MIN_BREATHING_DURATION_MS {
        return Err(Error::InsufficientData(format!(
            "breathing rate needs at least {} s of RR data, got {:.3} s",
            MIN_BREATHING_DURATION_MS / 1000.0,
            rr.duration_ms() / 1000.0
        )));
    }
    if rr.len() < 2 {
        return Err(Error::InsufficientData("breathing rate needs at least 2 RR intervals".into()));
    }
    let mut tach = resample_tachogram(rr, TACHOGRAM_HZ);
    let m = mean(&tach);
    tach.iter_mut().for_each(|v| *v -= m);

    let (lo, hi) = BREATHING_BAND_HZ;
    let steps = ((hi - lo) / BAND_STEP_HZ).round() as usize;
    let spectrum: Vec<(f64, f64)> = (0..=steps)
        .map(|i| {
            let f = lo + i as f64 * BAND_STEP_HZ;
            (f, power_at(&tach, TACHOGRAM_HZ, f))
        })
        .collect();
    let &(peak_f, _) = spectrum
        .iter()
        .fold(&spectrum[0], |best, cur| if cur.1 > best.1 { cur } else { best });
    let total: f64 = spectrum.iter().map(|(_, p)| p).sum();
    let near: f64 = spectrum
        .iter()
        .filter(|(f, _)| (f - peak_f).abs() <= PEAK_HALF_WIDTH_HZ + 1e-12)
        .map(|(_, p)| p)
        .sum();
    let fraction = if total > 0.0 { near / total } else { 0.0 };
    Ok(BreathingEstimate {
        rate: 60.0 * peak_f,
        peak_power_fraction: fraction,
        low_confidence: fraction < CONFIDENT_PEAK_FRACTION,
    })
}

/// Computes the full thirteen-feature record.
pub fn extract_features(rr: &RrSeries) -> Result<FeatureRecord> {
    let td = time_domain_features(rr)?;
    let pc = poincare_features(rr)?;
    let br = breathing_rate(rr)?;
    Ok(FeatureRecord {
        bpm: td.bpm,
        ibi: td.ibi,
        sdnn: td.sdnn,
        sdsd: td.sdsd,
        rmssd: td.rmssd,
        pnn20: td.pnn20,
        pnn50: td.pnn50,
        hr_mad: td.hr_mad,
        sd1: pc.sd1,
        sd2: pc.sd2,
        s: pc.s,
        ratio: pc.ratio.unwrap_or(0.0),
        breathing_rate: br.rate,
        ratio_undefined: pc.ratio.is_none(),
        breathing_low_confidence: br.low_confidence,
    })
}
