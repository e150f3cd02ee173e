//! HRV features transcribed formula by formula.

use std::f64::consts::PI;

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn pstd(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64).sqrt()
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len();
    if n % 2 == 0 { (s[n / 2 - 1] + s[n / 2]) / 2.0 } else { s[n / 2] }
}

/// Tachogram on a uniform grid from the first to the last beat; beat `i`
/// occurs at the end of interval `i` and carries its length.
fn tachogram(rr: &[f64], hz: f64) -> Vec<f64> {
    let beat_t: Vec<f64> = rr
        .iter()
        .scan(0.0, |t, v| {
            *t += v / 1000.0;
            Some(*t)
        })
        .collect();
    let n = ((beat_t[rr.len() - 1] - beat_t[0]) * hz).floor() as usize + 1;
    (0..n)
        .map(|k| {
            let t = beat_t[0] + k as f64 / hz;
            // last beat time not after t, capped so that j + 1 exists
            let j = beat_t.partition_point(|&b| b < t).saturating_sub(1).min(rr.len() - 2);
            let frac = ((t - beat_t[j]) / (beat_t[j + 1] - beat_t[j])).clamp(0.0, 1.0);
            rr[j] * (1.0 - frac) + rr[j + 1] * frac
        })
        .collect()
}

pub fn features(rr: &[f64]) -> [f64; 13] {
    let n = rr.len() as f64;
    let d: Vec<f64> = (1..rr.len()).map(|i| rr[i] - rr[i - 1]).collect();
    let ad: Vec<f64> = d.iter().map(|x| x.abs()).collect();
    let m = mean(rr);
    let med = median(rr);

    let bpm = 60_000.0 / m;
    let sdnn = pstd(rr);
    let sdsd = pstd(&ad);
    let rmssd = mean(&d.iter().map(|x| x * x).collect::<Vec<_>>()).sqrt();
    let pnn20 = 100.0 * ad.iter().filter(|&&x| x > 20.0).count() as f64 / n;
    let pnn50 = 100.0 * ad.iter().filter(|&&x| x > 50.0).count() as f64 / n;
    let hr_mad = mean(&rr.iter().map(|x| (x - med).abs()).collect::<Vec<_>>());

    let d1: Vec<f64> = (1..rr.len()).map(|i| (rr[i - 1] - rr[i]) / 2f64.sqrt()).collect();
    let d2: Vec<f64> = (1..rr.len()).map(|i| (rr[i - 1] + rr[i]) / 2f64.sqrt()).collect();
    let sd1 = pstd(&d1);
    let sd2 = pstd(&d2);
    let ratio = if sd2 > 1e-12 { sd1 / sd2 } else { 0.0 };

    let tach = tachogram(rr, 4.0);
    let tm = mean(&tach);
    let centred: Vec<f64> = tach.iter().map(|v| v - tm).collect();
    let mut best = (f64::NEG_INFINITY, 0.0);
    for step in 0..=300 {
        let f = 0.1 + step as f64 * 0.001;
        let (mut c, mut s) = (0.0, 0.0);
        for (k, v) in centred.iter().enumerate() {
            let phase = 2.0 * PI * f * k as f64 / 4.0;
            c += v * phase.cos();
            s += v * phase.sin();
        }
        let p = (c * c + s * s) / centred.len() as f64;
        if p > best.0 {
            best = (p, f);
        }
    }
    [bpm, m, sdnn, sdsd, rmssd, pnn20, pnn50, hr_mad, sd1, sd2, PI * sd1 * sd2, ratio, 60.0 * best.1]
}
