//! Reference implementations shared by the integration tests. Each is written
//! from the defining formulas, without calling the library code it checks.
#![allow(dead_code)]

pub mod hrv_oracle;

use codel::mlp::{Dataset, MlpTopology};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Forward pass over the flat layout: per layer, the weights of each
/// destination neuron (one per source), then that layer's biases.
pub fn forward(sizes: &[usize], params: &[f64], input: &[f64]) -> Vec<f64> {
    let mut act = input.to_vec();
    let mut off = 0;
    for w in sizes.windows(2) {
        let (n_src, n_dst) = (w[0], w[1]);
        let bias_off = off + n_src * n_dst;
        act = (0..n_dst)
            .map(|d| {
                let row = &params[off + d * n_src..off + (d + 1) * n_src];
                let z: f64 = row.iter().zip(&act).map(|(a, b)| a * b).sum::<f64>() + params[bias_off + d];
                sigmoid(z)
            })
            .collect();
        off = bias_off + n_dst;
    }
    act
}

/// Random network, inputs and binary labels.
pub fn random_case(sizes: &[usize], samples: usize, rng: &mut impl Rng) -> (MlpTopology, Vec<f64>, Dataset) {
    let topo = MlpTopology::new(sizes.to_vec()).unwrap();
    let params = (0..topo.param_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let rows = (0..samples)
        .map(|_| (0..sizes[0]).map(|_| rng.random_range(-2.0..2.0)).collect())
        .collect();
    let labels = (0..samples).map(|_| rng.random_range(0..2u8)).collect();
    (topo, params, Dataset::new(rows, labels).unwrap())
}

/// Floor on the relative-error denominator: central differences with
/// h = 1e-5 carry ~1e-11 absolute error, so smaller components carry no
/// relative information.
pub const GRADIENT_FLOOR: f64 = 1e-6;

/// Largest relative difference between the analytic MSE gradient and
/// central finite differences.
pub fn gradient_error(topo: &MlpTopology, params: &[f64], data: &Dataset, h: f64) -> f64 {
    let (_, grad) = topo.mse_loss_and_gradient(params, data).unwrap();
    let mut worst = 0.0f64;
    for j in 0..params.len() {
        let mut up = params.to_vec();
        let mut down = params.to_vec();
        up[j] += h;
        down[j] -= h;
        let fd = (topo.mse_loss(&up, data).unwrap() - topo.mse_loss(&down, data).unwrap()) / (2.0 * h);
        let scale = grad[j].abs().max(fd.abs()).max(GRADIENT_FLOOR);
        worst = worst.max((grad[j] - fd).abs() / scale);
    }
    worst
}

/// Exact metric values; `None` where a denominator is zero. The last entry
/// is the squared G-mean, which stays rational.
pub fn rational_metrics(tp: u64, tn: u64, fp: u64, fn_: u64) -> [Option<Ratio<u64>>; 6] {
    let r = |n: u64, d: u64| (d != 0).then(|| Ratio::new(n, d));
    let sens = r(tp, tp + fn_);
    let spec = r(tn, tn + fp);
    [
        r(tp + tn, tp + tn + fp + fn_),
        sens,
        spec,
        r(tp, tp + fp),
        r(2 * tp, 2 * tp + fp + fn_),
        sens.zip(spec).map(|(a, b)| a * b),
    ]
}

pub fn ratio_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Textbook DE/rand/1/bin with clamping and greedy selection, random
/// initialization only; returns the best fitness after `nfe` evaluations.
pub fn plain_de(f: impl Fn(&[f64]) -> f64, dim: usize, np: usize, nfe: usize, lo: f64, hi: f64, seed: u64) -> f64 {
    let (fw, cr) = (0.5, 0.9);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pop: Vec<Vec<f64>> = (0..np).map(|_| (0..dim).map(|_| rng.random_range(lo..hi)).collect()).collect();
    let mut fit: Vec<f64> = pop.iter().map(|x| f(x)).collect();
    let mut used = np;
    while used < nfe {
        for i in 0..np {
            if used >= nfe {
                break;
            }
            let pick = |rng: &mut ChaCha8Rng, not: &[usize]| loop {
                let r = rng.random_range(0..np);
                if !not.contains(&r) {
                    break r;
                }
            };
            let r1 = pick(&mut rng, &[i]);
            let r2 = pick(&mut rng, &[i, r1]);
            let r3 = pick(&mut rng, &[i, r1, r2]);
            let jrand = rng.random_range(0..dim);
            let trial: Vec<f64> = (0..dim)
                .map(|j| {
                    if j == jrand || rng.random::<f64>() < cr {
                        (pop[r1][j] + fw * (pop[r2][j] - pop[r3][j])).clamp(lo, hi)
                    } else {
                        pop[i][j]
                    }
                })
                .collect();
            let ft = f(&trial);
            used += 1;
            if ft <= fit[i] {
                pop[i] = trial;
                fit[i] = ft;
            }
        }
    }
    fit.into_iter().fold(f64::INFINITY, f64::min)
}

pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 { s[n / 2] } else { 0.5 * (s[n / 2 - 1] + s[n / 2]) }
}

pub fn xor() -> Dataset {
    Dataset::new(vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]], vec![0, 1, 1, 0]).unwrap()
}
