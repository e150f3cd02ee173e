mod common;

use std::sync::Mutex;

use codel::evaluation::*;
use codel::mlp::Dataset;
use codel::rng::substream;
use codel::synthetic::two_gaussians;
use proptest::prelude::*;
use rand::Rng as _;

#[test]
fn metrics_match_rational_oracle() {
    let mut rng = substream(11, "confusion");
    for _ in 0..1000 {
        let mut c = [0u64; 4];
        for v in &mut c {
            // include zeros often to exercise the degenerate branches
            *v = if rng.random_bool(0.15) { 0 } else { rng.random_range(1..10_000) };
        }
        let cm = ConfusionMatrix::new(c[0], c[1], c[2], c[3]);
        if cm.total() == 0 {
            assert!(metrics(&cm).is_err());
            continue;
        }
        let got = metrics(&cm).unwrap();
        let want = common::rational_metrics(c[0], c[1], c[2], c[3]);
        for (i, m) in Metric::ALL.into_iter().enumerate() {
            let value = got.get(m);
            match want[i] {
                None => {
                    assert_eq!(value, 0.0, "{m} of {cm:?}");
                    assert!(got.degenerate[i]);
                }
                Some(r) if m == Metric::GMean => {
                    assert!((value * value - common::ratio_f64(r)).abs() <= 1e-12, "{m} of {cm:?}");
                    assert!(!got.degenerate[i]);
                }
                Some(r) => {
                    assert!((value - common::ratio_f64(r)).abs() <= 1e-12, "{m} of {cm:?}");
                    assert!(!got.degenerate[i]);
                }
            }
        }
    }
}

#[test]
fn error_enhancement_reference_points() {
    assert!((error_enhancement(70.46, 71.13).unwrap() - 0.67 / 29.54 * 100.0).abs() < 1e-9);
    assert_eq!(error_enhancement(80.0, 80.0).unwrap(), 0.0);
    assert_eq!(error_enhancement(50.0, 100.0).unwrap(), 100.0);
    assert!(error_enhancement(80.0, 70.0).unwrap() < 0.0);
    assert!(error_enhancement(100.0, 90.0).is_err());
    assert!(error_enhancement(f64::NAN, 90.0).is_err());
}

#[test]
fn fold_summary_uses_sample_std() {
    let s = FoldSummary::from_values(&[1.0, 2.0, 3.0, 4.0]).unwrap();
    assert_eq!((s.mean, s.min, s.max, s.median), (2.5, 1.0, 4.0, 2.5));
    assert!((s.std - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
}

#[test]
fn ties_share_their_average_rank() {
    assert_eq!(descending_ranks(&[0.9, 0.7, 0.9, 0.1]), [1.5, 3.0, 1.5, 4.0]);
    let t = rank_and_mean_rank(&[vec![3.0, 1.0], vec![2.0, 2.0], vec![1.0, 3.0]]).unwrap();
    assert_eq!(t.mean_rank, [2.0, 2.0, 2.0]);
}

#[test]
fn wtl_tolerance() {
    assert_eq!(wtl(&[0.5, 0.5, 0.5], &[0.6, 0.5 + 1e-12, 0.4]).unwrap(), Wtl { wins: 1, ties: 1, losses: 1 });
    assert!(wtl(&[0.5], &[0.5, 0.6]).is_err());
}

/// Nearest-class-mean classifier that logs every model it fits.
struct CentroidTrainer {
    log: Mutex<Vec<(u64, Vec<f64>)>>,
}

struct Centroids(Vec<f64>, Vec<f64>);

impl Classifier for Centroids {
    fn predict(&self, x: &[f64]) -> u8 {
        let d = |c: &[f64]| c.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        u8::from(d(&self.1) < d(&self.0))
    }
}

impl Trainer for CentroidTrainer {
    type Model = Centroids;

    fn fit(&self, train: &Dataset, seed: u64) -> codel::Result<Centroids> {
        let dim = train.n_features();
        let mean = |class: u8| -> Vec<f64> {
            let rows: Vec<&[f64]> = train.rows().zip(train.labels()).filter(|(_, &l)| l == class).map(|(r, _)| r).collect();
            (0..dim).map(|d| rows.iter().map(|r| r[d]).sum::<f64>() / rows.len() as f64).collect()
        };
        let model = Centroids(mean(0), mean(1));
        self.log.lock().unwrap().push((seed, [model.0.clone(), model.1.clone()].concat()));
        Ok(model)
    }
}

fn model_for(trainer: &CentroidTrainer, seed: u64) -> Vec<f64> {
    trainer.log.lock().unwrap().iter().find(|(s, _)| *s == seed).unwrap().1.clone()
}

#[test]
fn test_labels_never_reach_the_trainer() {
    let data = two_gaussians(40, 3, 2.0, &mut substream(1, "data")).unwrap();
    let folds = kfold_split(data.labels(), 5, 3).unwrap();
    let mut poisoned = data.labels().to_vec();
    for &i in &folds[0] {
        poisoned[i] = 1 - poisoned[i];
    }
    let poisoned = data.with_labels(poisoned).unwrap();

    let clean = CentroidTrainer { log: Mutex::new(Vec::new()) };
    let dirty = CentroidTrainer { log: Mutex::new(Vec::new()) };
    let a = cross_validate_folds(&clean, &data, &folds, 9).unwrap();
    let b = cross_validate_folds(&dirty, &poisoned, &folds, 9).unwrap();

    assert_eq!(model_for(&clean, fold_seed(9, 0)), model_for(&dirty, fold_seed(9, 0)));
    assert_ne!(a.folds[0].report, b.folds[0].report);
    // every other fold trains on the flipped labels
    for i in 1..5 {
        assert_ne!(model_for(&clean, fold_seed(9, i)), model_for(&dirty, fold_seed(9, i)));
    }
}

#[test]
fn cross_validation_is_deterministic_and_complete() {
    let data = two_gaussians(30, 2, 3.0, &mut substream(2, "data")).unwrap();
    let t = CentroidTrainer { log: Mutex::new(Vec::new()) };
    let a = cross_validate(&t, &data, 10, 4, 5).unwrap();
    let b = cross_validate(&t, &data, 10, 4, 5).unwrap();
    assert_eq!(a, b);
    let total: u64 = a.folds.iter().map(|f| f.confusion.total()).sum();
    assert_eq!(total, 60);
    assert!(a.summary(Metric::Accuracy).mean > 0.9);
}

#[test]
fn cross_validation_input_errors() {
    let t = CentroidTrainer { log: Mutex::new(Vec::new()) };
    let one_class = Dataset::new(vec![vec![0.0]; 6], vec![1; 6]).unwrap();
    assert!(cross_validate(&t, &one_class, 2, 0, 0).is_err());
    let data = two_gaussians(3, 2, 3.0, &mut substream(2, "data")).unwrap();
    assert!(cross_validate(&t, &data, 7, 0, 0).is_err());
    assert!(cross_validate_folds(&t, &data, &[vec![0, 1, 2], vec![3, 4]], 0).is_err());
    assert!(cross_validate_folds(&t, &data, &[vec![0, 1, 2], vec![2, 3, 4, 5]], 0).is_err());
}

proptest! {
    #[test]
    fn folds_partition_and_stratify(labels in prop::collection::vec(0u8..2, 2..200), k in 2usize..12, seed in any::<u64>()) {
        prop_assume!(k <= labels.len());
        let folds = kfold_split(&labels, k, seed).unwrap();
        prop_assert_eq!(folds.len(), k);
        let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..labels.len()).collect::<Vec<_>>());
        let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        let pos: Vec<usize> = folds.iter().map(|f| f.iter().filter(|&&i| labels[i] == 1).count()).collect();
        prop_assert!(pos.iter().max().unwrap() - pos.iter().min().unwrap() <= 1);
    }

    #[test]
    fn gmean_squared_is_sensitivity_times_specificity(tp in 0u64..500, tn in 0u64..500, fp in 0u64..500, fn_ in 0u64..500) {
        let cm = ConfusionMatrix::new(tp, tn, fp, fn_);
        prop_assume!(cm.total() > 0);
        let r = metrics(&cm).unwrap();
        prop_assert!((r.gmean * r.gmean - r.sensitivity * r.specificity).abs() <= 1e-12);
        prop_assert!(r.values().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn error_enhancement_is_monotone(base in 0.0f64..99.0, a in 0.0f64..100.0, b in 0.0f64..100.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(error_enhancement(base, lo).unwrap() <= error_enhancement(base, hi).unwrap());
    }

    #[test]
    fn ranks_survive_monotone_transforms(values in prop::collection::vec(0.0f64..1.0, 1..20)) {
        let transformed: Vec<f64> = values.iter().map(|v| (3.0 * v).exp() + 2.0).collect();
        prop_assert_eq!(descending_ranks(&values), descending_ranks(&transformed));
        let ranks = descending_ranks(&values);
        let n = values.len() as f64;
        prop_assert!((ranks.iter().sum::<f64>() - n * (n + 1.0) / 2.0).abs() < 1e-9);
    }
}
