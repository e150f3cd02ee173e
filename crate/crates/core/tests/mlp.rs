mod common;

use codel::mlp::{predict_label, Dataset, MlpTopology};
use codel::rng::substream;
use proptest::prelude::*;
use rand::Rng as _;

#[test]
fn forward_matches_reference() {
    let mut rng = substream(3, "forward");
    for sizes in [vec![2, 3, 1], vec![13, 10, 1], vec![4, 5, 3, 2]] {
        for _ in 0..50 {
            let topo = MlpTopology::new(sizes.clone()).unwrap();
            let params: Vec<f64> = (0..topo.param_count()).map(|_| rng.random_range(-3.0..3.0)).collect();
            let x: Vec<f64> = (0..sizes[0]).map(|_| rng.random_range(-2.0..2.0)).collect();
            let got = topo.forward(&params, &x).unwrap();
            let want = common::forward(&sizes, &params, &x);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() <= 1e-14, "{sizes:?}: {g} vs {w}");
            }
        }
    }
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = substream(4, "gradient");
    for sizes in [[2, 3, 1], [13, 10, 1]] {
        for _ in 0..20 {
            let (topo, params, data) = common::random_case(&sizes, 15, &mut rng);
            let err = common::gradient_error(&topo, &params, &data, 1e-5);
            assert!(err < 1e-5, "{sizes:?}: {err}");
        }
    }
}

#[test]
fn loss_matches_reference() {
    let mut rng = substream(5, "loss");
    let (topo, params, data) = common::random_case(&[3, 4, 1], 30, &mut rng);
    let want: f64 = (0..data.len())
        .map(|i| (common::forward(&[3, 4, 1], &params, data.row(i))[0] - f64::from(data.label(i))).powi(2))
        .sum::<f64>()
        / data.len() as f64;
    assert!((topo.mse_loss(&params, &data).unwrap() - want).abs() < 1e-14);
    assert!((topo.mse_loss_and_gradient(&params, &data).unwrap().0 - want).abs() < 1e-14);
}

#[test]
fn error_counts_misclassified_samples() {
    let topo = MlpTopology::new(vec![1, 1, 1]).unwrap();
    // h = sigmoid(x), output = sigmoid(h - 0.5): x = 0 lands exactly on 0.5
    let params = [1.0, 0.0, 1.0, -0.5];
    let data = Dataset::new(vec![vec![-1.0], vec![0.0], vec![2.0], vec![3.0]], vec![0, 0, 0, 1]).unwrap();
    assert_eq!(topo.classification_error(&params, &data).unwrap(), 50.0);
    assert_eq!(predict_label(0.5), 1);
}

fn sizes_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..6, 3..6)
}

proptest! {
    #[test]
    fn decode_encode_roundtrip(sizes in sizes_strategy(), seed in any::<u64>()) {
        let topo = MlpTopology::new(sizes).unwrap();
        let mut rng = substream(seed, "roundtrip");
        let params: Vec<f64> = (0..topo.param_count()).map(|_| rng.random_range(-5.0..5.0)).collect();
        let layers = topo.decode(&params).unwrap();
        prop_assert_eq!(topo.encode(&layers).unwrap(), params);
    }

    #[test]
    fn outputs_are_probabilities(sizes in sizes_strategy(), seed in any::<u64>()) {
        let topo = MlpTopology::new(sizes.clone()).unwrap();
        let mut rng = substream(seed, "range");
        let params: Vec<f64> = (0..topo.param_count()).map(|_| rng.random_range(-3.0..3.0)).collect();
        let x: Vec<f64> = (0..sizes[0]).map(|_| rng.random_range(-3.0..3.0)).collect();
        for o in topo.forward(&params, &x).unwrap() {
            prop_assert!(o > 0.0 && o < 1.0);
        }
    }

    /// Scaling the output neuron's pre-activation by c > 0 keeps every
    /// sample on its side of the threshold.
    #[test]
    fn error_invariant_under_output_scaling(seed in any::<u64>(), c in 0.1f64..10.0) {
        let mut rng = substream(seed, "scaling");
        let (topo, params, data) = common::random_case(&[3, 4, 1], 25, &mut rng);
        let mut layers = topo.decode(&params).unwrap();
        let last = layers.last_mut().unwrap();
        last.weights.iter_mut().flatten().for_each(|w| *w *= c);
        last.biases.iter_mut().for_each(|b| *b *= c);
        let scaled = topo.encode(&layers).unwrap();
        // skip draws with a pre-activation within rounding of zero
        let on_edge = (0..data.len()).any(|i| (topo.forward(&params, data.row(i)).unwrap()[0] - 0.5).abs() < 1e-12);
        prop_assume!(!on_edge);
        prop_assert_eq!(
            topo.classification_error(&params, &data).unwrap(),
            topo.classification_error(&scaled, &data).unwrap()
        );
    }
}
