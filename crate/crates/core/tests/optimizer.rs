mod common;

use codel::mlp::CandidateSolution;
use codel::optimizer::*;
use codel::rng::substream;
use proptest::prelude::*;
use rand::Rng as _;

fn random_population(np: usize, dim: usize, seed: u64) -> (Population, Bounds) {
    let bounds = Bounds::uniform(dim, -5.0, 5.0);
    let mut rng = substream(seed, "population");
    let members = (0..np)
        .map(|_| {
            let x = bounds.sample(&mut rng);
            let f = common::sphere(&x);
            CandidateSolution::evaluated(x, f)
        })
        .collect();
    (Population::from_members(members).unwrap(), bounds)
}

#[test]
fn quasi_opposite_stays_between_centre_and_opposite() {
    let mut rng = substream(1, "qo");
    for _ in 0..100_000 {
        let a = rng.random_range(-20.0..20.0);
        let b = a + rng.random_range(1e-3..40.0);
        let x = rng.random_range(a..=b);
        let (mid, opp) = (0.5 * (a + b), opposite(x, a, b));
        let q = quasi_opposite(x, a, b, &mut rng);
        assert!(q >= mid.min(opp) && q <= mid.max(opp), "{q} outside [{mid}, {opp}]");
    }
}

#[test]
fn opposite_is_an_involution() {
    let mut rng = substream(2, "opp");
    for _ in 0..100_000 {
        // symmetric box: exact
        let x = rng.random_range(-10.0..=10.0);
        assert_eq!(opposite(opposite(x, -10.0, 10.0), -10.0, 10.0), x);
        // general box: up to the rounding of a + b - x
        let a = rng.random_range(-20.0..20.0);
        let b = a + rng.random_range(1e-3..40.0);
        let y = rng.random_range(a..=b);
        let back = opposite(opposite(y, a, b), a, b);
        assert!((back - y).abs() <= 4.0 * f64::EPSILON * a.abs().max(b.abs()));
    }
}

#[test]
fn qobl_keeps_the_best_of_the_union() {
    for seed in 0..100 {
        let np = 4 + seed as usize % 20;
        let (mut pop, bounds) = random_population(np, 3, seed);
        let before = pop.members.clone();
        let mut rng = substream(seed, "jump");
        let mut replay = rng.clone();
        let twins: Vec<f64> = before
            .iter()
            .map(|m| {
                let x: Vec<f64> = (0..3).map(|j| quasi_opposite(m.params[j], bounds.lower[j], bounds.upper[j], &mut replay)).collect();
                common::sphere(&x)
            })
            .collect();
        let spent = qobl_population(&mut pop, &common::sphere, &bounds, usize::MAX, &mut rng);

        assert_eq!(spent, np);
        assert_eq!(pop.len(), np);
        assert_eq!(pop.nfe, 2 * np);
        let mut union: Vec<f64> = before.iter().map(|m| m.fitness.unwrap()).chain(twins).collect();
        union.sort_by(f64::total_cmp);
        let mut kept: Vec<f64> = pop.members.iter().map(|m| m.fitness.unwrap()).collect();
        kept.sort_by(f64::total_cmp);
        assert_eq!(kept, union[..np], "seed {seed}");
        assert!(pop.members.iter().all(|m| bounds.contains(&m.params)));
    }
}

#[test]
fn partial_jump_respects_budget() {
    let (mut pop, bounds) = random_population(10, 2, 7);
    let spent = qobl_population(&mut pop, &common::sphere, &bounds, 4, &mut substream(0, "j"));
    assert_eq!((spent, pop.nfe, pop.len()), (4, 14, 10));
}

#[test]
fn cluster_step_spends_k_and_keeps_size() {
    for seed in 0..30 {
        let (mut pop, _) = random_population(25, 4, seed);
        let best_before = pop.best.fitness.unwrap();
        let spent = cluster_update(&mut pop, &common::sphere, usize::MAX, &mut substream(seed, "k")).unwrap();
        assert!((2..=5).contains(&spent));
        assert_eq!(pop.len(), 25);
        assert_eq!(pop.nfe, 25 + spent);
        assert!(pop.best.fitness.unwrap() <= best_before);
        // the best member is never a replacement slot
        assert!(pop.members.iter().any(|m| m.fitness.unwrap() <= best_before));
    }
}

#[test]
fn codel_solves_sphere_at_least_as_well_as_plain_de() {
    let (mut codel, mut de) = (Vec::new(), Vec::new());
    for seed in 0..7 {
        let cfg = CodelConfig { nfe_max: 10_000, seed, ..CodelConfig::default() };
        codel.push(run_codel(&common::sphere, 5, &cfg).unwrap().best_fitness());
        de.push(common::plain_de(common::sphere, 5, 50, 10_000, -10.0, 10.0, seed));
    }
    assert!(common::median(&codel) <= common::median(&de), "{codel:?} vs {de:?}");
}

#[test]
fn trace_and_accounting() {
    let cfg = CodelConfig { np: 20, nfe_max: 3_000, seed: 5, ..CodelConfig::default() };
    let r = run_codel(&common::sphere, 4, &cfg).unwrap();
    assert_eq!(r.history[0].nfe, 40);
    assert!(r.nfe <= cfg.nfe_max);
    assert_eq!(r.history.last().unwrap().nfe, r.nfe);
    assert_eq!(r.population.len(), 20);
    for w in r.history.windows(2) {
        assert!(w[1].best_fitness <= w[0].best_fitness);
        assert_eq!(w[1].iteration, w[0].iteration + 1);
        assert!(w[1].nfe > w[0].nfe);
    }
    assert!(r.population.members.iter().all(|m| m.params.iter().all(|v| (-10.0..=10.0).contains(v))));
}

#[test]
fn step_sizes_without_jumps_or_clusters() {
    let cfg = CodelConfig { np: 10, nfe_max: 1_005, jr: 0.0, cp: 10_000, seed: 1, ..CodelConfig::default() };
    let r = run_codel(&common::sphere, 3, &cfg).unwrap();
    let steps: Vec<usize> = r.history.windows(2).map(|w| w[1].nfe - w[0].nfe).collect();
    assert!(steps[..steps.len() - 1].iter().all(|&s| s == 10));
    assert_eq!(*steps.last().unwrap(), 5);
    assert_eq!(r.nfe, 1_005);
}

#[test]
fn step_sizes_with_clusters_every_iteration() {
    let cfg = CodelConfig { np: 16, nfe_max: 2_000, jr: 0.0, cp: 1, seed: 2, ..CodelConfig::default() };
    let r = run_codel(&common::sphere, 3, &cfg).unwrap();
    let steps: Vec<usize> = r.history.windows(2).map(|w| w[1].nfe - w[0].nfe).collect();
    // each iteration: Np trials plus k in [2, 4] centers
    assert!(steps[..steps.len() - 1].iter().all(|s| (18..=20).contains(s)), "{steps:?}");
    assert_eq!(r.nfe, 2_000);
}

#[test]
fn same_seed_same_run() {
    let cfg = CodelConfig { np: 12, nfe_max: 1_500, seed: 9, ..CodelConfig::default() };
    let a = run_codel(&common::sphere, 6, &cfg).unwrap();
    let b = run_codel(&common::sphere, 6, &cfg).unwrap();
    assert_eq!(a, b);
    let c = run_codel(&common::sphere, 6, &CodelConfig { seed: 10, ..cfg }).unwrap();
    assert_ne!(a.best, c.best);
}

#[test]
fn invalid_configuration_is_rejected() {
    let bad = [
        CodelConfig { np: 3, ..CodelConfig::default() },
        CodelConfig { f: 0.0, ..CodelConfig::default() },
        CodelConfig { cr: 1.5, ..CodelConfig::default() },
        CodelConfig { lower: 1.0, upper: 1.0, ..CodelConfig::default() },
    ];
    for cfg in bad {
        assert!(run_codel(&common::sphere, 2, &cfg).is_err(), "{cfg:?}");
    }
}

proptest! {
    #[test]
    fn mutants_and_trials_stay_in_bounds(seed in any::<u64>(), f in 0.1f64..2.0, cr in 0.0f64..=1.0) {
        let (pop, bounds) = random_population(8, 5, seed);
        let mut rng = substream(seed, "mut");
        for i in 0..pop.len() {
            let m = mutate(&pop.members, i, f, &bounds, &mut rng).unwrap();
            prop_assert!(bounds.contains(&m));
            let t = binomial_crossover(&pop.members[i].params, &m, cr, &mut rng);
            prop_assert!(t.iter().zip(&m).any(|(a, b)| a == b));
            prop_assert!(bounds.contains(&t));
        }
    }

    #[test]
    fn selection_prefers_trial_on_ties(t in -5.0f64..5.0, u in -5.0f64..5.0) {
        let target = CandidateSolution::evaluated(vec![0.0], t);
        let trial = CandidateSolution::evaluated(vec![1.0], u);
        let kept = select(target, trial).unwrap();
        prop_assert_eq!(kept.params[0], if u <= t { 1.0 } else { 0.0 });
    }
}
