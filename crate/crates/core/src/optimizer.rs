//! Cluster-based opposition differential evolution.
//!
//! DE/rand/1/bin is extended with two population-level moves:
//!
//! * every `cp` iterations the population is clustered with k-means and the
//!   cluster centers (multi-parent offspring) compete against `k` randomly
//!   chosen members for their slots;
//! * with probability `jr` per iteration, a quasi-opposite population is
//!   sampled and the best `np` of the union survive. The same jump seeds the
//!   initial population.
//!
//! Fitness evaluations inside one step run in parallel; every random draw
//! happens on the coordinating thread, so results do not depend on thread
//! scheduling.

use rand::seq::index::sample;
use rand::Rng as _;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kmeans::kmeans;
use crate::mlp::CandidateSolution;
use crate::rng::{stream, substream, Rng};

/// Optimizer hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct CodelConfig {
    /// Population size.
    pub np: usize,
    /// Objective-evaluation budget.
    pub nfe_max: usize,
    /// Mutation scale factor.
    pub f: f64,
    /// Crossover rate.
    pub cr: f64,
    /// Per-iteration probability of a quasi-opposition jump.
    pub jr: f64,
    /// Iterations between cluster updates.
    pub cp: usize,
    pub lower: f64,
    pub upper: f64,
    pub seed: u64,
}

impl Default for CodelConfig {
    fn default() -> Self {
        Self {
            np: 50,
            nfe_max: 25_000,
            f: 0.5,
            cr: 0.9,
            jr: 0.3,
            cp: 10,
            lower: -10.0,
            upper: 10.0,
            seed: 0,
        }
    }
}

impl CodelConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Parameter(m));
        if self.np < 4 {
            return fail(format!("np must be >= 4, got {}", self.np));
        }
        if !(self.f > 0.0 && self.f <= 2.0) {
            return fail(format!("f must be in (0, 2], got {}", self.f));
        }
        if !(0.0..=1.0).contains(&self.cr) {
            return fail(format!("cr must be in [0, 1], got {}", self.cr));
        }
        if !(0.0..=0.4).contains(&self.jr) {
            return fail(format!("jr must be in [0, 0.4], got {}", self.jr));
        }
        if self.cp == 0 {
            return fail("cp must be >= 1".into());
        }
        if !(self.lower < self.upper) || !self.lower.is_finite() || !self.upper.is_finite() {
            return fail(format!("need finite lower < upper, got [{}, {}]", self.lower, self.upper));
        }
        if self.nfe_max < 2 * self.np {
            return fail(format!(
                "nfe_max ({}) must cover the initial 2 * np = {} evaluations",
                self.nfe_max,
                2 * self.np
            ));
        }
        Ok(())
    }
}

/// Per-dimension search box.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Self {
        Self { lower: vec![lower; dim], upper: vec![upper; dim] }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }

    pub fn sample(&self, rng: &mut Rng) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &hi)| lo + rng.random::<f64>() * (hi - lo))
            .collect()
    }
}

/// Reflection of `x` through the centre of `[a, b]`; `x` is clamped first.
pub fn opposite(x: f64, a: f64, b: f64) -> f64 {
    a + b - x.clamp(a, b)
}

/// Uniform draw between the centre of `[a, b]` and the opposite of `x`.
pub fn quasi_opposite(x: f64, a: f64, b: f64, rng: &mut Rng) -> f64 {
    let mid = 0.5 * (a + b);
    let opp = opposite(x, a, b);
    let (lo, hi) = if mid <= opp { (mid, opp) } else { (opp, mid) };
    if lo == hi {
        return lo;
    }
    (lo + rng.random::<f64>() * (hi - lo)).clamp(lo, hi)
}

/// Differential mutation `x1 + f (x2 - x3)`, clamped into `bounds`.
pub fn de_rand_1(x1: &[f64], x2: &[f64], x3: &[f64], f: f64, bounds: &Bounds) -> Vec<f64> {
    (0..x1.len())
        .map(|j| (x1[j] + f * (x2[j] - x3[j])).clamp(bounds.lower[j], bounds.upper[j]))
        .collect()
}

/// Draws three distinct donors other than `target` and builds the mutant.
pub fn mutate(
    members: &[CandidateSolution],
    target: usize,
    f: f64,
    bounds: &Bounds,
    rng: &mut Rng,
) -> Result<Vec<f64>> {
    let n = members.len();
    if n < 4 {
        return Err(Error::Parameter(format!("mutation needs >= 4 members, got {n}")));
    }
    // draw from the n - 1 non-target slots and shift past the target
    let picks = sample(rng, n - 1, 3);
    let idx: Vec<usize> = picks.iter().map(|i| if i >= target { i + 1 } else { i }).collect();
    Ok(de_rand_1(
        &members[idx[0]].params,
        &members[idx[1]].params,
        &members[idx[2]].params,
        f,
        bounds,
    ))
}

/// Binomial crossover; component `j_rand` always comes from the mutant.
pub fn binomial_crossover(target: &[f64], mutant: &[f64], cr: f64, rng: &mut Rng) -> Vec<f64> {
    let d = target.len();
    let j_rand = rng.random_range(0..d);
    (0..d)
        .map(|j| {
            let take = rng.random::<f64>() <= cr || j == j_rand;
            if take { mutant[j] } else { target[j] }
        })
        .collect()
}

/// One-to-one survivor selection; ties keep the trial.
pub fn select(target: CandidateSolution, trial: CandidateSolution) -> Result<CandidateSolution> {
    match (target.fitness, trial.fitness) {
        (Some(t), Some(u)) => Ok(if u <= t { trial } else { target }),
        _ => Err(Error::Contract("selection needs evaluated candidates".into())),
    }
}

/// Evaluates all vectors (in parallel) and returns them as candidates.
fn evaluate<F>(objective: &F, vectors: Vec<Vec<f64>>) -> Vec<CandidateSolution>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    vectors
        .into_par_iter()
        .map(|p| {
            let fit = objective(&p);
            CandidateSolution::evaluated(p, fit)
        })
        .collect()
}

fn argmin(members: &[CandidateSolution]) -> usize {
    let mut best = 0;
    for (i, m) in members.iter().enumerate() {
        if m.fitness_or_inf() < members[best].fitness_or_inf() {
            best = i;
        }
    }
    best
}

/// Working population of the optimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub members: Vec<CandidateSolution>,
    /// Objective evaluations spent so far.
    pub nfe: usize,
    pub iter: usize,
    /// Best candidate ever seen.
    pub best: CandidateSolution,
}

impl Population {
    /// Wraps already evaluated members; `nfe` counts their evaluations.
    pub fn from_members(members: Vec<CandidateSolution>) -> Result<Self> {
        if members.is_empty() || members.iter().any(|m| m.fitness.is_none()) {
            return Err(Error::Contract("population members must be evaluated".into()));
        }
        let best = members[argmin(&members)].clone();
        let nfe = members.len();
        Ok(Self { members, nfe, iter: 1, best })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn best_index(&self) -> usize {
        argmin(&self.members)
    }

    fn refresh_best(&mut self) {
        let i = self.best_index();
        if self.members[i].fitness_or_inf() < self.best.fitness_or_inf() {
            self.best = self.members[i].clone();
        }
    }
}

/// Quasi-opposition jump.
///
/// Builds a quasi-opposite twin of every member (static bounds), evaluates as
/// many twins as `budget` allows, and keeps the `np` best of the union.
/// Returns the number of evaluations spent.
pub fn qobl_population<F>(
    pop: &mut Population,
    objective: &F,
    bounds: &Bounds,
    budget: usize,
    rng: &mut Rng,
) -> usize
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let count = pop.len().min(budget);
    if count == 0 {
        return 0;
    }
    let twins: Vec<Vec<f64>> = pop.members[..count]
        .iter()
        .map(|m| {
            m.params
                .iter()
                .enumerate()
                .map(|(j, &x)| quasi_opposite(x, bounds.lower[j], bounds.upper[j], rng))
                .collect()
        })
        .collect();
    let twins = evaluate(objective, twins);
    let np = pop.len();
    let mut union: Vec<CandidateSolution> = std::mem::take(&mut pop.members);
    union.extend(twins);
    // stable: on equal fitness the incumbent precedes its twin
    union.sort_by(|a, b| a.fitness_or_inf().total_cmp(&b.fitness_or_inf()));
    union.truncate(np);
    pop.members = union;
    pop.nfe += count;
    pop.refresh_best();
    count
}

/// Cluster-crossover step with a given cluster count `k`.
///
/// Centers of a k-means partition (set A) compete with `k` random members
/// (set B, never including the current best) and the `k` best of A ∪ B take
/// the slots of B. Returns the number of evaluations spent.
pub fn cluster_update_with_k<F>(
    pop: &mut Population,
    objective: &F,
    k: usize,
    budget: usize,
    rng: &mut Rng,
) -> Result<usize>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let np = pop.len();
    if k < 2 || k >= np {
        return Err(Error::Parameter(format!("cluster count must be in [2, {}], got {k}", np - 1)));
    }
    let spend = k.min(budget);
    if spend == 0 {
        return Ok(0);
    }
    let points: Vec<Vec<f64>> = pop.members.iter().map(|m| m.params.clone()).collect();
    let clusters = kmeans(&points, k, rng)?;
    let centers: Vec<Vec<f64>> = clusters.centers.into_iter().take(spend).collect();
    let set_a = evaluate(objective, centers);

    let best = pop.best_index();
    let slots: Vec<usize> = sample(rng, np - 1, k)
        .into_iter()
        .map(|i| if i >= best { i + 1 } else { i })
        .collect();

    let mut pool: Vec<CandidateSolution> = slots.iter().map(|&i| pop.members[i].clone()).collect();
    pool.extend(set_a);
    pool.sort_by(|a, b| a.fitness_or_inf().total_cmp(&b.fitness_or_inf()));
    for (slot, winner) in slots.into_iter().zip(pool) {
        pop.members[slot] = winner;
    }
    pop.nfe += spend;
    pop.refresh_best();
    Ok(spend)
}

/// Cluster-crossover step with `k` drawn uniformly from `[2, floor(sqrt(np))]`.
pub fn cluster_update<F>(pop: &mut Population, objective: &F, budget: usize, rng: &mut Rng) -> Result<usize>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let k_max = ((pop.len() as f64).sqrt().floor() as usize).max(2);
    let k = rng.random_range(2..=k_max);
    cluster_update_with_k(pop, objective, k, budget, rng)
}

/// One row of the convergence trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryPoint {
    pub iteration: usize,
    pub nfe: usize,
    pub best_fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodelResult {
    pub best: CandidateSolution,
    /// Best fitness after initialization (iteration 0) and after each iteration.
    pub history: Vec<HistoryPoint>,
    pub nfe: usize,
    pub population: Population,
}

impl CodelResult {
    pub fn best_fitness(&self) -> f64 {
        self.best.fitness_or_inf()
    }
}

/// Minimizes `objective` over `[lower, upper]^dim`.
pub fn run_codel<F>(objective: &F, dim: usize, config: &CodelConfig) -> Result<CodelResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let bounds = Bounds::uniform(dim, config.lower, config.upper);
    run_codel_bounded(objective, &bounds, config)
}

/// [`run_codel`] with per-dimension bounds (`config.lower/upper` are ignored).
pub fn run_codel_bounded<F>(objective: &F, bounds: &Bounds, config: &CodelConfig) -> Result<CodelResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    config.validate()?;
    if bounds.dim() == 0 || bounds.upper.len() != bounds.dim() {
        return Err(Error::Parameter("dimension must be >= 1".into()));
    }
    if bounds.lower.iter().zip(&bounds.upper).any(|(lo, hi)| !(lo < hi)) {
        return Err(Error::Parameter("every lower bound must be below its upper bound".into()));
    }
    let mut init_rng = substream(config.seed, stream::INIT);
    let mut de_rng = substream(config.seed, stream::DE);
    let mut km_rng = substream(config.seed, stream::KMEANS);
    let mut qobl_rng = substream(config.seed, stream::QOBL);
    let mut jump_rng = substream(config.seed, stream::JRAND);
    let np = config.np;

    let initial: Vec<Vec<f64>> = (0..np).map(|_| bounds.sample(&mut init_rng)).collect();
    let mut pop = Population::from_members(evaluate(objective, initial))?;
    qobl_population(&mut pop, objective, bounds, np, &mut qobl_rng);

    let mut history = vec![HistoryPoint { iteration: 0, nfe: pop.nfe, best_fitness: pop.best.fitness_or_inf() }];

    while pop.nfe < config.nfe_max {
        let active = np.min(config.nfe_max - pop.nfe);
        let mut trials = Vec::with_capacity(active);
        for i in 0..active {
            let mutant = mutate(&pop.members, i, config.f, bounds, &mut de_rng)?;
            trials.push(binomial_crossover(&pop.members[i].params, &mutant, config.cr, &mut de_rng));
        }
        let trials = evaluate(objective, trials);
        for (i, trial) in trials.into_iter().enumerate() {
            let target = std::mem::replace(&mut pop.members[i], CandidateSolution::unevaluated(Vec::new()));
            pop.members[i] = select(target, trial)?;
        }
        pop.nfe += active;
        pop.refresh_best();

        if pop.iter % config.cp == 0 {
            let budget = config.nfe_max.saturating_sub(pop.nfe);
            cluster_update(&mut pop, objective, budget, &mut km_rng)?;
        }
        if jump_rng.random::<f64>() < config.jr {
            let budget = config.nfe_max.saturating_sub(pop.nfe);
            qobl_population(&mut pop, objective, bounds, budget, &mut qobl_rng);
        }

        history.push(HistoryPoint {
            iteration: pop.iter,
            nfe: pop.nfe,
            best_fitness: pop.best.fitness_or_inf(),
        });
        pop.iter += 1;
    }

    Ok(CodelResult { best: pop.best.clone(), history, nfe: pop.nfe, population: pop })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    fn rng() -> Rng {
        substream(3, "test")
    }

    #[test]
    fn opposite_examples() {
        assert!((opposite(0.3, 0.0, 1.0) - 0.7).abs() < 1e-15);
        assert_eq!(opposite(0.5, 0.0, 1.0), 0.5);
        assert_eq!(opposite(1.5, 0.0, 1.0), 0.0);
    }

    #[test]
    fn quasi_opposite_ranges() {
        let mut r = rng();
        for _ in 0..1000 {
            let a = quasi_opposite(0.0, 0.0, 1.0, &mut r);
            assert!((0.5..=1.0).contains(&a));
            let b = quasi_opposite(0.9, 0.0, 1.0, &mut r);
            assert!((0.1 - 1e-15..=0.5).contains(&b));
        }
        assert_eq!(quasi_opposite(2.0, -1.0, 5.0, &mut r), 2.0);
    }

    #[test]
    fn mutation_examples() {
        let b = Bounds::uniform(2, -10.0, 10.0);
        assert_eq!(de_rand_1(&[1.0, 1.0], &[2.0, 0.0], &[0.0, 2.0], 0.5, &b), vec![2.0, 0.0]);
        assert_eq!(de_rand_1(&[1.0, 1.0], &[3.0, 4.0], &[3.0, 4.0], 0.5, &b), vec![1.0, 1.0]);
        assert_eq!(de_rand_1(&[1.0, 1.0], &[7.0, 4.0], &[3.0, 9.0], 0.0, &b), vec![1.0, 1.0]);
        assert_eq!(de_rand_1(&[9.0, -9.0], &[9.0, -9.0], &[0.0, 0.0], 1.0, &b), vec![10.0, -10.0]);
    }

    #[test]
    fn mutate_never_uses_target_as_donor() {
        let b = Bounds::uniform(1, -100.0, 100.0);
        // donors are distinct powers of ten; with f = 0 the mutant equals x_r1
        let members: Vec<_> = (0..4).map(|i| CandidateSolution::evaluated(vec![i as f64], 0.0)).collect();
        let mut r = rng();
        for target in 0..4 {
            for _ in 0..50 {
                let m = mutate(&members, target, 1e-300, &b, &mut r).unwrap();
                assert_ne!(m[0] as usize, target);
            }
        }
        assert!(mutate(&members[..3], 0, 0.5, &b, &mut r).is_err());
    }

    #[test]
    fn crossover_examples() {
        let mut r = rng();
        let t = vec![0.0; 6];
        let m = vec![1.0; 6];
        assert_eq!(binomial_crossover(&t, &m, 1.0, &mut r), m);
        for _ in 0..100 {
            let u = binomial_crossover(&t, &m, 0.0, &mut r);
            // rand <= 0 happens with probability ~0, so exactly j_rand survives
            assert_eq!(u.iter().filter(|&&v| v == 1.0).count(), 1);
        }
        assert_eq!(binomial_crossover(&t, &t, 0.3, &mut r), t);
    }

    #[test]
    fn selection_examples() {
        let a = CandidateSolution::evaluated(vec![0.0], 10.0);
        let b = CandidateSolution::evaluated(vec![1.0], 20.0);
        assert_eq!(select(b.clone(), a.clone()).unwrap(), a);
        assert_eq!(select(a.clone(), b.clone()).unwrap(), a);
        let tie = CandidateSolution::evaluated(vec![2.0], 10.0);
        assert_eq!(select(a.clone(), tie.clone()).unwrap(), tie);
        assert!(select(a, CandidateSolution::unevaluated(vec![3.0])).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(CodelConfig::default().validate().is_ok());
        let bad = [
            CodelConfig { np: 3, ..Default::default() },
            CodelConfig { f: 0.0, ..Default::default() },
            CodelConfig { cr: 1.5, ..Default::default() },
            CodelConfig { jr: 0.5, ..Default::default() },
            CodelConfig { cp: 0, ..Default::default() },
            CodelConfig { lower: 1.0, upper: 1.0, ..Default::default() },
            CodelConfig { nfe_max: 10, ..Default::default() },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn qobl_keeps_optimum_and_size() {
        let b = Bounds::uniform(3, -5.0, 5.0);
        let mut r = rng();
        let mut members: Vec<_> = (0..10)
            .map(|_| {
                let p = b.sample(&mut r);
                let f = sphere(&p);
                CandidateSolution::evaluated(p, f)
            })
            .collect();
        members[4] = CandidateSolution::evaluated(vec![0.0; 3], 0.0);
        let mut pop = Population::from_members(members).unwrap();
        let spent = qobl_population(&mut pop, &sphere, &b, usize::MAX, &mut r);
        assert_eq!(spent, 10);
        assert_eq!(pop.len(), 10);
        assert_eq!(pop.nfe, 20);
        assert!(pop.members.iter().any(|m| m.fitness == Some(0.0)));
    }

    #[test]
    fn cluster_update_keeps_best_center() {
        // the best center either survives or loses to members that are better still
        let mut r = rng();
        let offsets = [(-0.1, 0.0), (0.1, 0.0), (0.0, -0.1), (0.0, 0.1)];
        let mut members = Vec::new();
        for (cx, cy) in [(0.0, 0.0), (5.0, 5.0)] {
            for (dx, dy) in offsets {
                let p = vec![cx + dx, cy + dy];
                let f = sphere(&p);
                members.push(CandidateSolution::evaluated(p, f));
            }
        }
        for seed in 0..20 {
            let mut pop = Population::from_members(members.clone()).unwrap();
            let before = pop.best.fitness_or_inf();
            let mut r2 = substream(seed, "cluster");
            let points: Vec<Vec<f64>> = members.iter().map(|m| m.params.clone()).collect();
            let centers = kmeans(&points, 2, &mut r2.clone()).unwrap().centers;
            let best_center = centers.iter().map(|c| sphere(c)).fold(f64::INFINITY, f64::min);
            cluster_update_with_k(&mut pop, &sphere, 2, usize::MAX, &mut r2).unwrap();
            assert_eq!(pop.len(), 8);
            assert_eq!(pop.nfe, 10);
            assert!(pop.best.fitness_or_inf() <= before);
            assert!(pop.best.fitness_or_inf() <= best_center, "seed {seed}");
        }
        assert!(cluster_update_with_k(&mut Population::from_members(members).unwrap(), &sphere, 8, 10, &mut r).is_err());
    }

    #[test]
    fn constant_objective_has_flat_history() {
        let cfg = CodelConfig { nfe_max: 1000, ..Default::default() };
        let res = run_codel(&|_: &[f64]| 0.0, 4, &cfg).unwrap();
        assert_eq!(res.best_fitness(), 0.0);
        assert!(res.history.iter().all(|h| h.best_fitness == 0.0));
        assert_eq!(res.nfe, 1000);
    }
}
