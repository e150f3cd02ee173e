//! Gradient-based refiners started from the evolutionary solution.
//!
//! Six methods share one driver, [`refine`]: resilient propagation (RP),
//! one-step secant (OSS), gradient descent (GD), GD with momentum (GDM),
//! GD with an adaptive rate (GDA) and Polak-Ribière conjugate gradient
//! (CG-PR). All of them descend the mean squared error, while the iterate
//! that is finally returned is chosen by the problem's score (for networks,
//! the classification error).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mlp::{Dataset, MlpTopology};

/// A differentiable objective plus a (possibly non-smooth) selection score.
pub trait Problem {
    fn dim(&self) -> usize;

    fn loss_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>);

    fn loss(&self, x: &[f64]) -> f64 {
        self.loss_and_gradient(x).0
    }

    /// Criterion used to pick the returned iterate; lower is better.
    fn score(&self, x: &[f64]) -> f64 {
        self.loss(x)
    }
}

/// MSE training of a binary MLP, scored by classification error.
#[derive(Debug, Clone, Copy)]
pub struct MlpProblem<'a> {
    pub topology: &'a MlpTopology,
    pub data: &'a Dataset,
}

impl<'a> MlpProblem<'a> {
    pub fn new(topology: &'a MlpTopology, data: &'a Dataset) -> Result<Self> {
        if topology.n_outputs() != 1 {
            return Err(Error::Parameter("local search trains single-output networks".into()));
        }
        if data.n_features() != topology.n_inputs() {
            return Err(Error::Shape { expected: topology.n_inputs(), actual: data.n_features() });
        }
        Ok(Self { topology, data })
    }
}

impl Problem for MlpProblem<'_> {
    fn dim(&self) -> usize {
        self.topology.param_count()
    }

    fn loss_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        self.topology
            .mse_loss_and_gradient(x, self.data)
            .expect("shapes checked at construction")
    }

    fn loss(&self, x: &[f64]) -> f64 {
        self.topology.mse_loss(x, self.data).expect("shapes checked at construction")
    }

    fn score(&self, x: &[f64]) -> f64 {
        self.topology
            .classification_error(x, self.data)
            .expect("shapes checked at construction")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Rp,
    Oss,
    Gd,
    Gdm,
    Gda,
    CgPr,
}

impl Method {
    pub const ALL: [Method; 6] = [Method::Rp, Method::Oss, Method::Gdm, Method::Gda, Method::Gd, Method::CgPr];

    pub fn name(self) -> &'static str {
        match self {
            Method::Rp => "RP",
            Method::Oss => "OSS",
            Method::Gd => "GD",
            Method::Gdm => "GDM",
            Method::Gda => "GDA",
            Method::CgPr => "CG-PR",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        match key.to_ascii_uppercase().as_str() {
            "RP" => Ok(Method::Rp),
            "OSS" => Ok(Method::Oss),
            "GD" => Ok(Method::Gd),
            "GDM" => Ok(Method::Gdm),
            "GDA" => Ok(Method::Gda),
            "CGPR" => Ok(Method::CgPr),
            _ => Err(Error::Parameter(format!(
                "unknown local search method `{s}` (expected RP, OSS, GD, GDM, GDA or CG-PR)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RpParams {
    pub eta_plus: f64,
    pub eta_minus: f64,
    pub delta0: f64,
    pub delta_min: f64,
    pub delta_max: f64,
}

impl Default for RpParams {
    fn default() -> Self {
        Self { eta_plus: 1.2, eta_minus: 0.5, delta0: 0.1, delta_min: 1e-6, delta_max: 50.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GdaParams {
    pub inc: f64,
    pub dec: f64,
    /// Largest tolerated loss ratio before a step is rejected.
    pub max_perf_inc: f64,
}

impl Default for GdaParams {
    fn default() -> Self {
        Self { inc: 1.05, dec: 0.7, max_perf_inc: 1.04 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchParams {
    /// Armijo sufficient-decrease constant.
    pub c1: f64,
    pub shrink: f64,
    pub max_backtracks: usize,
}

impl Default for LineSearchParams {
    fn default() -> Self {
        Self { c1: 1e-4, shrink: 0.5, max_backtracks: 30 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalSearchConfig {
    pub method: Method,
    pub epochs: usize,
    /// Learning rate for GD, GDM and the initial GDA rate.
    pub lr: f64,
    pub momentum: f64,
    pub rp: RpParams,
    pub gda: GdaParams,
    pub line_search: LineSearchParams,
    /// Stop after this many epochs without a better score.
    pub patience: usize,
}

impl Default for LocalSearchConfig {
    fn default() -> Self {
        Self {
            method: Method::CgPr,
            epochs: 500,
            lr: 0.1,
            momentum: 0.9,
            rp: RpParams::default(),
            gda: GdaParams::default(),
            line_search: LineSearchParams::default(),
            patience: 50,
        }
    }
}

impl LocalSearchConfig {
    pub fn with_method(method: Method) -> Self {
        Self { method, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Parameter(m));
        let rp = &self.rp;
        if !(0.0 < rp.eta_minus && rp.eta_minus < 1.0 && 1.0 < rp.eta_plus) {
            return fail(format!("need 0 < eta- < 1 < eta+, got {} and {}", rp.eta_minus, rp.eta_plus));
        }
        if !(0.0 < rp.delta_min && rp.delta_min <= rp.delta0 && rp.delta0 <= rp.delta_max) {
            return fail("need 0 < delta_min <= delta0 <= delta_max".into());
        }
        if !(self.lr > 0.0) {
            return fail(format!("learning rate must be > 0, got {}", self.lr));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return fail(format!("momentum must be in [0, 1), got {}", self.momentum));
        }
        let g = &self.gda;
        if !(g.inc > 1.0 && 0.0 < g.dec && g.dec < 1.0 && g.max_perf_inc >= 1.0) {
            return fail("need gda inc > 1, 0 < dec < 1, max_perf_inc >= 1".into());
        }
        let ls = &self.line_search;
        if !(0.0 < ls.c1 && ls.c1 < 1.0 && 0.0 < ls.shrink && ls.shrink < 1.0) {
            return fail("line search needs c1 and shrink in (0, 1)".into());
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(x: &[f64], a: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(xi, di)| xi + a * di).collect()
}

/// Plain gradient step `w <- w - a g`.
pub fn step_gd(weights: &mut [f64], gradient: &[f64], a: f64) {
    for (w, g) in weights.iter_mut().zip(gradient) {
        *w -= a * g;
    }
}

/// Per-weight step sizes and the previous gradient for RPROP.
#[derive(Debug, Clone, PartialEq)]
pub struct RpState {
    pub delta: Vec<f64>,
    pub prev_grad: Vec<f64>,
}

impl RpState {
    pub fn new(dim: usize, params: &RpParams) -> Self {
        Self { delta: vec![params.delta0; dim], prev_grad: vec![0.0; dim] }
    }

    /// Adapts step sizes from the gradient sign agreement, then moves each
    /// weight against its gradient sign (no backtracking on sign flips).
    pub fn step(&mut self, weights: &mut [f64], gradient: &[f64], params: &RpParams) {
        for j in 0..weights.len() {
            let agreement = gradient[j] * self.prev_grad[j];
            if agreement > 0.0 {
                self.delta[j] = (self.delta[j] * params.eta_plus).min(params.delta_max);
            } else if agreement < 0.0 {
                self.delta[j] = (self.delta[j] * params.eta_minus).max(params.delta_min);
            }
            if gradient[j] < 0.0 {
                weights[j] += self.delta[j];
            } else if gradient[j] > 0.0 {
                weights[j] -= self.delta[j];
            }
            self.prev_grad[j] = gradient[j];
        }
    }
}

/// Momentum buffer for GDM.
#[derive(Debug, Clone, PartialEq)]
pub struct GdmState {
    pub dm: Vec<f64>,
}

impl GdmState {
    pub fn new(dim: usize) -> Self {
        Self { dm: vec![0.0; dim] }
    }

    /// `dM <- y dM + a (1 - y) g`, then `w <- w - dM`.
    pub fn step(&mut self, weights: &mut [f64], gradient: &[f64], a: f64, y: f64) {
        for ((w, dm), g) in weights.iter_mut().zip(self.dm.iter_mut()).zip(gradient) {
            *dm = y * *dm + a * (1.0 - y) * g;
            *w -= *dm;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GdaDecision {
    Accept,
    Revert,
}

/// Adaptive learning rate for GDA.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GdaState {
    pub lr: f64,
}

impl GdaState {
    /// Grows the rate after an improvement, shrinks it and rejects the step
    /// when the loss rose by more than the tolerated ratio.
    pub fn step(&mut self, loss_now: f64, loss_prev: f64, params: &GdaParams) -> GdaDecision {
        if loss_now < loss_prev {
            self.lr *= params.inc;
            GdaDecision::Accept
        } else if loss_now > loss_prev * params.max_perf_inc || !loss_now.is_finite() {
            self.lr *= params.dec;
            GdaDecision::Revert
        } else {
            GdaDecision::Accept
        }
    }
}

/// Previous step and gradient change for the one-step secant direction.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OssState {
    pub prev_step: Option<Vec<f64>>,
    pub grad_change: Option<Vec<f64>>,
}

impl OssState {
    /// `d = -g + A s + B y` with `B = s.g / s.y` and
    /// `A = -(1 + y.y / s.y) B + y.g / s.y`; falls back to `-g` on the first
    /// call or when `|s.y| < 1e-12`.
    pub fn direction(&self, g: &[f64]) -> Vec<f64> {
        let steepest = || g.iter().map(|v| -v).collect();
        let (Some(s), Some(y)) = (&self.prev_step, &self.grad_change) else {
            return steepest();
        };
        let sy = dot(s, y);
        if sy.abs() < 1e-12 {
            return steepest();
        }
        let b = dot(s, g) / sy;
        let a = -(1.0 + dot(y, y) / sy) * b + dot(y, g) / sy;
        g.iter()
            .zip(s.iter().zip(y))
            .map(|(gi, (si, yi))| -gi + a * si + b * yi)
            .collect()
    }

    pub fn record(&mut self, step: Vec<f64>, grad_change: Vec<f64>) {
        self.prev_step = Some(step);
        self.grad_change = Some(grad_change);
    }

    pub fn reset(&mut self) {
        *self = Self::default();
    }
}

/// History for Polak-Ribière conjugate directions.
#[derive(Debug, Clone, PartialEq)]
pub struct CgPrState {
    pub prev_grad: Option<Vec<f64>>,
    pub prev_dir: Option<Vec<f64>>,
    pub since_restart: usize,
    /// Force a steepest-descent restart after this many directions.
    pub restart_period: usize,
}

impl CgPrState {
    pub fn new(restart_period: usize) -> Self {
        Self { prev_grad: None, prev_dir: None, since_restart: 0, restart_period: restart_period.max(1) }
    }

    /// `p = -g + beta p_prev` with `beta = (g - g_prev).g / |g_prev|^2`,
    /// clipped at zero. Records `g` and the returned direction.
    pub fn direction(&mut self, g: &[f64]) -> Vec<f64> {
        let mut p: Vec<f64> = g.iter().map(|v| -v).collect();
        let restart = self.since_restart >= self.restart_period;
        if let (Some(gp), Some(pp), false) = (&self.prev_grad, &self.prev_dir, restart) {
            let denom = dot(gp, gp);
            if denom == 0.0 {
                return vec![0.0; g.len()];
            }
            let num: f64 = g.iter().zip(gp).map(|(gk, gk1)| (gk - gk1) * gk).sum();
            let beta = (num / denom).max(0.0);
            for (pi, ppi) in p.iter_mut().zip(pp) {
                *pi += beta * ppi;
            }
            self.since_restart += 1;
        } else {
            self.since_restart = 1;
        }
        self.prev_grad = Some(g.to_vec());
        self.prev_dir = Some(p.clone());
        p
    }

    pub fn reset(&mut self) {
        self.prev_grad = None;
        self.prev_dir = None;
        self.since_restart = 0;
    }

    /// Overwrites the stored direction, e.g. after a steepest-descent reset.
    pub fn replace_direction(&mut self, p: &[f64]) {
        self.prev_dir = Some(p.to_vec());
    }
}

/// Armijo backtracking along `d` from `x`: the largest `a` in
/// `1, shrink, shrink^2, ...` with `f(x + a d) <= f(x) + c1 a g.d`, or 0.
pub fn backtracking_line_search<F>(
    f: F,
    x: &[f64],
    fx: f64,
    d: &[f64],
    g: &[f64],
    params: &LineSearchParams,
) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let slope = dot(g, d);
    if !(slope < 0.0) {
        return Err(Error::Contract(format!("line search needs a descent direction (g.d = {slope})")));
    }
    let mut a = 1.0;
    for _ in 0..=params.max_backtracks {
        let trial = f(&axpy(x, a, d));
        if trial <= fx + params.c1 * a * slope {
            return Ok(a);
        }
        a *= params.shrink;
    }
    Ok(0.0)
}

/// One epoch of the refinement trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub mse: f64,
    pub classification_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefineResult {
    pub params: Vec<f64>,
    /// Score of the returned iterate (classification error for networks).
    pub final_train_error: f64,
    pub final_mse: f64,
    pub initial_train_error: f64,
    pub initial_mse: f64,
    /// MSE after each epoch actually run.
    pub loss_history: Vec<f64>,
    pub trace: Vec<EpochRecord>,
}

struct Best {
    score: f64,
    loss: f64,
    params: Vec<f64>,
}

/// Trains an MLP from `initial` with the configured method.
pub fn refine(
    initial: &[f64],
    topology: &MlpTopology,
    data: &Dataset,
    config: &LocalSearchConfig,
) -> Result<RefineResult> {
    let problem = MlpProblem::new(topology, data)?;
    refine_problem(&problem, initial, config)
}

/// Runs the configured method on any [`Problem`].
///
/// The returned iterate minimizes `(score, loss)` lexicographically among
/// the iterates whose loss does not exceed the starting loss, so it is never
/// worse than `initial` on either criterion's primary ordering.
pub fn refine_problem<P: Problem>(problem: &P, initial: &[f64], config: &LocalSearchConfig) -> Result<RefineResult> {
    config.validate()?;
    if initial.len() != problem.dim() {
        return Err(Error::Shape { expected: problem.dim(), actual: initial.len() });
    }
    let dim = initial.len();
    let mut x = initial.to_vec();
    let (mut loss, mut grad) = problem.loss_and_gradient(&x);
    let start_score = problem.score(&x);
    let start_loss = loss;
    let mut best = Best { score: start_score, loss, params: x.clone() };
    let mut best_score_seen = start_score;
    let mut stale = 0;

    let mut rp = RpState::new(dim, &config.rp);
    let mut gdm = GdmState::new(dim);
    let mut gda = GdaState { lr: config.lr };
    let mut oss = OssState::default();
    let mut cg = CgPrState::new(dim);
    let mut trace = Vec::new();

    for epoch in 1..=config.epochs {
        if grad.iter().all(|g| *g == 0.0) {
            break;
        }
        match config.method {
            Method::Gd => step_gd(&mut x, &grad, config.lr),
            Method::Gdm => gdm.step(&mut x, &grad, config.lr, config.momentum),
            Method::Rp => rp.step(&mut x, &grad, &config.rp),
            Method::Gda => {
                let mut candidate = x.clone();
                step_gd(&mut candidate, &grad, gda.lr);
                let cand_loss = problem.loss(&candidate);
                if gda.step(cand_loss, loss, &config.gda) == GdaDecision::Accept {
                    x = candidate;
                }
            }
            Method::Oss | Method::CgPr => {
                let mut d = if config.method == Method::Oss { oss.direction(&grad) } else { cg.direction(&grad) };
                if !(dot(&grad, &d) < 0.0) {
                    d = grad.iter().map(|v| -v).collect();
                    oss.reset();
                    cg.replace_direction(&d);
                    if !(dot(&grad, &d) < 0.0) {
                        // |g|^2 underflows: numerically stationary
                        break;
                    }
                }
                let a = backtracking_line_search(|z| problem.loss(z), &x, loss, &d, &grad, &config.line_search)?;
                if a == 0.0 {
                    oss.reset();
                    cg.reset();
                } else {
                    let step: Vec<f64> = d.iter().map(|v| a * v).collect();
                    x.iter_mut().zip(&step).for_each(|(xi, si)| *xi += si);
                    let (new_loss, new_grad) = problem.loss_and_gradient(&x);
                    if config.method == Method::Oss {
                        let change = new_grad.iter().zip(&grad).map(|(n, o)| n - o).collect();
                        oss.record(step, change);
                    }
                    loss = new_loss;
                    grad = new_grad;
                }
            }
        }
        if !matches!(config.method, Method::Oss | Method::CgPr) {
            let (l, g) = problem.loss_and_gradient(&x);
            loss = l;
            grad = g;
        }
        if !x.iter().all(|v| v.is_finite()) || !loss.is_finite() {
            break;
        }
        let score = problem.score(&x);
        trace.push(EpochRecord { epoch, mse: loss, classification_error: score });

        if loss <= start_loss && (score < best.score || (score == best.score && loss < best.loss)) {
            best = Best { score, loss, params: x.clone() };
        }
        if score < best_score_seen {
            best_score_seen = score;
            stale = 0;
        } else {
            stale += 1;
            if stale >= config.patience {
                break;
            }
        }
    }

    Ok(RefineResult {
        params: best.params,
        final_train_error: best.score,
        final_mse: best.loss,
        initial_train_error: start_score,
        initial_mse: start_loss,
        loss_history: trace.iter().map(|r| r.mse).collect(),
        trace,
    })
}
