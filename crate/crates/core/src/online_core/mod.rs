//! Single-pass online algorithms for offline LPs.
//!
//! Columns are visited once in a uniformly random order. Each visit performs a
//! stochastic step on the finite-sum dual
//!
//! ```text
//! min_{y ≥ 0}  Σ_j ⟨d, y⟩ + u_j [c_j − ⟨a_j, y⟩]_+ ,   d = b / n
//! ```
//!
//! and records a primal estimate for the visited column: a 0/u indicator for
//! the explicit (subgradient) step, a multiplier in `[0, u]` for the implicit
//! (proximal) step. Duplicating every column `K` times and averaging the copies
//! refines the granularity of the estimate.

mod implicit;
mod projection;

pub use implicit::{implicit_step, kkt_residual, prox_objective, ProxCase, ProxColumn, ProximalSolution, KKT_TOL};
pub use projection::{project_weighted_simplex, Projection, PROJECTION_TOL};

use rand::seq::SliceRandom;

use crate::error::{check_len, Error, Result};
use crate::lp_model::{compute_stats, constraint_violation, Column, InstanceStats, LpInstance};
use crate::rng::{stream_rng, PERMUTATION_STREAM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Explicit,
    Implicit,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Explicit => "explicit",
            Method::Implicit => "implicit",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "explicit" => Ok(Method::Explicit),
            "implicit" => Ok(Method::Implicit),
            other => Err(Error::InvalidConfig(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepsizeMode {
    /// `1/√(Kmn)`.
    Simple,
    /// Constant balancing the gap and violation bounds from the data statistics.
    TheoremOptimal,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum StartPoint {
    Zero,
    Ones,
    Given(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DuplicationLayout {
    /// One uniform permutation of all `nK` copies.
    Shuffled,
    /// `K` consecutive blocks, each an independent permutation of the `n` columns.
    Blocks,
}

impl std::fmt::Display for StepsizeMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StepsizeMode::Simple => f.write_str("simple"),
            StepsizeMode::TheoremOptimal => f.write_str("theorem"),
            StepsizeMode::Fixed(g) => write!(f, "{g:?}"),
        }
    }
}

/// `simple`, `theorem`, or a positive number.
impl std::str::FromStr for StepsizeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple" => Ok(StepsizeMode::Simple),
            "theorem" => Ok(StepsizeMode::TheoremOptimal),
            other => match other.parse::<f64>() {
                Ok(g) if g > 0.0 && g.is_finite() => Ok(StepsizeMode::Fixed(g)),
                _ => Err(Error::InvalidConfig(format!(
                    "stepsize must be simple, theorem or a positive number, got {other:?}"
                ))),
            },
        }
    }
}

impl std::str::FromStr for StartPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(StartPoint::Zero),
            "ones" => Ok(StartPoint::Ones),
            other => Err(Error::InvalidConfig(format!("start must be zero or ones, got {other:?}"))),
        }
    }
}

impl std::fmt::Display for StartPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StartPoint::Zero => f.write_str("zero"),
            StartPoint::Ones => f.write_str("ones"),
            StartPoint::Given(y) => write!(f, "given({} entries)", y.len()),
        }
    }
}

impl std::str::FromStr for DuplicationLayout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shuffled" => Ok(DuplicationLayout::Shuffled),
            "blocks" => Ok(DuplicationLayout::Blocks),
            other => Err(Error::InvalidConfig(format!("layout must be shuffled or blocks, got {other:?}"))),
        }
    }
}

impl std::fmt::Display for DuplicationLayout {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DuplicationLayout::Shuffled => "shuffled",
            DuplicationLayout::Blocks => "blocks",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub method: Method,
    pub stepsize: StepsizeMode,
    pub duplication_k: usize,
    pub seed: u64,
    /// Only accept a column while the remaining capacity stays nonnegative.
    pub enforce_feasibility: bool,
    pub start: StartPoint,
    /// Use the O(nnz) explicit pass.
    pub lazy: bool,
    pub layout: DuplicationLayout,
    /// Reject instances with a nonpositive resource rate.
    pub require_positive_rate: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            method: Method::Explicit,
            stepsize: StepsizeMode::Simple,
            duplication_k: 1,
            seed: 0,
            enforce_feasibility: false,
            start: StartPoint::Zero,
            lazy: false,
            layout: DuplicationLayout::Shuffled,
            require_positive_rate: true,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.duplication_k == 0 {
            return Err(Error::InvalidConfig("duplication factor K must be at least 1".into()));
        }
        if let StepsizeMode::Fixed(g) = self.stepsize {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::InvalidConfig(format!("fixed stepsize must be positive, got {g}")));
            }
        }
        if self.lazy && self.method != Method::Explicit {
            return Err(Error::InvalidConfig("lazy passes exist only for the explicit update".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OnlineSolution {
    pub x_hat: Vec<f64>,
    pub y_final: Vec<f64>,
    pub objective: f64,
    pub violation: f64,
    pub gamma: f64,
    /// `max_k ‖y^k‖`, tracked by the dense passes only.
    pub max_dual_norm: Option<f64>,
    /// `max_k ‖y^{k+1} − y^k‖`, tracked by the dense passes only.
    pub max_dual_step: Option<f64>,
    /// Number of column visits, `nK`.
    pub elapsed_columns: usize,
}

/// Stepsize for a pass over `n·K` columns.
pub fn default_stepsize(
    stats: &InstanceStats,
    m: usize,
    n: usize,
    k: usize,
    method: Method,
    mode: StepsizeMode,
) -> Result<f64> {
    let gamma = match mode {
        StepsizeMode::Fixed(g) => g,
        StepsizeMode::Simple => 1.0 / ((k * m * n) as f64).sqrt(),
        StepsizeMode::TheoremOptimal => {
            if stats.d_lo <= 0.0 {
                return Err(Error::NonpositiveRate(stats.d_lo));
            }
            let spread = stats.a_bar + stats.d_hi;
            let factor = match method {
                Method::Explicit => 1.0,
                Method::Implicit => 5.0,
            };
            (2.0 * stats.c_bar / (factor * stats.d_lo * spread * spread * (m * n * k) as f64)).sqrt()
        }
    };
    if gamma > 0.0 && gamma.is_finite() {
        Ok(gamma)
    } else {
        Err(Error::InvalidConfig(format!("stepsize must be positive, got {gamma}")))
    }
}

/// Upper bounds on the dual trajectory for a constant stepsize.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualIterateBounds {
    /// Bound on every `‖y^k‖`.
    pub norm: f64,
    /// Bound on every `‖y^{k+1} − y^k‖` (implicit update only).
    pub step: Option<f64>,
    /// The bounds hold when `‖y^1‖` does not exceed this value.
    pub start_radius: f64,
}

pub fn dual_iterate_bounds(stats: &InstanceStats, m: usize, gamma: f64, method: Method) -> DualIterateBounds {
    let spread = stats.a_bar + stats.d_hi;
    let m = m as f64;
    let drift = m.sqrt() * spread * gamma;
    let (mult, step) = match method {
        Method::Explicit => (1.0, None),
        Method::Implicit => (3.0, Some(drift)),
    };
    DualIterateBounds {
        norm: mult * m * spread * spread * gamma / stats.d_lo + drift + stats.c_bar / stats.d_lo,
        step,
        start_radius: (mult * m * spread * spread * gamma + 2.0 * stats.c_bar) / (2.0 * stats.d_lo),
    }
}

/// Whether `a` still fits into `remaining` at level `x`. Only rows where the
/// column consumes capacity are checked.
fn fits(col: Column<'_>, x: f64, remaining: &[f64]) -> bool {
    col.iter().all(|(i, a)| a <= 0.0 || remaining[i] - a * x >= 0.0)
}

/// Largest level in `[0, x]` that keeps `remaining` nonnegative on consumed rows.
fn feasible_level(col: Column<'_>, x: f64, remaining: &[f64]) -> f64 {
    col.iter()
        .filter(|&(_, a)| a > 0.0)
        .fold(x, |lvl, (i, a)| lvl.min(remaining[i] / a))
        .max(0.0)
}

fn consume(col: Column<'_>, x: f64, remaining: &mut [f64]) {
    for (i, a) in col.iter() {
        remaining[i] -= a * x;
    }
}

/// Primal decision of the explicit update: take the column when it prices
/// strictly positive and, if feasibility is enforced, still fits.
pub fn explicit_decision(col: Column<'_>, c: f64, upper: f64, y: &[f64], remaining: Option<&[f64]>) -> f64 {
    let priced_in = c > col.dot(y);
    let fits = remaining.is_none_or(|r| fits(col, upper, r));
    if priced_in && fits {
        upper
    } else {
        0.0
    }
}

/// Explicit subgradient step `y⁺ = [y + γ(a x − d)]_+` in floating point.
/// Returns `(y⁺, x)`.
pub fn explicit_step(
    y: &[f64],
    col: Column<'_>,
    c: f64,
    upper: f64,
    d: &[f64],
    gamma: f64,
    remaining: Option<&[f64]>,
) -> (Vec<f64>, f64) {
    let x = explicit_decision(col, c, upper, y, remaining);
    let mut next: Vec<f64> = y.iter().zip(d).map(|(y, d)| y - gamma * d).collect();
    if x != 0.0 {
        for (i, a) in col.iter() {
            next[i] = y[i] + gamma * (a * x - d[i]);
        }
    }
    next.iter_mut().for_each(|v| *v = v.max(0.0));
    (next, x)
}

/// Fixed-point dual coordinates with `2^-72` resolution, used by the explicit
/// passes. Integer arithmetic makes the drift recursion
/// `[[y − s]_+ − s]_+ = [y − 2s]_+` exact, so the dense and lazy passes agree
/// bit for bit.
mod fixed {
    const SCALE: f64 = 4722366482869645213696.0; // 2^72

    pub fn from_f64(v: f64) -> i128 {
        (v * SCALE).round() as i128
    }

    pub fn to_f64(u: i128) -> f64 {
        u as f64 / SCALE
    }
}

struct PassSetup {
    m: usize,
    n: usize,
    k: usize,
    gamma: f64,
    d: Vec<f64>,
    y0: Vec<f64>,
    order: Vec<u32>,
    stats: InstanceStats,
}

fn setup(inst: &LpInstance, cfg: &RunConfig) -> Result<PassSetup> {
    cfg.validate()?;
    let (m, n, k) = (inst.num_rows(), inst.num_cols(), cfg.duplication_k);
    if let Some(j) = inst.upper().iter().position(|u| !u.is_finite()) {
        return Err(Error::InfiniteUpperBound(j));
    }
    let stats = compute_stats(inst);
    if cfg.require_positive_rate && !stats.assumptions_ok {
        return Err(Error::NonpositiveRate(stats.d_lo));
    }
    let gamma = default_stepsize(&stats, m, n, k, cfg.method, cfg.stepsize)?;
    let d = inst.rhs().iter().map(|b| b / n as f64).collect();
    let y0 = match &cfg.start {
        StartPoint::Zero => vec![0.0; m],
        StartPoint::Ones => vec![1.0; m],
        StartPoint::Given(y) => {
            check_len(m, y.len())?;
            if y.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::InvalidConfig("start point must be finite and nonnegative".into()));
            }
            y.clone()
        }
    };
    let order = permutation(n, k, cfg.seed, cfg.layout)?;
    Ok(PassSetup { m, n, k, gamma, d, y0, order, stats })
}

/// Visiting order over `n·K` copies; copy `c` of column `j` has index `c·n + j`.
pub fn permutation(n: usize, k: usize, seed: u64, layout: DuplicationLayout) -> Result<Vec<u32>> {
    let total = n
        .checked_mul(k)
        .filter(|&t| t <= u32::MAX as usize)
        .ok_or_else(|| Error::InvalidConfig(format!("n·K = {n}·{k} is too large")))?;
    let mut rng = stream_rng(seed, PERMUTATION_STREAM);
    match layout {
        DuplicationLayout::Shuffled => {
            let mut order: Vec<u32> = (0..total as u32).collect();
            order.shuffle(&mut rng);
            Ok(order)
        }
        DuplicationLayout::Blocks => {
            let mut order = Vec::with_capacity(total);
            for block in 0..k {
                let mut part: Vec<u32> = (0..n as u32).collect();
                part.shuffle(&mut rng);
                order.extend(part.into_iter().map(|j| j + (block * n) as u32));
            }
            Ok(order)
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn finish(
    inst: &LpInstance,
    s: &PassSetup,
    mut x_sum: Vec<f64>,
    y_final: Vec<f64>,
    max_norm: Option<f64>,
    max_step: Option<f64>,
) -> Result<OnlineSolution> {
    let kf = s.k as f64;
    for (x, &u) in x_sum.iter_mut().zip(inst.upper()) {
        *x = (*x / kf).clamp(0.0, u);
    }
    let objective = inst.objective(&x_sum)?;
    let violation = constraint_violation(inst, &x_sum)?;
    Ok(OnlineSolution {
        x_hat: x_sum,
        y_final,
        objective,
        violation,
        gamma: s.gamma,
        max_dual_norm: max_norm,
        max_dual_step: max_step,
        elapsed_columns: s.order.len(),
    })
}

/// Checks the trajectory bounds when their hypotheses hold (unit bounds,
/// positive rates, start inside the invariant ball). Used as a debug assertion.
fn debug_check_bounds(inst: &LpInstance, s: &PassSetup, method: Method, max_norm: f64, max_step: f64) {
    if !cfg!(debug_assertions) || !inst.has_unit_upper() || !s.stats.assumptions_ok {
        return;
    }
    let b = dual_iterate_bounds(&s.stats, s.m, s.gamma, method);
    let slack = 1e-9 * (1.0 + b.norm);
    if norm(&s.y0) <= b.start_radius {
        debug_assert!(max_norm <= b.norm + slack, "dual norm {max_norm} exceeds bound {}", b.norm);
    }
    if let Some(step) = b.step {
        debug_assert!(max_step <= step * (1.0 + 1e-9) + 1e-12, "dual step {max_step} exceeds bound {step}");
    }
}

/// One online pass (Algorithm with duplication factor `cfg.duplication_k`).
pub fn run_pass(inst: &LpInstance, cfg: &RunConfig) -> Result<OnlineSolution> {
    match (cfg.method, cfg.lazy) {
        (Method::Explicit, true) => lazy_explicit_pass(inst, cfg),
        (Method::Explicit, false) => dense_explicit_pass(inst, cfg),
        (Method::Implicit, _) => implicit_pass(inst, cfg),
    }
}

/// Same as [`run_pass`]; duplication is always driven by `cfg.duplication_k`.
pub fn run_duplicated(inst: &LpInstance, cfg: &RunConfig) -> Result<OnlineSolution> {
    run_pass(inst, cfg)
}

fn dense_explicit_pass(inst: &LpInstance, cfg: &RunConfig) -> Result<OnlineSolution> {
    let s = setup(inst, cfg)?;
    let (m, n) = (s.m, s.n);
    let steps: Vec<i128> = s.d.iter().map(|d| fixed::from_f64(s.gamma * d)).collect();
    let mut y: Vec<i128> = s.y0.iter().map(|&v| fixed::from_f64(v)).collect();
    let mut y_real: Vec<f64> = y.iter().map(|&u| fixed::to_f64(u)).collect();
    let mut remaining: Option<Vec<f64>> = cfg
        .enforce_feasibility
        .then(|| inst.rhs().iter().map(|b| b * s.k as f64).collect());
    let mut x_sum = vec![0.0; n];
    let mut max_norm = norm(&y_real);
    let mut max_step = 0.0_f64;
    let mut touched = vec![0_i128; m];

    for &idx in &s.order {
        let j = idx as usize % n;
        let col = inst.column(j);
        let x = explicit_decision(col, inst.obj()[j], inst.upper()[j], &y_real, remaining.as_deref());
        if x != 0.0 {
            if let Some(r) = remaining.as_mut() {
                consume(col, x, r);
            }
            x_sum[j] += x;
            for (i, a) in col.iter() {
                touched[i] = fixed::from_f64(s.gamma * a * x);
            }
        }
        let mut step_sq = 0.0;
        for i in 0..m {
            let next = (y[i] + touched[i] - steps[i]).max(0);
            touched[i] = 0;
            let next_real = fixed::to_f64(next);
            let delta = next_real - y_real[i];
            step_sq += delta * delta;
            y[i] = next;
            y_real[i] = next_real;
        }
        max_norm = max_norm.max(norm(&y_real));
        max_step = max_step.max(step_sq.sqrt());
    }
    debug_check_bounds(inst, &s, Method::Explicit, max_norm, max_step);
    finish(inst, &s, x_sum, y_real, Some(max_norm), Some(max_step))
}

/// Explicit pass in `O(nnz(A)·K + m)` time.
///
/// Each dual coordinate stores its value at the last visit of a column touching
/// it; between touches it only drifts by `−γd_i` per visit, so its current value
/// is `[y_base − (k − last)·γd_i]_+`, materialized only when needed.
pub fn lazy_explicit_pass(inst: &LpInstance, cfg: &RunConfig) -> Result<OnlineSolution> {
    if cfg.method != Method::Explicit {
        return Err(Error::InvalidConfig("lazy passes exist only for the explicit update".into()));
    }
    let s = setup(inst, cfg)?;
    let n = s.n;
    let steps: Vec<i128> = s.d.iter().map(|d| fixed::from_f64(s.gamma * d)).collect();
    let mut base: Vec<i128> = s.y0.iter().map(|&v| fixed::from_f64(v)).collect();
    let mut last = vec![0_usize; s.m];
    // Materialized values of the coordinates touched by the current column.
    let mut y_real: Vec<f64> = base.iter().map(|&u| fixed::to_f64(u)).collect();
    let mut remaining: Option<Vec<f64>> = cfg
        .enforce_feasibility
        .then(|| inst.rhs().iter().map(|b| b * s.k as f64).collect());
    let mut x_sum = vec![0.0; n];

    let materialize = |base: i128, since: usize, now: usize, step: i128| -> i128 {
        (base - (now - since) as i128 * step).max(0)
    };

    for (k, &idx) in s.order.iter().enumerate() {
        let j = idx as usize % n;
        let col = inst.column(j);
        for &i in col.rows {
            base[i] = materialize(base[i], last[i], k, steps[i]);
            last[i] = k;
            y_real[i] = fixed::to_f64(base[i]);
        }
        let x = explicit_decision(col, inst.obj()[j], inst.upper()[j], &y_real, remaining.as_deref());
        if x != 0.0 {
            if let Some(r) = remaining.as_mut() {
                consume(col, x, r);
            }
            x_sum[j] += x;
        }
        for (i, a) in col.iter() {
            let gain = if x != 0.0 { fixed::from_f64(s.gamma * a * x) } else { 0 };
            base[i] = (base[i] + gain - steps[i]).max(0);
            last[i] = k + 1;
        }
    }
    let total = s.order.len();
    let y_final: Vec<f64> = (0..s.m)
        .map(|i| fixed::to_f64(materialize(base[i], last[i], total, steps[i])))
        .collect();
    finish(inst, &s, x_sum, y_final, None, None)
}

fn implicit_pass(inst: &LpInstance, cfg: &RunConfig) -> Result<OnlineSolution> {
    let s = setup(inst, cfg)?;
    let n = s.n;
    let mut y = s.y0.clone();
    let mut remaining: Option<Vec<f64>> = cfg
        .enforce_feasibility
        .then(|| inst.rhs().iter().map(|b| b * s.k as f64).collect());
    let mut x_sum = vec![0.0; n];
    let mut max_norm = norm(&y);
    let mut max_step = 0.0_f64;

    for &idx in &s.order {
        let j = idx as usize % n;
        let col = ProxColumn {
            a: inst.column(j),
            c: inst.obj()[j],
            upper: inst.upper()[j],
        };
        let sol = implicit_step(&y, col, &s.d, s.gamma)?;
        let mut x = sol.x;
        if let Some(r) = remaining.as_mut() {
            x = feasible_level(col.a, x, r);
            consume(col.a, x, r);
        }
        x_sum[j] += x;
        let step = y.iter().zip(&sol.y_plus).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        max_step = max_step.max(step);
        y = sol.y_plus;
        max_norm = max_norm.max(norm(&y));
    }
    debug_check_bounds(inst, &s, Method::Implicit, max_norm, max_step);
    finish(inst, &s, x_sum, y, Some(max_norm), Some(max_step))
}
