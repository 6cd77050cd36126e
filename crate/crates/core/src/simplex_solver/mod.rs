//! Exact LP solves: a bounded-variable primal revised simplex and a
//! vertex-enumeration oracle for tiny instances.
//!
//! The simplex works on `Ax + s = b` with one slack per row. Rows with
//! `b_i < 0` get an artificial column `−e_i` and a phase 1 that maximizes
//! `−Σ t`. Nonbasic variables sit at either bound, so `x ≤ u` needs no extra
//! rows. The basis inverse is kept dense and updated by eta steps, with a full
//! refactorization every [`SimplexOptions::refactor_interval`] pivots.

mod dense;
mod oracle;

pub use oracle::{enumerate_vertices_oracle, ORACLE_SIZE_LIMIT};

use crate::error::{Error, Result};
use crate::lp_model::LpInstance;

/// Reduced-cost tolerance, scaled by `1 + |c_k|`.
pub const OPT_TOL: f64 = 1e-9;
/// Primal feasibility tolerance, scaled by `1 + ‖b‖∞`.
pub const FEAS_TOL: f64 = 1e-7;
const PIVOT_TOL: f64 = 1e-9;
const STEP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimplexStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarId {
    Col(usize),
    Slack(usize),
}

/// A simplex basis: one basic variable per row plus the structural columns
/// that are nonbasic at their upper bound.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Basis {
    pub basic: Vec<VarId>,
    pub at_upper: Vec<usize>,
}

impl Basis {
    pub fn basic_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.basic.iter().filter_map(|v| match v {
            VarId::Col(j) => Some(*j),
            VarId::Slack(_) => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub status: SimplexStatus,
    pub x_star: Option<Vec<f64>>,
    pub y_star: Option<Vec<f64>>,
    /// `⟨c, x*⟩` when optimal; `+∞` when unbounded, `−∞` when infeasible.
    pub obj: f64,
    pub basis: Basis,
    /// Pivots plus bound flips.
    pub iterations: usize,
    /// The supplied warm basis was usable.
    pub warm_started: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOptions {
    /// Defaults to `50·(m+n)`.
    pub max_iterations: Option<usize>,
    pub refactor_interval: usize,
    /// Consecutive degenerate steps before switching to Bland's rule.
    pub bland_threshold: usize,
    pub max_rows: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iterations: None,
            refactor_interval: 100,
            bland_threshold: 50,
            max_rows: 2000,
        }
    }
}

pub fn solve_lp(inst: &LpInstance, warm: Option<&Basis>) -> Result<SimplexResult> {
    solve_lp_with(inst, warm, &SimplexOptions::default())
}

pub fn solve_lp_with(inst: &LpInstance, warm: Option<&Basis>, opts: &SimplexOptions) -> Result<SimplexResult> {
    let (m, n) = (inst.num_rows(), inst.num_cols());
    if m > opts.max_rows {
        return Err(Error::InvalidConfig(format!("{m} rows exceed the dense solver limit {}", opts.max_rows)));
    }
    let max_iter = opts.max_iterations.unwrap_or(50 * (m + n));
    if let Some(basis) = warm {
        if let Some(mut s) = Solver::warm(inst, basis, opts)? {
            let status = s.run(max_iter)?;
            return Ok(s.result(status));
        }
    }
    let mut s = Solver::cold(inst, opts);
    if !s.art_rows.is_empty() {
        match s.run(max_iter)? {
            SimplexStatus::Optimal => {}
            SimplexStatus::IterationLimit => return Ok(s.result(SimplexStatus::IterationLimit)),
            other => unreachable!("phase 1 ended with {other:?}"),
        }
        let infeas: f64 = (n + m..s.nvars).map(|k| s.x[k].max(0.0)).sum();
        let b_inf = inst.rhs().iter().fold(0.0_f64, |a, b| a.max(b.abs()));
        if infeas > FEAS_TOL * (1.0 + b_inf) {
            return Ok(s.result(SimplexStatus::Infeasible));
        }
        s.end_phase_one()?;
    }
    let status = s.run(max_iter)?;
    Ok(s.result(status))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Basic(usize),
    Lower,
    Upper,
}

struct Solver<'a> {
    inst: &'a LpInstance,
    opts: &'a SimplexOptions,
    m: usize,
    n: usize,
    nvars: usize,
    art_rows: Vec<usize>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    state: Vec<State>,
    basic: Vec<usize>,
    x: Vec<f64>,
    binv: Vec<f64>,
    iterations: usize,
    since_refactor: usize,
    degenerate_run: usize,
    bland: bool,
    fresh: bool,
    phase_one: bool,
    warm_started: bool,
}

impl<'a> Solver<'a> {
    fn base(inst: &'a LpInstance, opts: &'a SimplexOptions, art_rows: Vec<usize>) -> Self {
        let (m, n) = (inst.num_rows(), inst.num_cols());
        let nvars = n + m + art_rows.len();
        let mut upper = inst.upper().to_vec();
        upper.resize(nvars, f64::INFINITY);
        let mut cost = inst.obj().to_vec();
        cost.resize(nvars, 0.0);
        Self {
            inst,
            opts,
            m,
            n,
            nvars,
            art_rows,
            upper,
            cost,
            state: vec![State::Lower; nvars],
            basic: vec![0; m],
            x: vec![0.0; nvars],
            binv: vec![0.0; m * m],
            iterations: 0,
            since_refactor: 0,
            degenerate_run: 0,
            bland: false,
            fresh: true,
            phase_one: false,
            warm_started: false,
        }
    }

    fn cold(inst: &'a LpInstance, opts: &'a SimplexOptions) -> Self {
        let (m, n) = (inst.num_rows(), inst.num_cols());
        let art_rows: Vec<usize> = (0..m).filter(|&i| inst.rhs()[i] < 0.0).collect();
        let mut s = Self::base(inst, opts, art_rows);
        let mut next_art = n + m;
        for i in 0..m {
            let b = inst.rhs()[i];
            let (var, sign) = if b < 0.0 {
                next_art += 1;
                (next_art - 1, -1.0)
            } else {
                (n + i, 1.0)
            };
            s.basic[i] = var;
            s.state[var] = State::Basic(i);
            s.x[var] = b.abs();
            s.binv[i * m + i] = sign;
        }
        if !s.art_rows.is_empty() {
            s.phase_one = true;
            s.cost = vec![0.0; s.nvars];
            for k in n + m..s.nvars {
                s.cost[k] = -1.0;
            }
        }
        s
    }

    /// `None` when the basis is malformed, singular or primal infeasible.
    fn warm(inst: &'a LpInstance, basis: &Basis, opts: &'a SimplexOptions) -> Result<Option<Self>> {
        let (m, n) = (inst.num_rows(), inst.num_cols());
        if basis.basic.len() != m {
            return Ok(None);
        }
        let mut s = Self::base(inst, opts, Vec::new());
        for (p, id) in basis.basic.iter().enumerate() {
            let k = match *id {
                VarId::Col(j) if j < n => j,
                VarId::Slack(i) if i < m => n + i,
                _ => return Ok(None),
            };
            if s.state[k] != State::Lower {
                return Ok(None);
            }
            s.state[k] = State::Basic(p);
            s.basic[p] = k;
        }
        for &j in &basis.at_upper {
            if j >= n || s.state[j] != State::Lower || !s.upper[j].is_finite() {
                return Ok(None);
            }
            s.state[j] = State::Upper;
            s.x[j] = s.upper[j];
        }
        match s.refactor() {
            Ok(()) => {}
            Err(Error::SingularBasis) => return Ok(None),
            Err(e) => return Err(e),
        }
        let tol = FEAS_TOL * (1.0 + inst.rhs().iter().fold(0.0_f64, |a, b| a.max(b.abs())));
        let infeasible = s.basic.iter().any(|&k| s.x[k] < -tol || s.x[k] > s.upper[k] + tol);
        if infeasible {
            return Ok(None);
        }
        s.warm_started = true;
        Ok(Some(s))
    }

    fn for_column(&self, k: usize, mut f: impl FnMut(usize, f64)) {
        if k < self.n {
            for (i, a) in self.inst.column(k).iter() {
                f(i, a);
            }
        } else if k < self.n + self.m {
            f(k - self.n, 1.0);
        } else {
            f(self.art_rows[k - self.n - self.m], -1.0);
        }
    }

    fn dual(&self) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for p in 0..m {
            let cb = self.cost[self.basic[p]];
            if cb != 0.0 {
                let row = &self.binv[p * m..(p + 1) * m];
                for (yr, b) in y.iter_mut().zip(row) {
                    *yr += cb * b;
                }
            }
        }
        y
    }

    fn reduced_cost(&self, k: usize, y: &[f64]) -> f64 {
        let mut d = self.cost[k];
        self.for_column(k, |i, a| d -= a * y[i]);
        d
    }

    fn ftran(&self, k: usize) -> Vec<f64> {
        let m = self.m;
        let mut alpha = vec![0.0; m];
        self.for_column(k, |i, a| {
            for (p, al) in alpha.iter_mut().enumerate() {
                *al += self.binv[p * m + i] * a;
            }
        });
        alpha
    }

    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        let mut b = vec![0.0; m * m];
        for p in 0..m {
            let k = self.basic[p];
            self.for_column(k, |i, a| b[i * m + p] = a);
        }
        if !dense::invert(&mut b, m) {
            return Err(Error::SingularBasis);
        }
        self.binv = b;
        let mut rhs = self.inst.rhs().to_vec();
        for k in 0..self.nvars {
            if !matches!(self.state[k], State::Basic(_)) && self.x[k] != 0.0 {
                let xk = self.x[k];
                self.for_column(k, |i, a| rhs[i] -= a * xk);
            }
        }
        for p in 0..m {
            let row = &self.binv[p * m..(p + 1) * m];
            self.x[self.basic[p]] = row.iter().zip(&rhs).map(|(b, r)| b * r).sum();
        }
        self.since_refactor = 0;
        self.fresh = true;
        Ok(())
    }

    fn pivot(&mut self, r: usize, alpha: &[f64]) {
        let m = self.m;
        let piv = alpha[r];
        for v in &mut self.binv[r * m..(r + 1) * m] {
            *v /= piv;
        }
        let (head, rest) = self.binv.split_at_mut(r * m);
        let (prow, tail) = rest.split_at_mut(m);
        for (p, row) in head.chunks_exact_mut(m).enumerate() {
            let f = alpha[p];
            if f != 0.0 {
                row.iter_mut().zip(prow.iter()).for_each(|(v, b)| *v -= f * b);
            }
        }
        for (off, row) in tail.chunks_exact_mut(m).enumerate() {
            let f = alpha[r + 1 + off];
            if f != 0.0 {
                row.iter_mut().zip(prow.iter()).for_each(|(v, b)| *v -= f * b);
            }
        }
    }

    fn choose_entering(&self, y: &[f64]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for k in 0..self.nvars {
            let st = self.state[k];
            if matches!(st, State::Basic(_)) || self.upper[k] <= 0.0 {
                continue;
            }
            let d = self.reduced_cost(k, y);
            let tol = OPT_TOL * (1.0 + self.cost[k].abs());
            let eligible = (st == State::Lower && d > tol) || (st == State::Upper && d < -tol);
            if !eligible {
                continue;
            }
            if self.bland {
                return Some(k);
            }
            if best.is_none_or(|(_, b)| d.abs() > b) {
                best = Some((k, d.abs()));
            }
        }
        best.map(|(k, _)| k)
    }

    fn run(&mut self, max_iter: usize) -> Result<SimplexStatus> {
        loop {
            if self.iterations >= max_iter {
                return Ok(SimplexStatus::IterationLimit);
            }
            let y = self.dual();
            let Some(q) = self.choose_entering(&y) else {
                if self.fresh {
                    return Ok(SimplexStatus::Optimal);
                }
                self.refactor()?;
                continue;
            };
            let dir = if self.state[q] == State::Lower { 1.0 } else { -1.0 };
            let alpha = self.ftran(q);

            // Ratio test: basic variable p moves by −dir·α_p per unit step.
            let mut leave: Option<(usize, bool)> = None;
            let mut t_best = f64::INFINITY;
            for (p, &a) in alpha.iter().enumerate() {
                if a.abs() <= PIVOT_TOL {
                    continue;
                }
                let k = self.basic[p];
                let delta = -dir * a;
                let (t, to_upper) = if delta < 0.0 {
                    (self.x[k].max(0.0) / -delta, false)
                } else if self.upper[k].is_finite() {
                    ((self.upper[k] - self.x[k]).max(0.0) / delta, true)
                } else {
                    continue;
                };
                let better = match leave {
                    None => true,
                    Some((lp, _)) => {
                        if t < t_best - STEP_TOL {
                            true
                        } else if t <= t_best + STEP_TOL {
                            if self.bland {
                                k < self.basic[lp]
                            } else {
                                a.abs() > alpha[lp].abs()
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    leave = Some((p, to_upper));
                    t_best = t;
                }
            }
            let flip = self.upper[q];
            if leave.is_none() && !flip.is_finite() {
                return Ok(SimplexStatus::Unbounded);
            }
            self.iterations += 1;
            self.fresh = false;
            let t = if flip <= t_best { flip } else { t_best };
            for (p, &a) in alpha.iter().enumerate() {
                self.x[self.basic[p]] -= dir * a * t;
            }
            if flip <= t_best {
                if dir > 0.0 {
                    self.x[q] = flip;
                    self.state[q] = State::Upper;
                } else {
                    self.x[q] = 0.0;
                    self.state[q] = State::Lower;
                }
            } else {
                let (r, to_upper) = leave.expect("finite ratio implies a leaving row");
                self.x[q] += dir * t;
                let out = self.basic[r];
                if to_upper {
                    self.x[out] = self.upper[out];
                    self.state[out] = State::Upper;
                } else {
                    self.x[out] = 0.0;
                    self.state[out] = State::Lower;
                }
                self.basic[r] = q;
                self.state[q] = State::Basic(r);
                self.pivot(r, &alpha);
                self.since_refactor += 1;
                if self.since_refactor >= self.opts.refactor_interval {
                    self.refactor()?;
                }
            }
            if t <= STEP_TOL {
                self.degenerate_run += 1;
                if self.degenerate_run >= self.opts.bland_threshold {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
                self.bland = false;
            }
        }
    }

    /// Fixes artificials at zero, pivots basic ones out where possible and
    /// installs the true objective.
    fn end_phase_one(&mut self) -> Result<()> {
        let (m, n) = (self.m, self.n);
        for k in n + m..self.nvars {
            self.upper[k] = 0.0;
            if !matches!(self.state[k], State::Basic(_)) {
                self.x[k] = 0.0;
                self.state[k] = State::Lower;
            }
        }
        for p in 0..m {
            if self.basic[p] < n + m {
                continue;
            }
            let row = self.binv[p * m..(p + 1) * m].to_vec();
            let candidate = (0..n + m).find(|&k| {
                if matches!(self.state[k], State::Basic(_)) {
                    return false;
                }
                let mut v = 0.0;
                self.for_column(k, |i, a| v += row[i] * a);
                v.abs() > 1e-7
            });
            if let Some(k) = candidate {
                let alpha = self.ftran(k);
                let out = self.basic[p];
                self.x[out] = 0.0;
                self.state[out] = State::Lower;
                self.basic[p] = k;
                self.state[k] = State::Basic(p);
                self.pivot(p, &alpha);
            }
        }
        self.refactor()?;
        self.phase_one = false;
        self.cost = self.inst.obj().to_vec();
        self.cost.resize(self.nvars, 0.0);
        self.degenerate_run = 0;
        self.bland = false;
        Ok(())
    }

    fn basis(&self) -> Basis {
        let (m, n) = (self.m, self.n);
        let basic = self
            .basic
            .iter()
            .map(|&k| {
                if k < n {
                    VarId::Col(k)
                } else if k < n + m {
                    VarId::Slack(k - n)
                } else {
                    VarId::Slack(self.art_rows[k - n - m])
                }
            })
            .collect();
        let at_upper = (0..n).filter(|&j| self.state[j] == State::Upper).collect();
        Basis { basic, at_upper }
    }

    fn result(&self, status: SimplexStatus) -> SimplexResult {
        let n = self.n;
        let x: Vec<f64> = (0..n).map(|j| self.x[j].clamp(0.0, self.upper[j])).collect();
        let objective: f64 = self.inst.obj().iter().zip(&x).map(|(c, x)| c * x).sum();
        let (x_star, y_star, obj) = match status {
            SimplexStatus::Optimal => (Some(x), Some(self.dual()), objective),
            SimplexStatus::Unbounded => (None, None, f64::INFINITY),
            SimplexStatus::Infeasible => (None, None, f64::NEG_INFINITY),
            SimplexStatus::IterationLimit => (None, None, if self.phase_one { f64::NAN } else { objective }),
        };
        SimplexResult {
            status,
            x_star,
            y_star,
            obj,
            basis: self.basis(),
            iterations: self.iterations,
            warm_started: self.warm_started,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp_model::{constraint_violation, dual_objective};

    fn toy() -> LpInstance {
        LpInstance::from_dense(&[vec![1.0, 1.0]], vec![0.5], vec![1.0, 1.0], None).unwrap()
    }

    #[test]
    fn toy_optimum() {
        let r = solve_lp(&toy(), None).unwrap();
        assert_eq!(r.status, SimplexStatus::Optimal);
        assert!((r.obj - 0.5).abs() < 1e-12);
        assert!((r.y_star.unwrap()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nonpositive_costs_stay_at_origin() {
        let inst = LpInstance::from_dense(&[vec![1.0, 2.0]], vec![3.0], vec![-1.0, 0.0], None).unwrap();
        let r = solve_lp(&inst, None).unwrap();
        assert_eq!(r.x_star.unwrap(), vec![0.0, 0.0]);
        assert_eq!(r.obj, 0.0);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn upper_bounds_via_flips() {
        let inst = LpInstance::from_dense(&[vec![1.0, 1.0, 1.0]], vec![10.0], vec![1.0, 2.0, 3.0], Some(vec![1.0, 1.0, 1.0]))
            .unwrap();
        let r = solve_lp(&inst, None).unwrap();
        assert_eq!(r.obj, 6.0);
        assert_eq!(r.basis.at_upper, vec![0, 1, 2]);
    }

    #[test]
    fn negative_rhs_needs_phase_one() {
        // x1 + x2 ≥ 1 written as −x1 − x2 ≤ −1, with x1 ≤ 0.75 via a row.
        let inst = LpInstance::from_dense(
            &[vec![-1.0, -1.0], vec![1.0, 0.0]],
            vec![-1.0, 0.75],
            vec![-2.0, -3.0],
            Some(vec![5.0, 5.0]),
        )
        .unwrap();
        let r = solve_lp(&inst, None).unwrap();
        assert_eq!(r.status, SimplexStatus::Optimal);
        assert!((r.obj - (-2.0 * 0.75 - 3.0 * 0.25)).abs() < 1e-10);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let inf = LpInstance::from_dense(&[vec![1.0]], vec![-1.0], vec![1.0], None).unwrap();
        assert_eq!(solve_lp(&inf, None).unwrap().status, SimplexStatus::Infeasible);
        let unb = LpInstance::from_dense(&[vec![-1.0]], vec![1.0], vec![1.0], Some(vec![f64::INFINITY])).unwrap();
        let r = solve_lp(&unb, None).unwrap();
        assert_eq!(r.status, SimplexStatus::Unbounded);
        assert_eq!(r.obj, f64::INFINITY);
    }

    #[test]
    fn warm_start_from_optimum_takes_no_steps() {
        let inst = LpInstance::from_dense(
            &[vec![3.0, 1.0, 2.0], vec![1.0, 4.0, 1.0]],
            vec![4.0, 5.0],
            vec![5.0, 4.0, 3.0],
            None,
        )
        .unwrap();
        let cold = solve_lp(&inst, None).unwrap();
        let warm = solve_lp(&inst, Some(&cold.basis)).unwrap();
        assert!(warm.warm_started);
        assert_eq!(warm.iterations, 0);
        assert_eq!(warm.obj, cold.obj);
    }

    #[test]
    fn bad_warm_basis_falls_back() {
        let inst = toy();
        let basis = Basis { basic: vec![VarId::Col(7)], at_upper: vec![] };
        let r = solve_lp(&inst, Some(&basis)).unwrap();
        assert!(!r.warm_started);
        assert!((r.obj - 0.5).abs() < 1e-12);
    }

    #[test]
    fn optimality_certificates() {
        let inst = LpInstance::from_dense(
            &[vec![2.0, 1.0, 0.0, 3.0], vec![0.0, 1.0, 2.0, 1.0], vec![1.0, 0.0, 1.0, 1.0]],
            vec![4.0, 3.0, 2.0],
            vec![3.0, 2.0, 2.5, 4.0],
            Some(vec![1.0, 2.0, 1.5, 1.0]),
        )
        .unwrap();
        let r = solve_lp(&inst, None).unwrap();
        let x = r.x_star.unwrap();
        let y = r.y_star.unwrap();
        assert!(constraint_violation(&inst, &x).unwrap() <= 1e-9);
        assert!(y.iter().all(|&v| v >= -1e-9));
        let dual = dual_objective(&inst, &y).unwrap().value;
        assert!((dual - r.obj).abs() <= 1e-9 * (1.0 + r.obj.abs()));
        let (oracle, _) = enumerate_vertices_oracle(&inst).unwrap();
        assert!((oracle - r.obj).abs() <= 1e-9);
    }

    #[test]
    fn iteration_cap() {
        let inst = LpInstance::from_dense(&[vec![1.0, 1.0]], vec![0.5], vec![1.0, 2.0], None).unwrap();
        let opts = SimplexOptions { max_iterations: Some(0), ..SimplexOptions::default() };
        assert_eq!(solve_lp_with(&inst, None, &opts).unwrap().status, SimplexStatus::IterationLimit);
    }
}
