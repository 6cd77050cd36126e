//! Sifting: column generation for LPs with many more columns than rows.
//!
//! A working problem restricted to a column subset is solved exactly; columns
//! outside it with positive reduced cost under the working dual are added, and
//! the loop stops once none remain. The initial subset comes from the primal
//! estimate of an online pass, and pricing can use a convex combination of the
//! working dual with the online pass's final dual to damp oscillation.

use std::time::Instant;

use crate::error::{check_len, Error, Result};
use crate::lp_model::LpInstance;
use crate::online_core::OnlineSolution;
use crate::simplex_solver::{solve_lp_with, Basis, SimplexOptions, SimplexResult, SimplexStatus};

#[derive(Debug, Clone, PartialEq)]
pub struct SiftConfig {
    /// Columns with `x̂_j ≥ init_threshold` start in the working set.
    pub init_threshold: f64,
    pub stabilization_alpha: f64,
    pub use_online_anchor: bool,
    pub pricing_tolerance: f64,
    pub max_new_columns_per_round: Option<usize>,
    pub max_rounds: usize,
    /// Largest `n` for which a full reference solve is run to measure `acc`.
    pub reference_limit: usize,
    pub simplex: SimplexOptions,
}

impl Default for SiftConfig {
    fn default() -> Self {
        Self {
            init_threshold: 0.5,
            stabilization_alpha: 0.4,
            use_online_anchor: true,
            pricing_tolerance: 1e-7,
            max_new_columns_per_round: None,
            max_rounds: 200,
            reference_limit: 20_000,
            simplex: SimplexOptions::default(),
        }
    }
}

impl SiftConfig {
    /// Defaults with the threshold `1/K` for a pass with duplication factor `K`.
    pub fn for_duplication(k: usize) -> Self {
        Self { init_threshold: 1.0 / k.max(1) as f64, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let a = self.stabilization_alpha;
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::InvalidConfig(format!("stabilization alpha must lie in (0, 1], got {a}")));
        }
        if !(self.init_threshold >= 0.0) {
            return Err(Error::InvalidConfig(format!("threshold must be ≥ 0, got {}", self.init_threshold)));
        }
        if !(self.pricing_tolerance >= 0.0) {
            return Err(Error::InvalidConfig("pricing tolerance must be ≥ 0".into()));
        }
        if self.max_new_columns_per_round == Some(0) {
            return Err(Error::InvalidConfig("max new columns per round must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiftStatus {
    Optimal,
    RoundLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SiftRound {
    pub round: usize,
    pub working_set: usize,
    pub priced: usize,
    pub objective: f64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SiftResult {
    pub status: SiftStatus,
    pub initial_working_set: Vec<usize>,
    pub final_working_set: Vec<usize>,
    /// Solve of the last working problem, in its local column order.
    pub exact: SimplexResult,
    /// Working solution expanded to all `n` columns.
    pub x: Vec<f64>,
    pub objective: f64,
    pub rounds: usize,
    /// `None` when the instance is too large for a reference solve.
    pub acc: Option<f64>,
    pub rdc: f64,
    pub trace: Vec<SiftRound>,
    /// A full pricing sweep found every column dual feasible.
    pub certified: bool,
}

/// `{j : x̂_j ≥ threshold}`, or the `m` largest entries (ties to the lower
/// index) when that set is empty.
pub fn init_working_set(x_hat: &[f64], threshold: f64, m: usize) -> Vec<usize> {
    let set: Vec<usize> = (0..x_hat.len()).filter(|&j| x_hat[j] >= threshold).collect();
    if !set.is_empty() {
        return set;
    }
    let mut order: Vec<usize> = (0..x_hat.len()).collect();
    order.sort_by(|&a, &b| x_hat[b].total_cmp(&x_hat[a]).then(a.cmp(&b)));
    order.truncate(m.min(x_hat.len()));
    order.sort_unstable();
    order
}

/// Columns outside the working set whose reduced cost exceeds `tol`, in index order.
pub fn price(inst: &LpInstance, in_working: &[bool], y: &[f64], tol: f64) -> Vec<usize> {
    (0..inst.num_cols())
        .filter(|&j| !in_working[j] && inst.reduced_cost(j, y) > tol)
        .collect()
}

/// Keeps the `limit` columns with the largest reduced cost, in index order.
pub fn truncate_priced(inst: &LpInstance, priced: &mut Vec<usize>, y: &[f64], limit: usize) {
    if priced.len() <= limit {
        return;
    }
    let mut scored: Vec<(f64, usize)> = priced.iter().map(|&j| (inst.reduced_cost(j, y), j)).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    *priced = scored[..limit].iter().map(|&(_, j)| j).collect();
    priced.sort_unstable();
}

/// `α·y_working + (1 − α)·y_anchor`.
pub fn stabilize(y_working: &[f64], y_anchor: &[f64], alpha: f64) -> Result<Vec<f64>> {
    check_len(y_working.len(), y_anchor.len())?;
    Ok(y_working
        .iter()
        .zip(y_anchor)
        .map(|(w, a)| alpha * w + (1.0 - alpha) * a)
        .collect())
}

/// `(acc, rdc) = (|B ∩ W| / |B|, |W| / n)`.
pub fn basis_metrics(reference: &[usize], working: &[usize], n: usize) -> Result<(f64, f64)> {
    if reference.is_empty() {
        return Err(Error::EmptyBasis);
    }
    let mut in_w = vec![false; n];
    for &j in working {
        in_w[j] = true;
    }
    let hit = reference.iter().filter(|&&j| in_w[j]).count();
    Ok((hit as f64 / reference.len() as f64, working.len() as f64 / n as f64))
}

/// Bound-aware dual feasibility of `(x, y)` over every column.
pub fn certify(inst: &LpInstance, x: &[f64], y: &[f64], tol: f64) -> bool {
    (0..inst.num_cols()).all(|j| {
        let rc = inst.reduced_cost(j, y);
        let u = inst.upper()[j];
        (rc <= tol || x[j] >= u - 1e-7 * (1.0 + u)) && (rc >= -tol || x[j] <= 1e-7)
    })
}

/// Columns that are positive in an exact optimum of the full instance.
pub fn reference_support(inst: &LpInstance, opts: &SimplexOptions) -> Result<Option<Vec<usize>>> {
    let full = solve_lp_with(inst, None, opts)?;
    Ok(full
        .x_star
        .filter(|_| full.status == SimplexStatus::Optimal)
        .map(|x| (0..x.len()).filter(|&j| x[j] > 1e-7).collect()))
}

pub fn sift(inst: &LpInstance, online: &OnlineSolution, cfg: &SiftConfig) -> Result<SiftResult> {
    cfg.validate()?;
    let (m, n) = (inst.num_rows(), inst.num_cols());
    check_len(n, online.x_hat.len())?;
    check_len(m, online.y_final.len())?;
    if inst.rhs().iter().any(|&b| b < 0.0) {
        return Err(Error::InvalidInstance("sifting needs b ≥ 0 so that every working problem is feasible".into()));
    }
    let initial = init_working_set(&online.x_hat, cfg.init_threshold, m);
    let rdc = initial.len() as f64 / n as f64;
    let acc = if n <= cfg.reference_limit {
        match reference_support(inst, &cfg.simplex)? {
            Some(support) if !support.is_empty() => Some(basis_metrics(&support, &initial, n)?.0),
            _ => None,
        }
    } else {
        None
    };
    let anchor = online.y_final.as_slice();
    let started = Instant::now();

    let mut working = initial.clone();
    let mut in_working = vec![false; n];
    for &j in &working {
        in_working[j] = true;
    }
    let mut basis: Option<Basis> = None;
    let mut trace = Vec::new();
    let mut round = 0;
    loop {
        round += 1;
        let sub = inst.select_columns(&working);
        // Columns are only appended, so the previous local basis stays valid.
        let res = solve_lp_with(&sub, basis.as_ref(), &cfg.simplex)?;
        if res.status != SimplexStatus::Optimal {
            return Err(Error::WorkingProblem(format!("{:?}", res.status)));
        }
        let y_work: Vec<f64> = res.y_star.as_deref().unwrap_or_default().iter().map(|v| v.max(0.0)).collect();
        let stabilized = cfg.use_online_anchor && cfg.stabilization_alpha < 1.0;
        let y_price = if stabilized {
            stabilize(&y_work, anchor, cfg.stabilization_alpha)?
        } else {
            y_work.clone()
        };
        let mut priced = price(inst, &in_working, &y_price, cfg.pricing_tolerance);
        let mut price_dual = &y_price;
        if priced.is_empty() && stabilized {
            // The blended dual can hide columns the working dual still prices in.
            priced = price(inst, &in_working, &y_work, cfg.pricing_tolerance);
            price_dual = &y_work;
        }
        if let Some(limit) = cfg.max_new_columns_per_round {
            truncate_priced(inst, &mut priced, price_dual, limit);
        }
        trace.push(SiftRound {
            round,
            working_set: working.len(),
            priced: priced.len(),
            objective: res.obj,
            wall_time_s: started.elapsed().as_secs_f64(),
        });

        let done = priced.is_empty();
        if done || round >= cfg.max_rounds {
            let mut x = vec![0.0; n];
            for (local, &j) in working.iter().enumerate() {
                x[j] = res.x_star.as_ref().map_or(0.0, |xs| xs[local]);
            }
            let certified = done && certify(inst, &x, &y_work, cfg.pricing_tolerance);
            return Ok(SiftResult {
                status: if done { SiftStatus::Optimal } else { SiftStatus::RoundLimit },
                initial_working_set: initial,
                final_working_set: working,
                objective: res.obj,
                exact: res,
                x,
                rounds: round,
                acc,
                rdc,
                trace,
                certified,
            });
        }
        for &j in &priced {
            in_working[j] = true;
        }
        working.extend_from_slice(&priced);
        basis = Some(res.basis);
    }
}
