//! Inequality-form LP data and the quality measures used throughout the crate.
//!
//! Every instance is stored as
//!
//! ```text
//! max ⟨c, x⟩  s.t.  A x ≤ b,  0 ≤ x ≤ u
//! ```
//!
//! with `A` in compressed sparse column (CSC) layout. Instances are immutable
//! once built; all metrics here are pure functions of an instance and a point.

use crate::error::{check_len, Error, Result};

/// Sparse column-major LP `max ⟨c,x⟩ s.t. Ax ≤ b, 0 ≤ x ≤ u`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpInstance {
    num_rows: usize,
    num_cols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
    rhs: Vec<f64>,
    obj: Vec<f64>,
    upper: Vec<f64>,
}

/// Borrowed view of one column of `A`.
#[derive(Debug, Clone, Copy)]
pub struct Column<'a> {
    pub rows: &'a [usize],
    pub values: &'a [f64],
}

impl<'a> Column<'a> {
    pub fn nnz(&self) -> usize {
        self.rows.len()
    }

    pub fn dot(&self, y: &[f64]) -> f64 {
        self.rows
            .iter()
            .zip(self.values)
            .map(|(&i, &a)| a * y[i])
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + 'a {
        self.rows.iter().copied().zip(self.values.iter().copied())
    }
}

impl LpInstance {
    /// Builds an instance from raw CSC arrays, validating every structural invariant.
    ///
    /// Explicitly stored zeros are rejected as non-canonical; use
    /// [`LpInstance::from_columns`] to build from unsorted or zero-containing data.
    pub fn new(
        num_rows: usize,
        col_ptr: Vec<usize>,
        row_idx: Vec<usize>,
        values: Vec<f64>,
        rhs: Vec<f64>,
        obj: Vec<f64>,
        upper: Vec<f64>,
    ) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidInstance(msg));
        if num_rows == 0 {
            return invalid("instance needs at least one row".into());
        }
        if col_ptr.len() < 2 {
            return invalid("instance needs at least one column".into());
        }
        let num_cols = col_ptr.len() - 1;
        if col_ptr[0] != 0 || col_ptr[num_cols] != row_idx.len() {
            return invalid("col_ptr must start at 0 and end at nnz".into());
        }
        if row_idx.len() != values.len() {
            return invalid("row_idx and values differ in length".into());
        }
        if rhs.len() != num_rows {
            return invalid(format!("rhs has length {}, expected {num_rows}", rhs.len()));
        }
        if obj.len() != num_cols || upper.len() != num_cols {
            return invalid(format!("obj/upper must have length {num_cols}"));
        }
        for j in 0..num_cols {
            let (lo, hi) = (col_ptr[j], col_ptr[j + 1]);
            if lo > hi {
                return invalid(format!("col_ptr decreases at column {j}"));
            }
            for k in lo..hi {
                if row_idx[k] >= num_rows {
                    return invalid(format!("row index {} out of range in column {j}", row_idx[k]));
                }
                if k > lo && row_idx[k] <= row_idx[k - 1] {
                    return invalid(format!("row indices not strictly increasing in column {j}"));
                }
                if !values[k].is_finite() || values[k] == 0.0 {
                    return invalid(format!("stored entry in column {j} is zero or not finite"));
                }
            }
        }
        if rhs.iter().chain(&obj).any(|v| !v.is_finite()) {
            return invalid("rhs and obj must be finite".into());
        }
        if let Some(j) = upper.iter().position(|&u| u.is_nan() || u <= 0.0) {
            return invalid(format!("upper bound of column {j} must be positive"));
        }
        Ok(Self {
            num_rows,
            num_cols,
            col_ptr,
            row_idx,
            values,
            rhs,
            obj,
            upper,
        })
    }

    /// Builds an instance from per-column `(row, value)` lists. Entries are sorted,
    /// exact zeros dropped, and duplicate row indices within a column rejected.
    pub fn from_columns(
        num_rows: usize,
        columns: Vec<Vec<(usize, f64)>>,
        rhs: Vec<f64>,
        obj: Vec<f64>,
        upper: Vec<f64>,
    ) -> Result<Self> {
        let mut col_ptr = Vec::with_capacity(columns.len() + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for (j, mut col) in columns.into_iter().enumerate() {
            col.retain(|&(_, v)| v != 0.0);
            col.sort_by_key(|&(i, _)| i);
            if col.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::InvalidInstance(format!("duplicate row entry in column {j}")));
            }
            for (i, v) in col {
                row_idx.push(i);
                values.push(v);
            }
            col_ptr.push(row_idx.len());
        }
        Self::new(num_rows, col_ptr, row_idx, values, rhs, obj, upper)
    }

    /// Dense row-major constructor, mostly for tests and tiny examples. `upper`
    /// defaults to all ones.
    pub fn from_dense(rows: &[Vec<f64>], rhs: Vec<f64>, obj: Vec<f64>, upper: Option<Vec<f64>>) -> Result<Self> {
        let n = obj.len();
        if let Some(r) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::InvalidInstance(format!("dense row {r} has wrong length")));
        }
        let columns = (0..n)
            .map(|j| rows.iter().enumerate().map(|(i, r)| (i, r[j])).collect())
            .collect();
        let upper = upper.unwrap_or_else(|| vec![1.0; n]);
        Self::from_columns(rows.len(), columns, rhs, obj, upper)
    }

    pub fn num_rows(&self) -> usize {
        self.num_rows
    }

    pub fn num_cols(&self) -> usize {
        self.num_cols
    }

    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn obj(&self) -> &[f64] {
        &self.obj
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn col_ptr(&self) -> &[usize] {
        &self.col_ptr
    }

    pub fn row_idx(&self) -> &[usize] {
        &self.row_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn column(&self, j: usize) -> Column<'_> {
        let (lo, hi) = (self.col_ptr[j], self.col_ptr[j + 1]);
        Column {
            rows: &self.row_idx[lo..hi],
            values: &self.values[lo..hi],
        }
    }

    pub fn has_unit_upper(&self) -> bool {
        self.upper.iter().all(|&u| u == 1.0)
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.num_cols, x.len())?;
        let mut ax = vec![0.0; self.num_rows];
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                for (i, a) in self.column(j).iter() {
                    ax[i] += a * xj;
                }
            }
        }
        Ok(ax)
    }

    /// `⟨c, x⟩`.
    pub fn objective(&self, x: &[f64]) -> Result<f64> {
        check_len(self.num_cols, x.len())?;
        Ok(self.obj.iter().zip(x).map(|(c, x)| c * x).sum())
    }

    /// Reduced cost `c_j − ⟨a_j, y⟩`.
    pub fn reduced_cost(&self, j: usize, y: &[f64]) -> f64 {
        self.obj[j] - self.column(j).dot(y)
    }

    /// Restriction of the instance to the given columns, in the order given.
    pub fn select_columns(&self, cols: &[usize]) -> LpInstance {
        let mut col_ptr = Vec::with_capacity(cols.len() + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for &j in cols {
            let col = self.column(j);
            row_idx.extend_from_slice(col.rows);
            values.extend_from_slice(col.values);
            col_ptr.push(row_idx.len());
        }
        LpInstance {
            num_rows: self.num_rows,
            num_cols: cols.len(),
            col_ptr,
            row_idx,
            values,
            rhs: self.rhs.clone(),
            obj: cols.iter().map(|&j| self.obj[j]).collect(),
            upper: cols.iter().map(|&j| self.upper[j]).collect(),
        }
    }

    pub fn with_rhs(&self, rhs: Vec<f64>) -> Result<LpInstance> {
        check_len(self.num_rows, rhs.len())?;
        if rhs.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidInstance("rhs must be finite".into()));
        }
        Ok(LpInstance { rhs, ..self.clone() })
    }

    pub fn with_upper(&self, upper: Vec<f64>) -> Result<LpInstance> {
        check_len(self.num_cols, upper.len())?;
        if upper.iter().any(|&u| u.is_nan() || u <= 0.0) {
            return Err(Error::InvalidInstance("upper bounds must be positive".into()));
        }
        Ok(LpInstance { upper, ..self.clone() })
    }

    /// Caps every upper bound at `cap` (which must be positive).
    pub fn cap_upper(&self, cap: f64) -> LpInstance {
        assert!(cap > 0.0, "upper-bound cap must be positive");
        let upper = self.upper.iter().map(|&u| u.min(cap)).collect();
        LpInstance { upper, ..self.clone() }
    }

    /// Replaces every `b_i` below `eps` by `eps`, so that the resource rate is positive.
    pub fn perturb_small_rhs(&self, eps: f64) -> LpInstance {
        let rhs = self.rhs.iter().map(|&b| b.max(eps)).collect();
        LpInstance { rhs, ..self.clone() }
    }
}

/// Default lower clamp applied to right-hand sides when perturbation is requested.
pub const RHS_PERTURBATION: f64 = 1e-3;

/// Data bounds of an instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceStats {
    /// `max_j ‖a_j‖∞`.
    pub a_bar: f64,
    /// `max_j |c_j|`.
    pub c_bar: f64,
    /// `min_i b_i / n`.
    pub d_lo: f64,
    /// `max_i b_i / n`.
    pub d_hi: f64,
    pub nnz: usize,
    /// Every resource rate is positive.
    pub assumptions_ok: bool,
}

/// Single traversal of the instance data.
pub fn compute_stats(inst: &LpInstance) -> InstanceStats {
    let n = inst.num_cols as f64;
    let a_bar = inst.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let c_bar = inst.obj.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let (b_lo, b_hi) = inst
        .rhs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &b| (lo.min(b), hi.max(b)));
    let d_lo = b_lo / n;
    InstanceStats {
        a_bar,
        c_bar,
        d_lo,
        d_hi: b_hi / n,
        nnz: inst.nnz(),
        assumptions_ok: d_lo > 0.0,
    }
}

/// `‖[Ax − b]_+‖₂`.
pub fn constraint_violation(inst: &LpInstance, x: &[f64]) -> Result<f64> {
    let ax = inst.mul_vec(x)?;
    Ok(positive_residual(&ax, &inst.rhs).sqrt())
}

fn positive_residual(ax: &[f64], b: &[f64]) -> f64 {
    ax.iter()
        .zip(b)
        .map(|(l, r)| {
            let v = (l - r).max(0.0);
            v * v
        })
        .sum()
}

/// `opt_value − ⟨c, x⟩`.
pub fn optimality_gap(inst: &LpInstance, x: &[f64], opt_value: f64) -> Result<f64> {
    Ok(opt_value - inst.objective(x)?)
}

/// `|⟨c, x⟩ / opt_value|`.
pub fn relative_optimality(inst: &LpInstance, x: &[f64], opt_value: f64) -> Result<f64> {
    let value = inst.objective(x)?;
    if opt_value == 0.0 {
        return Err(Error::ZeroOptimum);
    }
    Ok((value / opt_value).abs())
}

/// Value of the Lagrangian dual bound at a multiplier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualBound {
    pub value: f64,
    /// Some negative entries of the supplied multiplier were clamped to zero.
    pub clamped: bool,
}

/// `⟨b, y⟩ + ⟨u, [c − Aᵀy]_+⟩`, an upper bound on the LP optimum for any `y ≥ 0`.
///
/// Negative entries of `y` are treated as zero; columns with infinite upper bound
/// and positive reduced cost make the bound `+∞`.
pub fn dual_objective(inst: &LpInstance, y: &[f64]) -> Result<DualBound> {
    check_len(inst.num_rows, y.len())?;
    let clamped = y.iter().any(|&v| v < 0.0);
    let y: Vec<f64> = y.iter().map(|&v| v.max(0.0)).collect();
    let mut value: f64 = inst.rhs.iter().zip(&y).map(|(b, y)| b * y).sum();
    for j in 0..inst.num_cols {
        let rc = inst.reduced_cost(j, &y);
        if rc > 0.0 {
            value += inst.upper[j] * rc;
        }
    }
    Ok(DualBound { value, clamped })
}

/// Scaled primal infeasibility and duality gap, whichever is larger:
///
/// ```text
/// max{ ‖[Ax−b]_+‖ / (‖b‖₁+1),  |D(y) − ⟨c,x⟩| / (|D(y)| + |⟨c,x⟩| + 1) }
/// ```
pub fn stopping_residual(inst: &LpInstance, x: &[f64], y: &[f64]) -> Result<f64> {
    let violation = constraint_violation(inst, x)?;
    let b_l1: f64 = inst.rhs.iter().map(|b| b.abs()).sum();
    let primal = inst.objective(x)?;
    let dual = dual_objective(inst, y)?.value;
    let infeas = violation / (b_l1 + 1.0);
    let gap = (dual - primal).abs() / (dual.abs() + primal.abs() + 1.0);
    Ok(infeas.max(gap))
}

/// Quality summary of an approximate primal point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub gap: f64,
    pub violation: f64,
    pub relative_opt: f64,
    pub dual_bound: f64,
}

impl Metrics {
    pub fn evaluate(inst: &LpInstance, x: &[f64], y: &[f64], opt_value: f64) -> Result<Metrics> {
        Ok(Metrics {
            gap: optimality_gap(inst, x, opt_value)?,
            violation: constraint_violation(inst, x)?,
            relative_opt: relative_optimality(inst, x, opt_value)?,
            dual_bound: dual_objective(inst, y)?.value,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> LpInstance {
        LpInstance::from_dense(&[vec![1.0, 1.0]], vec![0.5], vec![1.0, 1.0], None).unwrap()
    }

    #[test]
    fn stats_of_single_entry() {
        let inst = LpInstance::from_dense(&[vec![1.0]], vec![2.0], vec![3.0], None).unwrap();
        let s = compute_stats(&inst);
        assert_eq!((s.a_bar, s.c_bar, s.d_lo, s.d_hi), (1.0, 3.0, 2.0, 2.0));
        assert!(s.assumptions_ok);
    }

    #[test]
    fn zero_column_is_not_stored() {
        let inst = LpInstance::from_dense(
            &[vec![2.0, 0.0, -5.0], vec![1.0, 0.0, 0.0]],
            vec![1.0, 1.0],
            vec![1.0, 9.0, 1.0],
            None,
        )
        .unwrap();
        assert_eq!(inst.nnz(), 3);
        assert_eq!(inst.column(1).nnz(), 0);
        let s = compute_stats(&inst);
        assert_eq!(s.a_bar, 5.0);
        assert_eq!(s.c_bar, 9.0);
    }

    #[test]
    fn rejects_malformed_csc() {
        let bad_order = LpInstance::new(2, vec![0, 2], vec![1, 0], vec![1.0, 1.0], vec![1.0; 2], vec![1.0], vec![1.0]);
        assert!(bad_order.is_err());
        let bad_row = LpInstance::new(1, vec![0, 1], vec![3], vec![1.0], vec![1.0], vec![1.0], vec![1.0]);
        assert!(bad_row.is_err());
        let bad_upper = LpInstance::new(1, vec![0, 1], vec![0], vec![1.0], vec![1.0], vec![1.0], vec![0.0]);
        assert!(bad_upper.is_err());
        let no_cols = LpInstance::new(1, vec![0], vec![], vec![], vec![1.0], vec![], vec![]);
        assert!(no_cols.is_err());
    }

    #[test]
    fn violation_examples() {
        let inst = toy();
        assert_eq!(constraint_violation(&inst, &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(constraint_violation(&inst, &[1.0, 1.0]).unwrap(), 1.5);
        assert_eq!(constraint_violation(&inst, &[0.25, 0.25]).unwrap(), 0.0);
        assert!(matches!(
            constraint_violation(&inst, &[1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn gap_and_relative_optimality() {
        let inst = toy();
        assert_eq!(optimality_gap(&inst, &[0.0, 0.0], 0.5).unwrap(), 0.5);
        assert_eq!(optimality_gap(&inst, &[0.5, 0.0], 0.5).unwrap(), 0.0);
        assert_eq!(relative_optimality(&inst, &[0.25, 0.25], 0.5).unwrap(), 1.0);
        assert_eq!(relative_optimality(&inst, &[0.0, 0.0], 0.5).unwrap(), 0.0);
        assert_eq!(relative_optimality(&inst, &[0.125, 0.125], 0.5).unwrap(), 0.5);
        assert!(matches!(relative_optimality(&inst, &[0.0, 0.0], 0.0), Err(Error::ZeroOptimum)));
    }

    #[test]
    fn dual_objective_examples() {
        let inst = toy();
        // y = 0 leaves only the box term ⟨u, [c]_+⟩.
        assert_eq!(dual_objective(&inst, &[0.0]).unwrap().value, 2.0);
        // 0.5·1 + 1·[1−1]_+ + 1·[1−1]_+
        assert_eq!(dual_objective(&inst, &[1.0]).unwrap().value, 0.5);
        let clamped = dual_objective(&inst, &[-3.0]).unwrap();
        assert!(clamped.clamped);
        assert_eq!(clamped.value, 2.0);
    }

    #[test]
    fn infinite_upper_bound_in_dual() {
        let inst = LpInstance::from_dense(&[vec![1.0]], vec![1.0], vec![2.0], Some(vec![f64::INFINITY])).unwrap();
        assert_eq!(dual_objective(&inst, &[0.0]).unwrap().value, f64::INFINITY);
        assert_eq!(dual_objective(&inst, &[2.0]).unwrap().value, 2.0);
    }

    #[test]
    fn stopping_residual_terms() {
        let inst = toy();
        // Exact pair: x* = (0.5, 0), y* = 1.
        assert!(stopping_residual(&inst, &[0.5, 0.0], &[1.0]).unwrap() <= 1e-12);
        // x = 0, y = 0: no violation, gap term |2 − 0| / (2 + 0 + 1).
        let r = stopping_residual(&inst, &[0.0, 0.0], &[0.0]).unwrap();
        assert!((r - 2.0 / 3.0).abs() < 1e-15);
        // Infeasible x dominates by at least its scaled violation.
        let r = stopping_residual(&inst, &[1.0, 1.0], &[1.0]).unwrap();
        assert!(r >= 1.5 / 1.5);
    }

    #[test]
    fn select_and_perturb() {
        let inst = LpInstance::from_dense(&[vec![1.0, 2.0, 3.0]], vec![0.0], vec![4.0, 5.0, 6.0], None).unwrap();
        let sub = inst.select_columns(&[2, 0]);
        assert_eq!(sub.obj(), &[6.0, 4.0]);
        assert_eq!(sub.column(0).values, &[3.0]);
        assert!(!compute_stats(&inst).assumptions_ok);
        assert_eq!(inst.perturb_small_rhs(RHS_PERTURBATION).rhs(), &[1e-3]);
    }
}
