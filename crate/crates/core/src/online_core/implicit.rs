//! Proximal-point (implicit) dual update for a single column.
//!
//! Solves
//!
//! ```text
//! min_{y' ≥ 0}  ⟨d, y'⟩ + u·[c − ⟨a, y'⟩]_+ + ‖y' − z‖² / (2γ)
//! ```
//!
//! by trying the two smooth pieces first (column fully taken, column rejected)
//! and falling back to the kink, where `⟨a, y'⟩ = c` and the problem becomes a
//! projection of `z − γd` onto a weighted simplex over the column's support.

use super::projection::project_weighted_simplex;
use crate::error::{Error, Result};
use crate::lp_model::Column;

/// Which piece of the prox objective the minimizer lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProxCase {
    /// `c − ⟨a, y⁺⟩ > 0`: the column is taken at its upper bound.
    KinkInactiveHigh,
    /// `c − ⟨a, y⁺⟩ < 0`: the column is rejected.
    KinkInactiveLow,
    /// `⟨a, y⁺⟩ = c`: fractional primal value.
    KinkActive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProximalSolution {
    pub y_plus: Vec<f64>,
    /// Multiplier of `s ≥ c − ⟨a, y⟩`, in `[0, u]`.
    pub x: f64,
    pub case: ProxCase,
}

/// KKT residual tolerance of an accepted prox solution.
pub const KKT_TOL: f64 = 1e-8;

/// One column's data as seen by the prox step.
#[derive(Debug, Clone, Copy)]
pub struct ProxColumn<'a> {
    pub a: Column<'a>,
    pub c: f64,
    pub upper: f64,
}

/// `⟨d, y'⟩ + u[c − ⟨a,y'⟩]_+ + ‖y' − z‖²/(2γ)`.
pub fn prox_objective(y_new: &[f64], z: &[f64], col: ProxColumn<'_>, d: &[f64], gamma: f64) -> f64 {
    let lin: f64 = d.iter().zip(y_new).map(|(d, y)| d * y).sum();
    let hinge = col.upper * (col.c - col.a.dot(y_new)).max(0.0);
    let dist: f64 = y_new.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
    lin + hinge + dist / (2.0 * gamma)
}

fn candidate(z: &[f64], col: ProxColumn<'_>, d: &[f64], gamma: f64, x: f64) -> Vec<f64> {
    let mut y: Vec<f64> = z.iter().zip(d).map(|(z, d)| z - gamma * d).collect();
    if x != 0.0 {
        for (i, a) in col.a.iter() {
            y[i] += gamma * a * x;
        }
    }
    y.iter_mut().for_each(|v| *v = v.max(0.0));
    y
}

/// Scaled violation of the prox optimality system at `(y⁺, x)`.
pub fn kkt_residual(sol: &ProximalSolution, z: &[f64], col: ProxColumn<'_>, d: &[f64], gamma: f64) -> f64 {
    let expected = candidate(z, col, d, gamma, sol.x);
    let scale_y = 1.0 + z.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let stationarity = sol
        .y_plus
        .iter()
        .zip(&expected)
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
        / scale_y;
    let slack = col.c - col.a.dot(&sol.y_plus);
    let scale_s = 1.0
        + col.c.abs()
        + col.a.iter().map(|(i, a)| (a * sol.y_plus[i]).abs()).sum::<f64>();
    let comp = if sol.x <= 0.0 {
        slack.max(0.0)
    } else if sol.x >= col.upper {
        (-slack).max(0.0)
    } else {
        slack.abs()
    } / scale_s;
    let bounds = (-sol.x).max(sol.x - col.upper).max(0.0);
    stationarity.max(comp).max(bounds)
}

/// Proximal step from `z` on one column.
pub fn implicit_step(z: &[f64], col: ProxColumn<'_>, d: &[f64], gamma: f64) -> Result<ProximalSolution> {
    let take = ProximalSolution {
        y_plus: candidate(z, col, d, gamma, col.upper),
        x: col.upper,
        case: ProxCase::KinkInactiveHigh,
    };
    if col.c - col.a.dot(&take.y_plus) > 0.0 {
        return verified(take, z, col, d, gamma);
    }
    let reject = ProximalSolution {
        y_plus: candidate(z, col, d, gamma, 0.0),
        x: 0.0,
        case: ProxCase::KinkInactiveLow,
    };
    if col.c - col.a.dot(&reject.y_plus) < 0.0 {
        return verified(reject, z, col, d, gamma);
    }

    // Kink: off-support coordinates keep the rejected-candidate value; the support
    // is projected onto {⟨a_S, y_S⟩ = c, y_S ≥ 0}, written as ⟨−a_S, y_S⟩ = −c so
    // that y_S = [v_S + θ a_S]_+ and θ = γ x.
    let mut y_plus = reject.y_plus;
    let support: Vec<f64> = col.a.rows.iter().map(|&i| z[i] - gamma * d[i]).collect();
    let neg_a: Vec<f64> = col.a.values.iter().map(|a| -a).collect();
    let proj = project_weighted_simplex(&support, &neg_a, -col.c)?;
    for (&i, yi) in col.a.rows.iter().zip(proj.y) {
        y_plus[i] = yi;
    }
    let kink = ProximalSolution {
        y_plus,
        x: (proj.theta / gamma).clamp(0.0, col.upper),
        case: ProxCase::KinkActive,
    };
    verified(kink, z, col, d, gamma)
}

fn verified(
    sol: ProximalSolution,
    z: &[f64],
    col: ProxColumn<'_>,
    d: &[f64],
    gamma: f64,
) -> Result<ProximalSolution> {
    let residual = kkt_residual(&sol, z, col, d, gamma);
    if residual <= KKT_TOL {
        Ok(sol)
    } else {
        Err(Error::ProxNonconvergence { residual })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp_model::LpInstance;

    #[test]
    fn empty_column_is_always_taken() {
        let inst = LpInstance::from_dense(&[vec![0.0]], vec![1.0], vec![2.0], None).unwrap();
        let col = ProxColumn { a: inst.column(0), c: 2.0, upper: 1.0 };
        let sol = implicit_step(&[0.3], col, &[0.1], 0.5).unwrap();
        assert_eq!(sol.case, ProxCase::KinkInactiveHigh);
        assert_eq!(sol.x, 1.0);
        assert!((sol.y_plus[0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn large_dual_rejects() {
        let inst = LpInstance::from_dense(&[vec![2.0]], vec![1.0], vec![1.0], None).unwrap();
        let col = ProxColumn { a: inst.column(0), c: 1.0, upper: 1.0 };
        let sol = implicit_step(&[5.0], col, &[0.5], 0.1).unwrap();
        assert_eq!(sol.case, ProxCase::KinkInactiveLow);
        assert_eq!(sol.x, 0.0);
        assert!((sol.y_plus[0] - 4.95).abs() < 1e-12);
    }

    #[test]
    fn kink_gives_fractional_multiplier() {
        // z = 0.5, d = 0, a = 1, c = 1, γ = 1: taking moves y to 1.5 (slack −0.5),
        // rejecting keeps 0.5 (slack 0.5), so y⁺ = 1 with x = 0.5.
        let inst = LpInstance::from_dense(&[vec![1.0]], vec![1.0], vec![1.0], None).unwrap();
        let col = ProxColumn { a: inst.column(0), c: 1.0, upper: 1.0 };
        let sol = implicit_step(&[0.5], col, &[0.0], 1.0).unwrap();
        assert_eq!(sol.case, ProxCase::KinkActive);
        assert!((sol.y_plus[0] - 1.0).abs() < 1e-12);
        assert!((sol.x - 0.5).abs() < 1e-12);
    }
}
