//! Brute-force optimum of tiny LPs by enumerating vertices.
//!
//! Every vertex of `{Ax ≤ b, 0 ≤ x ≤ u}` fixes each column at a bound or leaves
//! it free, with as many tight rows as free columns. All such choices are tried
//! and the best feasible point kept.

use super::dense::solve;
use crate::error::{Error, Result};
use crate::lp_model::LpInstance;

pub const ORACLE_SIZE_LIMIT: usize = 14;

const FEAS_TOL: f64 = 1e-9;

#[derive(Clone, Copy)]
enum Fix {
    Lower,
    Upper,
    Free,
}

fn combinations(m: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..m {
            if m - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, m, k, cur, f);
            cur.pop();
        }
    }
    rec(0, m, k, &mut Vec::with_capacity(k), f);
}

/// Returns `(optimal value, maximizer)`.
pub fn enumerate_vertices_oracle(inst: &LpInstance) -> Result<(f64, Vec<f64>)> {
    let (m, n) = (inst.num_rows(), inst.num_cols());
    if m + n > ORACLE_SIZE_LIMIT {
        return Err(Error::OracleTooLarge { size: m + n, limit: ORACLE_SIZE_LIMIT });
    }
    if let Some(j) = inst.upper().iter().position(|u| !u.is_finite()) {
        return Err(Error::InfiniteUpperBound(j));
    }
    let mut dense = vec![0.0; m * n];
    for j in 0..n {
        for (i, a) in inst.column(j).iter() {
            dense[i * n + j] = a;
        }
    }
    let b = inst.rhs();
    let u = inst.upper();
    let c = inst.obj();

    let feasible = |x: &[f64]| {
        x.iter().zip(u).all(|(&v, &ub)| v >= -FEAS_TOL && v <= ub + FEAS_TOL * (1.0 + ub))
            && (0..m).all(|i| {
                let lhs: f64 = (0..n).map(|j| dense[i * n + j] * x[j]).sum();
                lhs <= b[i] + FEAS_TOL * (1.0 + b[i].abs())
            })
    };

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut consider = |x: Vec<f64>| {
        if feasible(&x) {
            let value: f64 = c.iter().zip(&x).map(|(c, x)| c * x).sum();
            if best.as_ref().is_none_or(|(v, _)| value > *v) {
                best = Some((value, x));
            }
        }
    };

    let mut fix = vec![Fix::Lower; n];
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut rest = code;
        let mut free = Vec::new();
        for (j, f) in fix.iter_mut().enumerate() {
            *f = match rest % 3 {
                0 => Fix::Lower,
                1 => Fix::Upper,
                _ => {
                    free.push(j);
                    Fix::Free
                }
            };
            rest /= 3;
        }
        let k = free.len();
        if k > m {
            continue;
        }
        let base: Vec<f64> = fix
            .iter()
            .zip(u)
            .map(|(f, &ub)| if let Fix::Upper = f { ub } else { 0.0 })
            .collect();
        if k == 0 {
            consider(base);
            continue;
        }
        combinations(m, k, &mut |rows: &[usize]| {
            let mut sys = Vec::with_capacity(k * k);
            let mut rhs = Vec::with_capacity(k);
            for &i in rows {
                sys.extend(free.iter().map(|&j| dense[i * n + j]));
                let fixed: f64 = (0..n).map(|j| dense[i * n + j] * base[j]).sum();
                rhs.push(b[i] - fixed);
            }
            if let Some(sol) = solve(sys, rhs, k) {
                let mut x = base.clone();
                for (&j, v) in free.iter().zip(sol) {
                    x[j] = v;
                }
                consider(x);
            }
        });
    }
    best.ok_or(Error::OracleInfeasible)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_value() {
        let inst = LpInstance::from_dense(&[vec![1.0, 1.0]], vec![0.5], vec![1.0, 1.0], None).unwrap();
        let (v, x) = enumerate_vertices_oracle(&inst).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        assert!((x[0] + x[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn box_only() {
        let inst = LpInstance::from_dense(&[vec![0.0, 0.0, 0.0]], vec![1.0], vec![2.0, -1.0, 0.5], Some(vec![3.0, 4.0, 2.0]))
            .unwrap();
        let (v, _) = enumerate_vertices_oracle(&inst).unwrap();
        assert_eq!(v, 7.0);
    }

    #[test]
    fn guards() {
        let big = LpInstance::from_dense(&[vec![1.0; 14]], vec![1.0], vec![1.0; 14], None).unwrap();
        assert!(matches!(enumerate_vertices_oracle(&big), Err(Error::OracleTooLarge { .. })));
        let infeasible = LpInstance::from_dense(&[vec![1.0]], vec![-1.0], vec![1.0], None).unwrap();
        assert!(matches!(enumerate_vertices_oracle(&infeasible), Err(Error::OracleInfeasible)));
    }
}
