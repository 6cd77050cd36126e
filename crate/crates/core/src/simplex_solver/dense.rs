//! Small dense linear algebra with partial pivoting.

/// Pivot magnitudes below this (relative to the column scale) count as singular.
pub(crate) const SINGULAR_TOL: f64 = 1e-11;

/// Inverts a row-major `m × m` matrix in place by Gauss–Jordan elimination.
/// Returns `false` when a pivot is numerically zero.
pub(crate) fn invert(a: &mut [f64], m: usize) -> bool {
    let mut inv = vec![0.0; m * m];
    for i in 0..m {
        inv[i * m + i] = 1.0;
    }
    let scale = a.iter().fold(0.0_f64, |s, v| s.max(v.abs())).max(1.0);
    for col in 0..m {
        let (piv, best) = (col..m)
            .map(|r| (r, a[r * m + col].abs()))
            .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= SINGULAR_TOL * scale {
            return false;
        }
        if piv != col {
            for k in 0..m {
                a.swap(piv * m + k, col * m + k);
                inv.swap(piv * m + k, col * m + k);
            }
        }
        let p = a[col * m + col];
        for k in 0..m {
            a[col * m + k] /= p;
            inv[col * m + k] /= p;
        }
        for r in 0..m {
            if r == col {
                continue;
            }
            let f = a[r * m + col];
            if f != 0.0 {
                for k in 0..m {
                    a[r * m + k] -= f * a[col * m + k];
                    inv[r * m + k] -= f * inv[col * m + k];
                }
            }
        }
    }
    a.copy_from_slice(&inv);
    true
}

/// Solves the square system `a x = b` (row-major `k × k`); `None` if singular.
pub(crate) fn solve(mut a: Vec<f64>, mut b: Vec<f64>, k: usize) -> Option<Vec<f64>> {
    let scale = a.iter().fold(0.0_f64, |s, v| s.max(v.abs())).max(1.0);
    for col in 0..k {
        let (piv, best) = (col..k)
            .map(|r| (r, a[r * k + col].abs()))
            .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= 1e-12 * scale {
            return None;
        }
        if piv != col {
            for c in 0..k {
                a.swap(piv * k + c, col * k + c);
            }
            b.swap(piv, col);
        }
        for r in col + 1..k {
            let f = a[r * k + col] / a[col * k + col];
            if f != 0.0 {
                for c in col..k {
                    a[r * k + c] -= f * a[col * k + c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; k];
    for r in (0..k).rev() {
        let s: f64 = (r + 1..k).map(|c| a[r * k + c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r * k + r];
    }
    Some(x)
}
