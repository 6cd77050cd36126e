//! Euclidean projection onto a weighted simplex `{y ≥ 0 : ⟨w, y⟩ = target}`.
//!
//! The minimizer has the form `y_i = [v_i − θ w_i]_+`. The map
//! `h(θ) = ⟨w, [v − θw]_+⟩` is continuous, piecewise linear and nonincreasing
//! for any sign pattern of `w`, with breakpoints at `v_i / w_i`. Sorting the
//! breakpoints and sweeping them locates the piece that contains the target.

use std::cmp::Ordering;

use crate::error::{check_len, Error, Result};

/// Projection result together with the multiplier of the equality constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub y: Vec<f64>,
    pub theta: f64,
}

/// Relative tolerance on `|⟨w, y⟩ − target|`.
pub const PROJECTION_TOL: f64 = 1e-9;

pub fn project_weighted_simplex(v: &[f64], w: &[f64], target: f64) -> Result<Projection> {
    check_len(v.len(), w.len())?;
    let has_pos = w.iter().any(|&wi| wi > 0.0);
    let has_neg = w.iter().any(|&wi| wi < 0.0);
    let empty = (target > 0.0 && !has_pos) || (target < 0.0 && !has_neg) || !target.is_finite();
    if empty {
        return Err(Error::EmptyProjection { target });
    }

    let mut breaks: Vec<(f64, usize)> = w
        .iter()
        .enumerate()
        .filter(|(_, &wi)| wi != 0.0)
        .map(|(i, &wi)| (v[i] / wi, i))
        .collect();
    breaks.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));

    // Left of every breakpoint exactly the positive-weight coordinates are active.
    let mut active = vec![false; v.len()];
    let (mut s1, mut s2) = (0.0, 0.0);
    for (i, &wi) in w.iter().enumerate() {
        if wi > 0.0 {
            active[i] = true;
            s1 += wi * v[i];
            s2 += wi * wi;
        }
    }

    // Find the first piece (−∞, t_0], [t_0, t_1], … whose right end satisfies
    // h(right) ≤ target; the root lies on that piece.
    let mut k = 0;
    while k < breaks.len() {
        let t = breaks[k].0;
        if s1 - t * s2 <= target {
            break;
        }
        // Cross every breakpoint sharing this value.
        while k < breaks.len() && breaks[k].0 == t {
            let i = breaks[k].1;
            let wi = w[i];
            if active[i] {
                active[i] = false;
                s1 -= wi * v[i];
                s2 -= wi * wi;
            } else {
                active[i] = true;
                s1 += wi * v[i];
                s2 += wi * wi;
            }
            k += 1;
        }
    }

    // Recompute the piece's coefficients from scratch for accuracy.
    let (mut s1, mut s2) = (0.0, 0.0);
    for (i, &wi) in w.iter().enumerate() {
        if active[i] {
            s1 += wi * v[i];
            s2 += wi * wi;
        }
    }
    let left = if k == 0 { f64::NEG_INFINITY } else { breaks[k - 1].0 };
    let right = breaks.get(k).map_or(f64::INFINITY, |b| b.0);
    let theta = if s2 > 0.0 {
        ((s1 - target) / s2).clamp(left, right)
    } else if left.is_finite() {
        // Flat piece: h is constant here and the target was reached at `left`.
        left
    } else if right.is_finite() {
        right
    } else {
        0.0
    };

    let y: Vec<f64> = v
        .iter()
        .zip(w)
        .map(|(&vi, &wi)| (vi - theta * wi).max(0.0))
        .collect();
    let achieved: f64 = y.iter().zip(w).map(|(y, w)| y * w).sum();
    let scale = 1.0 + target.abs() + w.iter().zip(&y).map(|(w, y)| (w * y).abs()).sum::<f64>();
    if (achieved - target).abs() > PROJECTION_TOL * scale {
        return Err(Error::EmptyProjection { target });
    }
    Ok(Projection { y, theta })
}
