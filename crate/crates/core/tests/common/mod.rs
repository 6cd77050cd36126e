#![allow(dead_code)]

use olp_core::LpInstance;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Exact projection onto `{y ≥ 0 : ⟨w, y⟩ = target}` by trying every support.
/// `None` when the set is empty.
pub fn brute_force_projection(v: &[f64], w: &[f64], target: f64) -> Option<Vec<f64>> {
    let n = v.len();
    let weighted: Vec<usize> = (0..n).filter(|&i| w[i] != 0.0).collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1 << weighted.len()) {
        let support: Vec<usize> = weighted
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &i)| i)
            .collect();
        let s2: f64 = support.iter().map(|&i| w[i] * w[i]).sum();
        let s1: f64 = support.iter().map(|&i| w[i] * v[i]).sum();
        // On the support, y_i = v_i − θ w_i; off it y_i = 0 (or v_i⁺ for zero weights).
        let thetas: Vec<f64> = if s2 > 0.0 {
            vec![(s1 - target) / s2]
        } else if target == 0.0 {
            // Empty support: any θ keeping every weighted coordinate inactive.
            weighted.iter().map(|&i| v[i] / w[i]).chain([0.0]).collect()
        } else {
            continue;
        };
        for theta in thetas {
            let mut y = vec![0.0; n];
            let mut ok = true;
            for i in 0..n {
                let val = v[i] - theta * w[i];
                if w[i] == 0.0 {
                    y[i] = v[i].max(0.0);
                } else if support.contains(&i) {
                    ok &= val >= -1e-12;
                    y[i] = val.max(0.0);
                } else {
                    ok &= val <= 1e-12;
                }
            }
            let achieved: f64 = y.iter().zip(w).map(|(a, b)| a * b).sum();
            ok &= (achieved - target).abs() <= 1e-9 * (1.0 + target.abs());
            if ok {
                let dist: f64 = y.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
                if best.as_ref().is_none_or(|(d, _)| dist < *d) {
                    best = Some((dist, y));
                }
            }
        }
    }
    best.map(|(_, y)| y)
}

/// Small dense LP with mixed-sign entries, occasional negative right-hand
/// sides and finite upper bounds.
pub fn random_small_lp(rng: &mut ChaCha8Rng, m: usize, n: usize) -> LpInstance {
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            (0..n)
                .map(|_| {
                    if rng.gen_bool(0.25) {
                        0.0
                    } else {
                        (rng.gen_range(-2.0..5.0_f64) * 4.0).round() / 4.0
                    }
                })
                .collect()
        })
        .collect();
    let rhs = (0..m)
        .map(|_| if rng.gen_bool(0.15) { rng.gen_range(-1.0..0.0) } else { rng.gen_range(0.5..6.0) })
        .collect();
    let obj = (0..n).map(|_| rng.gen_range(-1.0..5.0)).collect();
    let upper = (0..n).map(|_| rng.gen_range(0.5..3.0)).collect();
    LpInstance::from_dense(&rows, rhs, obj, Some(upper)).expect("valid random LP")
}
