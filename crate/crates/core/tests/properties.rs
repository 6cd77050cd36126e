mod common;

use olp_core::instances_io::{generate_mkp, MkpParams};
use olp_core::lp_model::{compute_stats, constraint_violation, dual_objective, relative_optimality};
use olp_core::online_core::{
    implicit_step, lazy_explicit_pass, project_weighted_simplex, prox_objective, run_pass, DuplicationLayout,
    Method, ProxColumn, RunConfig, StartPoint, StepsizeMode,
};
use olp_core::rng::stream_rng;
use olp_core::sifting::{sift, SiftConfig, SiftStatus};
use olp_core::simplex_solver::{enumerate_vertices_oracle, solve_lp, SimplexStatus};
use olp_core::{Error, LpInstance};
use proptest::prelude::*;
use rand::Rng;

fn small_lp(seed: u64) -> LpInstance {
    let mut rng = stream_rng(seed, 9);
    let m = rng.gen_range(1..=5);
    let n = rng.gen_range(1..=12 - m);
    common::random_small_lp(&mut rng, m, n)
}

fn small_mkp() -> impl Strategy<Value = LpInstance> {
    (1usize..8, 2usize..300, 0.02f64..1.0, prop_oneof![Just(1.0), 0.05f64..1.0], any::<u64>())
        .prop_map(|(m, n, tau, sigma, seed)| generate_mkp(&MkpParams::new(m, n, tau, sigma, seed)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn projection_matches_brute_force(
        v in prop::collection::vec(-4.0f64..4.0, 1..7),
        w_raw in prop::collection::vec(prop_oneof![Just(0.0), -3.0f64..3.0], 7),
        target in -4.0f64..4.0,
    ) {
        let w = &w_raw[..v.len()];
        match (project_weighted_simplex(&v, w, target), common::brute_force_projection(&v, w, target)) {
            (Ok(p), Some(y)) => {
                for (a, b) in p.y.iter().zip(&y) {
                    prop_assert!((a - b).abs() <= 1e-7, "{:?} vs {:?}", p.y, y);
                }
            }
            (Err(Error::EmptyProjection { .. }), None) => {}
            (got, want) => prop_assert!(false, "projection {:?}, oracle {:?}", got.map(|p| p.y), want),
        }
    }

    #[test]
    fn implicit_step_minimizes_prox(
        z in prop::collection::vec(0.0f64..2.0, 1..4),
        a_raw in prop::collection::vec(prop_oneof![Just(0.0), -2.0f64..3.0], 3),
        c in -1.0f64..3.0,
        upper in 0.25f64..2.0,
        gamma in 0.01f64..1.0,
    ) {
        let m = z.len();
        let rows: Vec<usize> = (0..m).filter(|&i| a_raw[i] != 0.0).collect();
        let values: Vec<f64> = rows.iter().map(|&i| a_raw[i]).collect();
        let inst = LpInstance::new(
            m, vec![0, rows.len()], rows, values, vec![1.0; m], vec![c], vec![upper],
        ).unwrap();
        let col = ProxColumn { a: inst.column(0), c, upper };
        let d = vec![0.3; m];
        let sol = implicit_step(&z, col, &d, gamma).unwrap();
        prop_assert!(sol.y_plus.iter().all(|&y| y >= 0.0));
        prop_assert!((0.0..=upper).contains(&sol.x));
        let best = prox_objective(&sol.y_plus, &z, col, &d, gamma);
        // Grid oracle over the nonnegative box around z.
        let steps = 24;
        let hi = 4.0;
        let mut idx = vec![0usize; m];
        loop {
            let y: Vec<f64> = idx.iter().map(|&k| hi * k as f64 / steps as f64).collect();
            let val = prox_objective(&y, &z, col, &d, gamma);
            prop_assert!(best <= val + 1e-9, "grid point {:?} beats step: {} < {}", y, val, best);
            let mut pos = 0;
            while pos < m && idx[pos] == steps {
                idx[pos] = 0;
                pos += 1;
            }
            if pos == m {
                break;
            }
            idx[pos] += 1;
        }
    }

    #[test]
    fn lazy_equals_dense(
        inst in small_mkp(),
        k in 1usize..4,
        seed in any::<u64>(),
        enforce in any::<bool>(),
        ones in any::<bool>(),
        blocks in any::<bool>(),
    ) {
        let cfg = RunConfig {
            duplication_k: k,
            seed,
            enforce_feasibility: enforce,
            start: if ones { StartPoint::Ones } else { StartPoint::Zero },
            layout: if blocks { DuplicationLayout::Blocks } else { DuplicationLayout::Shuffled },
            ..RunConfig::default()
        };
        let dense = run_pass(&inst, &cfg).unwrap();
        let lazy = lazy_explicit_pass(&inst, &RunConfig { lazy: true, ..cfg }).unwrap();
        prop_assert_eq!(dense.x_hat, lazy.x_hat);
        prop_assert_eq!(dense.y_final, lazy.y_final);
        prop_assert_eq!(dense.objective.to_bits(), lazy.objective.to_bits());
    }

    #[test]
    fn telescoped_violation_bound(inst in small_mkp(), k in 1usize..5, seed in any::<u64>(), gamma in 1e-4f64..0.5) {
        let cfg = RunConfig {
            duplication_k: k,
            seed,
            stepsize: StepsizeMode::Fixed(gamma),
            ..RunConfig::default()
        };
        let sol = run_pass(&inst, &cfg).unwrap();
        let y_norm = sol.y_final.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!(sol.violation <= y_norm / (k as f64 * gamma) * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn enforced_passes_are_feasible(inst in small_mkp(), k in 1usize..5, seed in any::<u64>(), implicit in any::<bool>()) {
        let cfg = RunConfig {
            method: if implicit { Method::Implicit } else { Method::Explicit },
            duplication_k: k,
            seed,
            enforce_feasibility: true,
            ..RunConfig::default()
        };
        let sol = run_pass(&inst, &cfg).unwrap();
        prop_assert!(sol.violation <= 1e-9 * (1.0 + inst.rhs().iter().sum::<f64>()));
    }

    #[test]
    fn same_seed_same_solution(inst in small_mkp(), seed in any::<u64>(), implicit in any::<bool>()) {
        let cfg = RunConfig {
            method: if implicit { Method::Implicit } else { Method::Explicit },
            duplication_k: 2,
            seed,
            ..RunConfig::default()
        };
        prop_assert_eq!(run_pass(&inst, &cfg).unwrap(), run_pass(&inst, &cfg).unwrap());
    }

    #[test]
    fn dual_iterates_respect_bounds(inst in small_mkp(), seed in any::<u64>(), implicit in any::<bool>(), k in 1usize..4) {
        let method = if implicit { Method::Implicit } else { Method::Explicit };
        let cfg = RunConfig { method, duplication_k: k, seed, ..RunConfig::default() };
        let sol = run_pass(&inst, &cfg).unwrap();
        let stats = compute_stats(&inst);
        let b = olp_core::online_core::dual_iterate_bounds(&stats, inst.num_rows(), sol.gamma, method);
        prop_assert!(sol.max_dual_norm.unwrap() <= b.norm * (1.0 + 1e-9));
        if let Some(step) = b.step {
            prop_assert!(sol.max_dual_step.unwrap() <= step * (1.0 + 1e-9) + 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn simplex_matches_oracle(seed in any::<u64>()) {
        let inst = small_lp(seed);
        let res = solve_lp(&inst, None).unwrap();
        match enumerate_vertices_oracle(&inst) {
            Ok((value, _)) => {
                prop_assert_eq!(res.status, SimplexStatus::Optimal);
                prop_assert!((res.obj - value).abs() <= 1e-8 * (1.0 + value.abs()));
                let x = res.x_star.as_ref().unwrap();
                prop_assert!(constraint_violation(&inst, x).unwrap() <= 1e-7);
                prop_assert!(x.iter().zip(inst.upper()).all(|(&x, &u)| x >= -1e-9 && x <= u + 1e-9));
            }
            Err(Error::OracleInfeasible) => prop_assert_eq!(res.status, SimplexStatus::Infeasible),
            Err(e) => prop_assert!(false, "oracle failed: {}", e),
        }
    }

    #[test]
    fn warm_start_from_optimum_needs_no_pivots(seed in any::<u64>()) {
        let inst = small_lp(seed);
        let cold = solve_lp(&inst, None).unwrap();
        prop_assume!(cold.status == SimplexStatus::Optimal);
        let warm = solve_lp(&inst, Some(&cold.basis)).unwrap();
        prop_assert!(warm.warm_started);
        prop_assert_eq!(warm.iterations, 0);
        prop_assert!((warm.obj - cold.obj).abs() <= 1e-9 * (1.0 + cold.obj.abs()));
    }

    #[test]
    fn objective_monotone_in_columns(inst in small_mkp(), cut in 0.0f64..1.0) {
        let n = inst.num_cols();
        let small: Vec<usize> = (0..n).filter(|j| (*j as f64) < cut * n as f64 / 2.0).collect();
        let large: Vec<usize> = (0..n).filter(|j| (*j as f64) < cut * n as f64).collect();
        let full = solve_lp(&inst, None).unwrap().obj;
        let obj = |cols: &[usize]| if cols.is_empty() { 0.0 } else { solve_lp(&inst.select_columns(cols), None).unwrap().obj };
        let (a, b) = (obj(&small), obj(&large));
        prop_assert!(a <= b + 1e-9 * (1.0 + b.abs()));
        prop_assert!(b <= full + 1e-9 * (1.0 + full.abs()));
    }

    #[test]
    fn dual_objective_bounds_optimum(seed in any::<u64>(), y_seed in any::<u64>()) {
        let inst = small_lp(seed);
        prop_assume!(inst.rhs().iter().all(|&b| b >= 0.0));
        let (opt, x) = enumerate_vertices_oracle(&inst).unwrap();
        let mut rng = stream_rng(y_seed, 4);
        for _ in 0..20 {
            let y: Vec<f64> = (0..inst.num_rows()).map(|_| rng.gen_range(0.0..3.0)).collect();
            prop_assert!(dual_objective(&inst, &y).unwrap().value >= opt - 1e-9 * (1.0 + opt.abs()));
        }
        if opt != 0.0 {
            prop_assert_eq!(relative_optimality(&inst, &x, opt).unwrap(), 1.0);
        }
    }

    #[test]
    fn sift_matches_oracle_on_small_lps(seed in any::<u64>(), k in 1usize..4) {
        let inst = small_lp(seed);
        prop_assume!(inst.rhs().iter().all(|&b| b > 0.0));
        let (opt, _) = enumerate_vertices_oracle(&inst).unwrap();
        let cfg = RunConfig {
            duplication_k: k,
            seed,
            start: StartPoint::Ones,
            require_positive_rate: false,
            ..RunConfig::default()
        };
        let online = run_pass(&inst, &cfg).unwrap();
        let res = sift(&inst, &online, &SiftConfig::for_duplication(k)).unwrap();
        prop_assert_eq!(res.status, SiftStatus::Optimal);
        prop_assert!(res.certified);
        prop_assert!((res.objective - opt).abs() <= 1e-8 * (1.0 + opt.abs()));
        for pair in res.trace.windows(2) {
            prop_assert!(pair[1].objective >= pair[0].objective - 1e-9 * (1.0 + pair[0].objective.abs()));
        }
    }
}

#[test]
fn stabilization_with_unit_alpha_is_a_no_op() {
    for seed in 0..6 {
        let inst = generate_mkp(&MkpParams::new(15, 1500, 0.1, 0.5, seed)).unwrap();
        let cfg = RunConfig { duplication_k: 2, seed, start: StartPoint::Ones, ..RunConfig::default() };
        let online = run_pass(&inst, &cfg).unwrap();
        let unit = SiftConfig { stabilization_alpha: 1.0, ..SiftConfig::for_duplication(2) };
        let plain = SiftConfig { use_online_anchor: false, ..SiftConfig::for_duplication(2) };
        let a = sift(&inst, &online, &unit).unwrap();
        let b = sift(&inst, &online, &plain).unwrap();
        assert_eq!(a.rounds, b.rounds);
        assert_eq!(a.final_working_set, b.final_working_set);
        assert_eq!(a.objective.to_bits(), b.objective.to_bits());
        let shape = |r: &olp_core::SiftResult| {
            r.trace.iter().map(|t| (t.round, t.working_set, t.priced, t.objective.to_bits())).collect::<Vec<_>>()
        };
        assert_eq!(shape(&a), shape(&b));
    }
}

#[test]
fn generator_density_concentrates() {
    let inst = generate_mkp(&MkpParams::new(100, 100_000, 0.25, 0.1, 3)).unwrap();
    let density = inst.nnz() as f64 / (100.0 * 100_000.0);
    assert!((density - 0.1).abs() <= 0.01, "density {density}");
    assert!(inst.rhs().iter().all(|&b| b > 0.0));
}

#[test]
fn stats_match_dense_scan() {
    let mut rng = stream_rng(5, 5);
    for _ in 0..50 {
        let m = rng.gen_range(1..6);
        let n = rng.gen_range(1..10);
        let inst = common::random_small_lp(&mut rng, m, n);
        let stats = compute_stats(&inst);
        let mut a_bar = 0.0_f64;
        for j in 0..n {
            for i in 0..m {
                let a = inst.column(j).iter().find(|&(r, _)| r == i).map_or(0.0, |(_, v)| v);
                a_bar = a_bar.max(a.abs());
            }
        }
        let c_bar = inst.obj().iter().fold(0.0_f64, |acc, c| acc.max(c.abs()));
        let d_lo = inst.rhs().iter().fold(f64::INFINITY, |acc, &b| acc.min(b)) / n as f64;
        let d_hi = inst.rhs().iter().fold(f64::NEG_INFINITY, |acc, &b| acc.max(b)) / n as f64;
        assert_eq!(stats.a_bar, a_bar);
        assert_eq!(stats.c_bar, c_bar);
        assert_eq!(stats.d_lo, d_lo);
        assert_eq!(stats.d_hi, d_hi);
        assert_eq!(stats.assumptions_ok, d_lo > 0.0);
    }
}

#[test]
fn feasible_point_has_no_violation_under_doubled_rhs() {
    let mut rng = stream_rng(8, 2);
    for _ in 0..50 {
        let inst = common::random_small_lp(&mut rng, 3, 5);
        let Ok((_, x)) = enumerate_vertices_oracle(&inst) else { continue };
        let doubled = inst.with_rhs(inst.rhs().iter().map(|b| 2.0 * b.abs().max(*b)).collect()).unwrap();
        assert!(constraint_violation(&doubled, &x).unwrap() <= 1e-9);
    }
}
