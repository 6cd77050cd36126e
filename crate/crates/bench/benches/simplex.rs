use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use olp_core::instances_io::{generate_mkp, MkpParams};
use olp_core::online_core::{run_pass, RunConfig, StartPoint};
use olp_core::sifting::{sift, SiftConfig};
use olp_core::simplex_solver::solve_lp;

fn full_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_lp");
    group.sample_size(10);
    for (m, n) in [(8, 1000), (20, 2000), (50, 5000)] {
        let inst = generate_mkp(&MkpParams::new(m, n, 0.1, 1.0, 4)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(format!("{m}x{n}")), &inst, |b, inst| {
            b.iter(|| solve_lp(black_box(inst), None).unwrap())
        });
    }
    group.finish();
}

fn warm_restart(c: &mut Criterion) {
    let inst = generate_mkp(&MkpParams::new(20, 2000, 0.1, 1.0, 5)).unwrap();
    let basis = solve_lp(&inst, None).unwrap().basis;
    c.bench_function("solve_lp/warm_from_optimal", |b| {
        b.iter(|| solve_lp(black_box(&inst), Some(&basis)).unwrap())
    });
}

// sifting against a direct solve on a wide sparse instance
fn sifting(c: &mut Criterion) {
    let inst = generate_mkp(&MkpParams::new(50, 20_000, 0.05, 0.1, 6)).unwrap();
    let pass = RunConfig { duplication_k: 2, start: StartPoint::Ones, lazy: true, ..RunConfig::default() };
    let cfg = SiftConfig { reference_limit: 0, ..SiftConfig::for_duplication(2) };
    let mut group = c.benchmark_group("wide_50x20000");
    group.sample_size(10);
    group.bench_function("online_then_sift", |b| {
        b.iter(|| {
            let online = run_pass(&inst, &pass).unwrap();
            sift(black_box(&inst), &online, &cfg).unwrap()
        })
    });
    group.bench_function("direct", |b| b.iter(|| solve_lp(black_box(&inst), None).unwrap()));
    group.finish();
}

criterion_group!(benches, full_solve, warm_restart, sifting);
criterion_main!(benches);
