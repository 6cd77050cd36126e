use olp_core::instances_io::{
    generate_mkp, netlib_modify, parse_mps, read_results, write_mps, write_results_csv, MkpParams, ResultRecord,
    RESULTS_HEADER,
};
use olp_core::online_core::{run_pass, Method, RunConfig, StepsizeMode};
use olp_core::simplex_solver::{enumerate_vertices_oracle, solve_lp, SimplexStatus};

fn fixture(name: &str) -> String {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

#[test]
fn toy_fixture_solves_to_half() {
    let model = parse_mps(&fixture("toy05.mps")).unwrap();
    assert!(!model.minimize);
    assert_eq!(model.instance.num_rows(), 1);
    let res = solve_lp(&model.instance, None).unwrap();
    assert_eq!(res.status, SimplexStatus::Optimal);
    assert!((res.obj - 0.5).abs() <= 1e-12);

    let cfg = RunConfig {
        method: Method::Implicit,
        stepsize: StepsizeMode::Fixed(0.005),
        enforce_feasibility: true,
        ..RunConfig::default()
    };
    let sol = run_pass(&model.instance, &cfg).unwrap();
    assert!((sol.objective - 0.5).abs() <= 1e-9, "{}", sol.objective);
}

#[test]
fn mixed_row_fixture() {
    let model = parse_mps(&fixture("blend.mps")).unwrap();
    assert!(model.minimize);
    // DEMAND, SUPPLY, BALANCE pair, MIXED pair.
    assert_eq!(model.instance.num_rows(), 6);
    assert_eq!(model.instance.num_cols(), 3);
    let res = solve_lp(&model.instance, None).unwrap();
    let (oracle, _) = enumerate_vertices_oracle(&model.instance).unwrap();
    assert!((res.obj - oracle).abs() <= 1e-9);
    // Hand solution: B = 0.75, A = B + 0.5, C = 1 − B.
    assert!((model.original_objective(res.obj) - 5.125).abs() <= 1e-9);
}

#[test]
fn fixtures_round_trip() {
    for name in ["toy05.mps", "blend.mps"] {
        let first = parse_mps(&fixture(name)).unwrap();
        let second = parse_mps(&write_mps(&first)).unwrap();
        assert_eq!(first.instance, second.instance, "{name}");
        assert_eq!(first.row_names, second.row_names);
        assert_eq!(first.col_names, second.col_names);
        assert_eq!(first.minimize, second.minimize);
    }
}

#[test]
fn netlib_transform_is_idempotent() {
    let model = parse_mps(&fixture("blend.mps")).unwrap();
    let once = netlib_modify(&model.instance);
    assert_eq!(netlib_modify(&once), once);
    assert!(once.rhs().iter().all(|&b| !(0.0..1e-3).contains(&b)));
}

#[test]
fn many_records_one_line_each() {
    let records: Vec<ResultRecord> = (0..10_000)
        .map(|i| ResultRecord {
            instance: "mkp:m=5,n=100,tau=0.25,sigma=1".into(),
            method: "explicit".into(),
            k: 1 + i % 7,
            gamma: 1.0 / (1.0 + i as f64),
            seed: i as u64,
            objective: Some(i as f64 * 0.1),
            violation: if i % 13 == 0 { None } else { Some(0.0) },
            rel_opt: None,
            acc: None,
            rdc: None,
            rounds: None,
            wall_time_s: 1e-3,
        })
        .collect();
    let dir = std::env::temp_dir().join(format!("olp-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("results.csv");
    write_results_csv(&records, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 10_001);
    assert_eq!(text.lines().next().unwrap(), RESULTS_HEADER.join(","));
    let back = read_results(text.as_bytes()).unwrap();
    assert_eq!(back, records);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn unwritable_destination_names_path() {
    let path = std::path::Path::new("/nonexistent-dir/sub/results.csv");
    let err = write_results_csv(&[], path).unwrap_err();
    assert!(err.to_string().contains("/nonexistent-dir/sub/results.csv"), "{err}");
}

#[test]
fn generated_instances_are_reproducible_from_labels() {
    for seed in [0, 1, 99] {
        let p = MkpParams::new(12, 400, 0.3, 0.2, seed);
        let q = MkpParams::parse_spec(&format!("{},seed={seed}", p.label())).unwrap();
        assert_eq!(generate_mkp(&p).unwrap(), generate_mkp(&q).unwrap());
    }
}
