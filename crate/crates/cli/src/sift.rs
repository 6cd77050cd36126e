use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use clap::Args;
use olp_core::instances_io::{write_results_csv, write_trace, ResultRecord, TraceRecord};
use olp_core::lp_model::{compute_stats, constraint_violation};
use olp_core::online_core::{default_stepsize, run_pass, StartPoint};
use olp_core::sifting::{sift, SiftConfig, SiftStatus};
use olp_core::Method;

use crate::config::{pick, pick_bool, pick_opt, ConfigFile, Echo};
use crate::failure::{Classify, Failure};
use crate::instance::{
    ensure_parent, load_instance, output_path, resolve_pass, InstanceArgs, PassArgs, PassDefaults, INSTANCE_KEYS,
    PASS_KEYS,
};

#[derive(Debug, Args)]
pub struct SiftArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub pass: PassArgs,
    /// Weight of the working dual in the pricing dual (1 disables stabilization).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Price with the working dual only.
    #[arg(long)]
    pub no_anchor: bool,
    /// Initial working set threshold on the online solution (default 1/K).
    #[arg(long)]
    pub init_threshold: Option<f64>,
    #[arg(long)]
    pub max_rounds: Option<usize>,
    /// Add at most this many priced columns per round.
    #[arg(long)]
    pub max_new_columns: Option<usize>,
    /// Reduced-cost tolerance for pricing.
    #[arg(long)]
    pub pricing_tolerance: Option<f64>,
    /// Largest n for which a full reference solve measures acc.
    #[arg(long)]
    pub reference_limit: Option<usize>,
    /// Write the per-round trace as CSV.
    #[arg(long, value_name = "PATH")]
    pub trace: Option<PathBuf>,
    /// Write the result as a CSV record.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

const SIFT_KEYS: &[&str] = &[
    "alpha",
    "no-anchor",
    "init-threshold",
    "max-rounds",
    "max-new-columns",
    "pricing-tolerance",
    "reference-limit",
    "trace",
    "out",
];

pub fn run(args: &SiftArgs, out_dir: Option<&Path>) -> Result<(), Failure> {
    let file = match &args.config {
        Some(p) => ConfigFile::load(p).usage()?,
        None => ConfigFile::default(),
    };
    file.check_keys(&[INSTANCE_KEYS, PASS_KEYS, SIFT_KEYS].concat()).usage()?;

    let mut echo = Echo::default();
    echo.add("command", "sift");
    let loaded = load_instance(&args.instance, &file, &mut echo)?;
    let defaults = PassDefaults { method: Method::Explicit, k: 2, enforce: false, start: StartPoint::Ones };
    let pass = resolve_pass(&args.pass, &file, defaults, &mut echo)?;
    let base = SiftConfig::for_duplication(pass.duplication_k);
    let cfg = SiftConfig {
        init_threshold: pick(args.init_threshold, &file, "init-threshold", base.init_threshold).usage()?,
        stabilization_alpha: pick(args.alpha, &file, "alpha", base.stabilization_alpha).usage()?,
        use_online_anchor: !pick_bool(args.no_anchor.then_some(true), &file, "no-anchor", false).usage()?,
        pricing_tolerance: pick(args.pricing_tolerance, &file, "pricing-tolerance", base.pricing_tolerance).usage()?,
        max_new_columns_per_round: pick_opt(args.max_new_columns, &file, "max-new-columns").usage()?,
        max_rounds: pick(args.max_rounds, &file, "max-rounds", base.max_rounds).usage()?,
        reference_limit: pick(args.reference_limit, &file, "reference-limit", base.reference_limit).usage()?,
        ..base
    };
    cfg.validate().usage()?;
    echo.add("init-threshold", cfg.init_threshold);
    echo.add("alpha", cfg.stabilization_alpha);
    echo.add("anchor", cfg.use_online_anchor);
    echo.add("pricing-tolerance", cfg.pricing_tolerance);
    echo.add(
        "max-new-columns",
        cfg.max_new_columns_per_round.map_or_else(|| "unlimited".to_string(), |v| v.to_string()),
    );
    echo.add("max-rounds", cfg.max_rounds);
    echo.add("reference-limit", cfg.reference_limit);

    let inst = &loaded.instance;
    let stats = compute_stats(inst);
    let gamma =
        default_stepsize(&stats, inst.num_rows(), inst.num_cols(), pass.duplication_k, pass.method, pass.stepsize)
            .usage()?;
    echo.add("gamma", format!("{gamma:?}"));
    let out = pick_opt::<PathBuf>(args.out.clone(), &file, "out").usage()?.map(|p| output_path(&p, out_dir));
    let trace = pick_opt::<PathBuf>(args.trace.clone(), &file, "trace").usage()?.map(|p| output_path(&p, out_dir));
    if let Some(p) = &out {
        echo.add("out", p.display());
    }
    if let Some(p) = &trace {
        echo.add("trace", p.display());
    }
    echo.print();

    let start = Instant::now();
    let online = run_pass(inst, &pass).solve()?;
    let online_time = start.elapsed().as_secs_f64();
    let result = sift(inst, &online, &cfg).solve()?;
    let sift_time = result.trace.last().map_or(0.0, |r| r.wall_time_s);

    println!("status              = {:?}", result.status);
    println!("objective           = {:?}", result.objective);
    if let Some(v) = loaded.original_objective(result.objective) {
        println!("objective (file)    = {v:?}");
    }
    println!("certified           = {}", result.certified);
    println!("rounds              = {}", result.rounds);
    println!("initial working set = {}", result.initial_working_set.len());
    println!("final working set   = {}", result.final_working_set.len());
    match result.acc {
        Some(acc) => println!("acc                 = {acc:.4}"),
        None => println!("acc                 = (no reference solve above n = {})", cfg.reference_limit),
    }
    println!("rdc                 = {:.4}", result.rdc);
    println!("online pass (s)     = {online_time:.6}");
    println!("sifting (s)         = {sift_time:.6}");

    if let Some(path) = &trace {
        let rows: Vec<TraceRecord> = result
            .trace
            .iter()
            .map(|r| TraceRecord {
                round: r.round,
                working_set: r.working_set,
                priced: r.priced,
                objective: r.objective,
                wall_time_s: r.wall_time_s,
            })
            .collect();
        ensure_parent(path).input()?;
        let f = File::create(path).with_context(|| format!("creating {}", path.display())).input()?;
        write_trace(&rows, BufWriter::new(f)).input()?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = &out {
        let record = ResultRecord {
            instance: loaded.label.clone(),
            method: format!("sift+{}", pass.method.name()),
            k: pass.duplication_k,
            gamma: online.gamma,
            seed: pass.seed,
            objective: Some(result.objective),
            violation: Some(constraint_violation(inst, &result.x).solve()?),
            rel_opt: None,
            acc: result.acc,
            rdc: Some(result.rdc),
            rounds: Some(result.rounds),
            wall_time_s: online_time + sift_time,
        };
        ensure_parent(path).input()?;
        write_results_csv(&[record], path).input()?;
        println!("wrote {}", path.display());
    }
    match result.status {
        SiftStatus::Optimal => Ok(()),
        SiftStatus::RoundLimit => Err(Failure::Limit(format!("no certificate after {} rounds", result.rounds))),
    }
}
