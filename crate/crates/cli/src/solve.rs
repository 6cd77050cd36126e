use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;
use olp_core::instances_io::{write_results_csv, ResultRecord};
use olp_core::lp_model::{compute_stats, relative_optimality, stopping_residual};
use olp_core::online_core::{default_stepsize, run_pass, OnlineSolution, RunConfig, StartPoint};
use olp_core::simplex_solver::{solve_lp, SimplexStatus};
use olp_core::{LpInstance, Method};

use crate::config::{pick, pick_bool, pick_opt, ConfigFile, Echo};
use crate::failure::{Classify, Failure};
use crate::instance::{
    ensure_parent, load_instance, output_path, resolve_pass, InstanceArgs, PassArgs, PassDefaults, INSTANCE_KEYS,
    PASS_KEYS,
};

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub pass: PassArgs,
    /// Repeat passes, doubling K, until the stopping residual is at most this value.
    #[arg(long, value_name = "EPS")]
    pub until_eps: Option<f64>,
    /// Largest K tried by --until-eps.
    #[arg(long)]
    pub max_k: Option<usize>,
    /// Skip the exact simplex solve used for relative optimality.
    #[arg(long)]
    pub no_reference: bool,
    /// Write the result as a one-row CSV file.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// `key = value` file with defaults for any of the options above.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

const SOLVE_KEYS: &[&str] = &["until-eps", "max-k", "no-reference", "out"];

pub const DEFAULT_MAX_K: usize = 5000;

pub fn run(args: &SolveArgs, out_dir: Option<&Path>) -> Result<(), Failure> {
    let file = match &args.config {
        Some(p) => ConfigFile::load(p).usage()?,
        None => ConfigFile::default(),
    };
    file.check_keys(&[INSTANCE_KEYS, PASS_KEYS, SOLVE_KEYS].concat()).usage()?;

    let mut echo = Echo::default();
    echo.add("command", "solve");
    let loaded = load_instance(&args.instance, &file, &mut echo)?;
    let defaults = PassDefaults { method: Method::Explicit, k: 1, enforce: true, start: StartPoint::Zero };
    let cfg = resolve_pass(&args.pass, &file, defaults, &mut echo)?;
    let until_eps: Option<f64> = pick_opt(args.until_eps, &file, "until-eps").usage()?;
    let max_k = pick(args.max_k, &file, "max-k", DEFAULT_MAX_K).usage()?;
    let reference = !pick_bool(args.no_reference.then_some(true), &file, "no-reference", false).usage()?;
    let out: Option<PathBuf> = pick_opt(args.out.clone(), &file, "out").usage()?;
    if let Some(eps) = until_eps {
        if !(eps > 0.0) {
            return Err(Failure::Usage(anyhow::anyhow!("--until-eps must be positive, got {eps}")));
        }
        echo.add("until-eps", eps);
        echo.add("max-k", max_k);
    }
    echo.add("reference-solve", reference);

    let inst = &loaded.instance;
    let stats = compute_stats(inst);
    let gamma = default_stepsize(&stats, inst.num_rows(), inst.num_cols(), cfg.duplication_k, cfg.method, cfg.stepsize)
        .usage()?;
    echo.add("gamma", format!("{gamma:?}"));
    let out = out.map(|p| output_path(&p, out_dir));
    if let Some(p) = &out {
        echo.add("out", p.display());
    }
    echo.print();

    let (sol, k, elapsed, reached) = match until_eps {
        None => {
            let start = Instant::now();
            let sol = run_pass(inst, &cfg).solve()?;
            (sol, cfg.duplication_k, start.elapsed().as_secs_f64(), true)
        }
        Some(eps) => until_residual(inst, &cfg, eps, max_k)?,
    };

    let residual = stopping_residual(inst, &sol.x_hat, &sol.y_final).solve()?;
    let rel_opt = if reference { reference_ratio(inst, &sol.x_hat) } else { None };
    println!("objective           = {:?}", sol.objective);
    if let Some(v) = loaded.original_objective(sol.objective) {
        println!("objective (file)    = {v:?}");
    }
    println!("violation           = {:?}", sol.violation);
    println!("stopping residual   = {residual:?}");
    println!("K                   = {k}");
    println!("gamma               = {:?}", sol.gamma);
    if let Some(r) = rel_opt {
        println!("relative optimality = {r:.6}");
    }
    println!("wall time (s)       = {elapsed:.6}");

    if let Some(path) = out {
        let record = ResultRecord {
            instance: loaded.label.clone(),
            method: cfg.method.name().into(),
            k,
            gamma: sol.gamma,
            seed: cfg.seed,
            objective: Some(sol.objective),
            violation: Some(sol.violation),
            rel_opt,
            acc: None,
            rdc: None,
            rounds: None,
            wall_time_s: elapsed,
        };
        ensure_parent(&path).input()?;
        write_results_csv(&[record], &path).input()?;
        println!("wrote {}", path.display());
    }
    if reached {
        Ok(())
    } else {
        Err(Failure::Limit(format!(
            "stopping residual {residual:.3e} still above {} at K = {k} (cap {max_k})",
            until_eps.unwrap_or_default()
        )))
    }
}

/// Doubles K until the stopping residual drops to `eps` or K would exceed `max_k`.
/// Returns the last pass, its K, the summed pass time and whether `eps` was met.
fn until_residual(
    inst: &LpInstance,
    cfg: &RunConfig,
    eps: f64,
    max_k: usize,
) -> Result<(OnlineSolution, usize, f64, bool), Failure> {
    let mut k = cfg.duplication_k;
    let mut total = 0.0;
    loop {
        let run = RunConfig { duplication_k: k, ..cfg.clone() };
        let start = Instant::now();
        let sol = run_pass(inst, &run).solve()?;
        total += start.elapsed().as_secs_f64();
        let residual = stopping_residual(inst, &sol.x_hat, &sol.y_final).solve()?;
        println!("  pass with K {k:>5}: residual {residual:.3e}, objective {:.6e}", sol.objective);
        if residual <= eps {
            return Ok((sol, k, total, true));
        }
        if k >= max_k {
            return Ok((sol, k, total, false));
        }
        k = (k * 2).min(max_k);
    }
}

/// `|⟨c, x⟩ / opt|` against an exact solve, or `None` when that is unavailable.
pub fn reference_ratio(inst: &LpInstance, x: &[f64]) -> Option<f64> {
    match solve_lp(inst, None) {
        Ok(res) if res.status == SimplexStatus::Optimal => match relative_optimality(inst, x, res.obj) {
            Ok(r) => Some(r),
            Err(e) => {
                eprintln!("warning: relative optimality unavailable: {e}");
                None
            }
        },
        Ok(res) => {
            eprintln!("warning: reference solve ended with status {:?}", res.status);
            None
        }
        Err(e) => {
            eprintln!("warning: reference solve failed: {e}");
            None
        }
    }
}
