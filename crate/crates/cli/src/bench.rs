//! Experiment grids: every (size, τ, repetition) group shares one generated
//! instance and one exact solve, then runs each (method, K) cell on it.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, ValueEnum};
use olp_core::instances_io::{generate_mkp, write_results_csv, MkpParams, ResultRecord};
use olp_core::lp_model::relative_optimality;
use olp_core::online_core::{run_pass, Method, RunConfig, StartPoint, StepsizeMode};
use olp_core::rng::derive_seed;
use olp_core::simplex_solver::{solve_lp, SimplexStatus};
use rayon::prelude::*;

use crate::config::{pick, pick_bool, pick_opt, switch, ConfigFile, Echo};
use crate::failure::{Classify, Failure};
use crate::instance::{ensure_parent, output_path};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Relative optimality against τ for both updates at K = 1 and 8.
    PaperFig1,
    /// Relative optimality against K ∈ {1, 2, 4, 8, 16, 32} at fixed τ.
    PaperFig2,
    /// Explicit-pass wall time against nnz.
    Cputime,
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Preset as ValueEnum>::from_str(s, false)
    }
}

impl Preset {
    fn name(self) -> &'static str {
        match self {
            Preset::PaperFig1 => "paper-fig1",
            Preset::PaperFig2 => "paper-fig2",
            Preset::Cputime => "cputime",
        }
    }
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Built-in grid; the options below override its fields.
    #[arg(long)]
    pub preset: Option<Preset>,
    /// Repetitions per cell.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Comma-separated sizes `MxN` or `MxNxSIGMA`, e.g. `5x100,8x1000x0.1`. Empty for no cells.
    #[arg(long)]
    pub sizes: Option<String>,
    /// Comma-separated tightness values.
    #[arg(long)]
    pub taus: Option<String>,
    /// Comma-separated duplication factors.
    #[arg(long)]
    pub ks: Option<String>,
    /// Comma-separated methods.
    #[arg(long)]
    pub methods: Option<String>,
    /// Density for sizes that do not give one.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub gamma: Option<StepsizeMode>,
    #[arg(long, overrides_with = "no_enforce_feasibility")]
    pub enforce_feasibility: bool,
    #[arg(long)]
    pub no_enforce_feasibility: bool,
    #[arg(long)]
    pub start: Option<StartPoint>,
    /// Base seed; repetition seeds are derived from it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Skip the exact solve (no relative optimality column).
    #[arg(long)]
    pub no_reference: bool,
    /// Worker threads; 0 uses all cores.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

const BENCH_KEYS: &[&str] = &[
    "preset",
    "reps",
    "sizes",
    "taus",
    "ks",
    "methods",
    "sigma",
    "gamma",
    "enforce-feasibility",
    "start",
    "seed",
    "no-reference",
    "threads",
    "out",
];

const PAPER_SIZES: &str = "5x100,8x1000,16x2000,32x4000";

/// Field values of a grid before flag and file overrides.
struct GridDefaults {
    sizes: String,
    taus: String,
    ks: String,
    methods: String,
    reps: usize,
    enforce: bool,
    reference: bool,
    threads: usize,
}

fn preset_defaults(preset: Option<Preset>) -> GridDefaults {
    let fig = |taus: String, ks: &str| GridDefaults {
        sizes: PAPER_SIZES.into(),
        taus,
        ks: ks.into(),
        methods: "explicit,implicit".into(),
        reps: 20,
        enforce: true,
        reference: true,
        threads: 0,
    };
    match preset {
        Some(Preset::PaperFig1) => {
            let taus: Vec<String> = (0..10).map(|i| format!("{}", 10f64.powf(-2.0 + 2.0 * i as f64 / 9.0))).collect();
            fig(taus.join(","), "1,8")
        }
        Some(Preset::PaperFig2) => fig("0.25".into(), "1,2,4,8,16,32"),
        // nnz from 1e4 to 1e6 at n = 1e4, plus two wider instances.
        Some(Preset::Cputime) => GridDefaults {
            sizes: "10x10000x0.1,100x10000x0.1,1000x10000x0.1,100x100000x0.01,100x100000x0.1".into(),
            taus: "0.25".into(),
            ks: "1".into(),
            methods: "explicit".into(),
            reps: 3,
            enforce: false,
            reference: false,
            threads: 1,
        },
        None => GridDefaults {
            sizes: String::new(),
            taus: "0.25".into(),
            ks: "1".into(),
            methods: "explicit,implicit".into(),
            reps: 1,
            enforce: true,
            reference: true,
            threads: 0,
        },
    }
}

fn parse_list<T: FromStr>(what: &str, text: &str) -> anyhow::Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| anyhow!("bad {what} entry {s:?}: {e}")))
        .collect()
}

fn parse_sizes(text: &str, sigma: f64) -> anyhow::Result<Vec<(usize, usize, f64)>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let parts: Vec<&str> = s.split('x').collect();
            let bad = || anyhow!("bad size {s:?}: expected MxN or MxNxSIGMA");
            match parts.as_slice() {
                [m, n] => Ok((m.parse().map_err(|_| bad())?, n.parse().map_err(|_| bad())?, sigma)),
                [m, n, d] => Ok((m.parse().map_err(|_| bad())?, n.parse().map_err(|_| bad())?, d.parse().map_err(|_| bad())?)),
                _ => Err(bad()),
            }
        })
        .collect()
}

struct Group {
    params: MkpParams,
}

struct Grid {
    groups: Vec<Group>,
    methods: Vec<Method>,
    ks: Vec<usize>,
    template: RunConfig,
    reference: bool,
}

pub fn run(args: &BenchArgs, out_dir: Option<&Path>) -> Result<(), Failure> {
    let file = match &args.config {
        Some(p) => ConfigFile::load(p).usage()?,
        None => ConfigFile::default(),
    };
    file.check_keys(BENCH_KEYS).usage()?;
    let preset: Option<Preset> = pick_opt(args.preset, &file, "preset").usage()?;
    let d = preset_defaults(preset);
    let sigma = pick(args.sigma, &file, "sigma", 1.0).usage()?;
    let sizes = parse_sizes(&pick(args.sizes.clone(), &file, "sizes", d.sizes).usage()?, sigma).usage()?;
    let taus: Vec<f64> = parse_list("tau", &pick(args.taus.clone(), &file, "taus", d.taus).usage()?).usage()?;
    let ks: Vec<usize> = parse_list("K", &pick(args.ks.clone(), &file, "ks", d.ks).usage()?).usage()?;
    let methods: Vec<Method> =
        parse_list("method", &pick(args.methods.clone(), &file, "methods", d.methods).usage()?).usage()?;
    let reps = pick(args.reps, &file, "reps", d.reps).usage()?;
    let base_seed = pick(args.seed, &file, "seed", 0u64).usage()?;
    let reference = !pick_bool(args.no_reference.then_some(true), &file, "no-reference", !d.reference).usage()?;
    let threads = pick(args.threads, &file, "threads", d.threads).usage()?;
    let template = RunConfig {
        stepsize: pick(args.gamma, &file, "gamma", StepsizeMode::Simple).usage()?,
        enforce_feasibility: pick_bool(
            switch(args.enforce_feasibility, args.no_enforce_feasibility),
            &file,
            "enforce-feasibility",
            d.enforce,
        )
        .usage()?,
        start: pick(args.start.clone(), &file, "start", StartPoint::Zero).usage()?,
        ..RunConfig::default()
    };
    if ks.contains(&0) {
        return Err(Failure::Usage(anyhow!("K values must be at least 1")));
    }
    let default_name = format!("bench-{}.csv", preset.map_or("grid", Preset::name));
    let out: PathBuf = pick(args.out.clone(), &file, "out", PathBuf::from(default_name)).usage()?;
    let out = output_path(&out, out_dir);

    let mut groups = Vec::new();
    for &(m, n, sigma) in &sizes {
        for &tau in &taus {
            for rep in 0..reps as u64 {
                let params = MkpParams::new(m, n, tau, sigma, derive_seed(base_seed, 0, rep));
                params.validate().usage()?;
                groups.push(Group { params });
            }
        }
    }

    let mut echo = Echo::default();
    echo.add("command", "bench");
    echo.add("preset", preset.map_or("none", Preset::name));
    echo.add(
        "sizes",
        sizes.iter().map(|(m, n, s)| format!("{m}x{n}x{s}")).collect::<Vec<_>>().join(","),
    );
    echo.add("taus", taus.iter().map(|t| format!("{t}")).collect::<Vec<_>>().join(","));
    echo.add("ks", ks.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(","));
    echo.add("methods", methods.iter().map(|m| m.name()).collect::<Vec<_>>().join(","));
    echo.add("reps", reps);
    echo.add("seed", base_seed);
    echo.add("stepsize", template.stepsize);
    echo.add("enforce-feasibility", template.enforce_feasibility);
    echo.add("start", &template.start);
    echo.add("reference-solve", reference);
    echo.add("threads", if threads == 0 { "all".to_string() } else { threads.to_string() });
    echo.add("cells", groups.len() * methods.len() * ks.len());
    echo.add("out", out.display());
    echo.print();

    let grid = Grid { groups, methods, ks, template, reference };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().usage()?;
    let per_group: Vec<Vec<ResultRecord>> = pool.install(|| grid.groups.par_iter().map(|g| run_group(&grid, g)).collect());
    let records: Vec<ResultRecord> = per_group.into_iter().flatten().collect();

    ensure_parent(&out).input()?;
    write_results_csv(&records, &out).input()?;
    summarize(&records);
    println!("wrote {} rows to {}", records.len(), out.display());

    let failed = records.iter().filter(|r| r.objective.is_none()).count();
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Cells { failed, total: records.len() })
    }
}

fn run_group(grid: &Grid, group: &Group) -> Vec<ResultRecord> {
    let p = &group.params;
    let label = p.label();
    let blank = |method: Method, k: usize| ResultRecord {
        instance: label.clone(),
        method: method.name().into(),
        k,
        gamma: f64::NAN,
        seed: p.seed,
        objective: None,
        violation: None,
        rel_opt: None,
        acc: None,
        rdc: None,
        rounds: None,
        wall_time_s: 0.0,
    };
    let cells = grid.methods.iter().flat_map(|&m| grid.ks.iter().map(move |&k| (m, k)));
    let inst = match generate_mkp(p) {
        Ok(inst) => inst,
        Err(e) => {
            eprintln!("cell {label},seed={} failed: {e}", p.seed);
            return cells.map(|(m, k)| blank(m, k)).collect();
        }
    };
    let opt = if grid.reference { reference_value(&inst).map_err(|e| eprintln!("{label}: {e:#}")).ok() } else { None };
    cells
        .map(|(method, k)| {
            let cfg = RunConfig {
                method,
                duplication_k: k,
                seed: p.seed,
                lazy: method == Method::Explicit,
                ..grid.template.clone()
            };
            let start = Instant::now();
            match run_pass(&inst, &cfg) {
                Ok(sol) => ResultRecord {
                    gamma: sol.gamma,
                    objective: Some(sol.objective),
                    violation: Some(sol.violation),
                    rel_opt: opt.and_then(|o| relative_optimality(&inst, &sol.x_hat, o).ok()),
                    wall_time_s: start.elapsed().as_secs_f64(),
                    ..blank(method, k)
                },
                Err(e) => {
                    eprintln!("cell {label},seed={} {} K={k} failed: {e}", p.seed, method.name());
                    blank(method, k)
                }
            }
        })
        .collect()
}

fn reference_value(inst: &olp_core::LpInstance) -> anyhow::Result<f64> {
    let res = solve_lp(inst, None).context("reference solve")?;
    if res.status != SimplexStatus::Optimal {
        bail!("reference solve ended with status {:?}", res.status);
    }
    Ok(res.obj)
}

/// Per (instance, method, K) means, in first-appearance order.
fn summarize(records: &[ResultRecord]) {
    if records.is_empty() {
        println!("no cells");
        return;
    }
    let mut order = Vec::new();
    let mut groups: BTreeMap<(String, String, usize), Vec<&ResultRecord>> = BTreeMap::new();
    for r in records {
        let key = (r.instance.clone(), r.method.clone(), r.k);
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(r);
    }
    println!("{:<44} {:<9} {:>5} {:>5} {:>10} {:>11} {:>10}", "instance", "method", "K", "ok", "rel_opt", "violation", "time_s");
    for key in order {
        let rows = &groups[&key];
        let ok: Vec<&&ResultRecord> = rows.iter().filter(|r| r.objective.is_some()).collect();
        let mean = |f: &dyn Fn(&ResultRecord) -> Option<f64>| {
            let vals: Vec<f64> = ok.iter().filter_map(|r| f(r)).collect();
            if vals.is_empty() {
                "-".to_string()
            } else {
                format!("{:.4}", vals.iter().sum::<f64>() / vals.len() as f64)
            }
        };
        println!(
            "{:<44} {:<9} {:>5} {:>5} {:>10} {:>11} {:>10}",
            key.0,
            key.1,
            key.2,
            format!("{}/{}", ok.len(), rows.len()),
            mean(&|r| r.rel_opt),
            mean(&|r| r.violation),
            mean(&|r| Some(r.wall_time_s)),
        );
    }
}
