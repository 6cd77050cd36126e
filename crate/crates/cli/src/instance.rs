//! Instance sources and the online-pass options shared by `solve` and `sift`.

use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use olp_core::instances_io::{generate_mkp, netlib_modify, parse_mps_with, MkpParams, MpsFormat};
use olp_core::online_core::{DuplicationLayout, Method, RunConfig, StartPoint, StepsizeMode};
use olp_core::LpInstance;

use crate::config::{pick, pick_bool, pick_opt, switch, ConfigFile, Echo};
use crate::failure::{Classify, Failure};

#[derive(Debug, Args)]
pub struct InstanceArgs {
    /// Generate a knapsack instance, e.g. `m=8,n=1000,tau=0.25,sigma=1,seed=3`.
    #[arg(long, value_name = "SPEC", conflicts_with = "mps")]
    pub gen: Option<String>,
    /// Read an MPS file.
    #[arg(long, value_name = "PATH")]
    pub mps: Option<PathBuf>,
    /// Parse the MPS file by fixed column positions instead of whitespace.
    #[arg(long)]
    pub fixed_format: bool,
    /// Raise right-hand sides to at least 1e-3 and cap upper bounds at 100.
    #[arg(long)]
    pub netlib_modify: bool,
}

pub const INSTANCE_KEYS: &[&str] = &["gen", "mps", "fixed-format", "netlib-modify"];

pub struct LoadedInstance {
    pub label: String,
    pub instance: LpInstance,
    /// Sense and constant of the source file, for reporting the objective in its own terms.
    pub original: Option<(bool, f64)>,
}

impl LoadedInstance {
    pub fn original_objective(&self, value: f64) -> Option<f64> {
        self.original.map(|(minimize, offset)| {
            let v = value + offset;
            if minimize {
                -v
            } else {
                v
            }
        })
    }
}

pub fn load_instance(args: &InstanceArgs, file: &ConfigFile, echo: &mut Echo) -> Result<LoadedInstance, Failure> {
    let gen = pick_opt(args.gen.clone(), file, "gen").usage()?;
    let mps: Option<PathBuf> = pick_opt(args.mps.clone(), file, "mps").usage()?;
    let fixed = pick_bool(args.fixed_format.then_some(true), file, "fixed-format", false).usage()?;
    let modify = pick_bool(args.netlib_modify.then_some(true), file, "netlib-modify", false).usage()?;
    let loaded = match (gen, mps) {
        (Some(spec), None) => {
            let params = MkpParams::parse_spec(&spec).usage()?;
            let label = format!("{},seed={}", params.label(), params.seed);
            echo.add("instance", &label);
            let instance = generate_mkp(&params).input()?;
            LoadedInstance { label, instance, original: None }
        }
        (None, Some(path)) => {
            echo.add("instance", path.display());
            echo.add("mps-format", if fixed { "fixed" } else { "free" });
            read_mps(&path, fixed)?
        }
        (Some(_), Some(_)) => return Err(Failure::Usage(anyhow::anyhow!("give either --gen or --mps, not both"))),
        (None, None) => return Err(Failure::Usage(anyhow::anyhow!("no instance: pass --gen SPEC or --mps PATH"))),
    };
    echo.add("netlib-modify", modify);
    let instance = if modify { netlib_modify(&loaded.instance) } else { loaded.instance };
    echo.add("rows", instance.num_rows());
    echo.add("columns", instance.num_cols());
    echo.add("nnz", instance.nnz());
    Ok(LoadedInstance { instance, ..loaded })
}

fn read_mps(path: &Path, fixed: bool) -> Result<LoadedInstance, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .input()?;
    let format = if fixed { MpsFormat::Fixed } else { MpsFormat::Free };
    let model = parse_mps_with(&text, format)
        .with_context(|| format!("parsing {}", path.display()))
        .input()?;
    let label = path.file_name().map_or_else(|| model.name.clone(), |f| f.to_string_lossy().into_owned());
    Ok(LoadedInstance {
        label,
        original: Some((model.minimize, model.objective_offset)),
        instance: model.instance,
    })
}

#[derive(Debug, Args)]
pub struct PassArgs {
    /// Online update: explicit or implicit.
    #[arg(long)]
    pub method: Option<Method>,
    /// Duplication factor K.
    #[arg(long)]
    pub k: Option<usize>,
    /// Stepsize: `simple` (1/sqrt(Kmn)), `theorem`, or a positive number.
    #[arg(long)]
    pub gamma: Option<StepsizeMode>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Skip columns that no longer fit into the remaining capacity.
    #[arg(long, overrides_with = "no_enforce_feasibility")]
    pub enforce_feasibility: bool,
    #[arg(long)]
    pub no_enforce_feasibility: bool,
    /// Initial dual point: zero or ones.
    #[arg(long)]
    pub start: Option<StartPoint>,
    /// Visit order of the K copies: shuffled or blocks.
    #[arg(long)]
    pub layout: Option<DuplicationLayout>,
    /// Use the sparse explicit pass (default for explicit).
    #[arg(long, overrides_with = "dense")]
    pub lazy: bool,
    /// Use the dense explicit pass.
    #[arg(long)]
    pub dense: bool,
}

pub const PASS_KEYS: &[&str] = &["method", "k", "gamma", "seed", "enforce-feasibility", "start", "layout", "lazy"];

/// Defaults for a pass; `solve` and the sifting pre-pass differ.
pub struct PassDefaults {
    pub method: Method,
    pub k: usize,
    pub enforce: bool,
    pub start: StartPoint,
}

pub fn resolve_pass(
    args: &PassArgs,
    file: &ConfigFile,
    defaults: PassDefaults,
    echo: &mut Echo,
) -> Result<RunConfig, Failure> {
    let method = pick(args.method, file, "method", defaults.method).usage()?;
    let cfg = RunConfig {
        method,
        duplication_k: pick(args.k, file, "k", defaults.k).usage()?,
        stepsize: pick(args.gamma, file, "gamma", StepsizeMode::Simple).usage()?,
        seed: pick(args.seed, file, "seed", 0).usage()?,
        enforce_feasibility: pick_bool(
            switch(args.enforce_feasibility, args.no_enforce_feasibility),
            file,
            "enforce-feasibility",
            defaults.enforce,
        )
        .usage()?,
        start: pick(args.start.clone(), file, "start", defaults.start).usage()?,
        layout: pick(args.layout, file, "layout", DuplicationLayout::Shuffled).usage()?,
        lazy: pick_bool(switch(args.lazy, args.dense), file, "lazy", method == Method::Explicit).usage()?,
        ..RunConfig::default()
    };
    cfg.validate().usage()?;
    if cfg.duplication_k == 0 {
        return Err(Failure::Usage(anyhow::anyhow!("--k must be at least 1")));
    }
    echo.add("method", method.name());
    echo.add("k", cfg.duplication_k);
    echo.add("stepsize", cfg.stepsize);
    echo.add("seed", cfg.seed);
    echo.add("enforce-feasibility", cfg.enforce_feasibility);
    echo.add("start", &cfg.start);
    echo.add("layout", cfg.layout);
    echo.add("lazy", cfg.lazy);
    Ok(cfg)
}

/// Resolves relative output paths against the default output directory.
pub fn output_path(path: &Path, out_dir: Option<&Path>) -> PathBuf {
    match out_dir {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

pub fn ensure_parent(path: &Path) -> anyhow::Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    Ok(())
}

