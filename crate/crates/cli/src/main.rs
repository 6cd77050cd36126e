mod bench;
mod config;
mod failure;
mod instance;
mod sift;
mod solve;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use olp_core::instances_io::{generate_mkp, write_mps, MkpParams, MpsModel};

use crate::failure::{Classify, Failure};
use crate::instance::{ensure_parent, output_path};

/// Approximate LP solving with online first-order passes, and exact solving by sifting.
#[derive(Debug, Parser)]
#[command(name = "olp", version)]
struct Cli {
    /// Directory for relative output paths.
    #[arg(long, global = true, env = "OLP_OUT_DIR", value_name = "DIR")]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a knapsack instance and write it as MPS.
    Gen(GenArgs),
    /// Run online passes and report objective, violation and residual.
    Solve(solve::SolveArgs),
    /// Solve exactly by sifting, starting from an online pass.
    Sift(sift::SiftArgs),
    /// Run an experiment grid and write one CSV row per cell.
    Bench(bench::BenchArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Generator parameters, e.g. `m=8,n=1000,tau=0.25,sigma=1,seed=3`.
    #[arg(long, value_name = "SPEC")]
    gen: String,
    /// Output file; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn run_gen(args: &GenArgs, out_dir: Option<&Path>) -> Result<(), Failure> {
    let params = MkpParams::parse_spec(&args.gen).usage()?;
    let instance = generate_mkp(&params).input()?;
    let (m, n) = (instance.num_rows(), instance.num_cols());
    let model = MpsModel {
        name: format!("MKP_{m}x{n}_S{}", params.seed),
        objective_name: "PROFIT".into(),
        row_names: (0..m).map(|i| format!("R{i}")).collect(),
        col_names: (0..n).map(|j| format!("X{j}")).collect(),
        minimize: false,
        objective_offset: 0.0,
        fixed_columns: Vec::new(),
        instance,
    };
    let text = write_mps(&model);
    eprintln!("generated {},seed={} ({m} rows, {n} columns, {} nonzeros)", params.label(), params.seed, model.instance.nnz());
    match &args.out {
        None => print!("{text}"),
        Some(p) => {
            let path = output_path(p, out_dir);
            ensure_parent(&path).input()?;
            std::fs::write(&path, text).with_context(|| format!("writing {}", path.display())).input()?;
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out_dir = cli.out_dir.as_deref();
    let outcome = match &cli.command {
        Command::Gen(args) => run_gen(args, out_dir),
        Command::Solve(args) => solve::run(args, out_dir),
        Command::Sift(args) => sift::run(args, out_dir),
        Command::Bench(args) => bench::run(args, out_dir),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("olp: {failure}");
            failure.exit_code()
        }
    }
}
