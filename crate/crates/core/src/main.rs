use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gridfield::cli::{self, merge_config, parse_config_file, CliError, RunConfig};

/// Boundary-layer grid generation, field evolution, and diffusion-transport
/// solves on 1D grids.
#[derive(Parser)]
#[command(name = "gridfield", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a Péclet-calibrated boundary-layer grid (CSV: index,x,h_next,peclet_next)
    Grid(CommonArgs),
    /// Evaluate the field and step closed forms at a time (CSV: x,k,h)
    Evolve(CommonArgs),
    /// Solve the diffusion-transport problem on a grid (CSV: x,u_numeric,u_exact,abs_err)
    Solve(CommonArgs),
    /// Compare the adaptive grid against a uniform reference (CSV report)
    Bench(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Transport coefficient
    #[arg(long)]
    b: Option<String>,
    /// Diffusion coefficient (dynamic viscosity)
    #[arg(long)]
    mu: Option<String>,
    /// First grid step (must exceed 2*mu/b for refinement)
    #[arg(long)]
    h1: Option<String>,
    /// Refinement onset coordinate
    #[arg(long)]
    xi: Option<String>,
    /// Initial field value (default 1)
    #[arg(long)]
    c: Option<String>,
    /// Rate coefficient m0 (the constant m for case 2)
    #[arg(long)]
    m0: Option<String>,
    /// Rate coefficient m1
    #[arg(long)]
    m1: Option<String>,
    /// Rate coefficient m2
    #[arg(long)]
    m2: Option<String>,
    /// Field sum S
    #[arg(long = "S")]
    s: Option<String>,
    /// Evaluation time
    #[arg(long)]
    t: Option<String>,
    /// Explicit time step
    #[arg(long)]
    dt: Option<String>,
    /// Constitutive case: 1, 2, or 3
    #[arg(long)]
    case: Option<String>,
    /// Domain lower bound (default 0)
    #[arg(long)]
    lo: Option<String>,
    /// Domain upper bound (default 1)
    #[arg(long)]
    hi: Option<String>,
    /// Uniform grid step
    #[arg(long = "h-uniform")]
    h_uniform: Option<String>,
    /// Read the grid from a grid CSV file
    #[arg(long = "grid-file")]
    grid_file: Option<PathBuf>,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// key=value config file; command-line flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

fn build_config(sub: cli::Subcommand, args: CommonArgs) -> Result<RunConfig, CliError> {
    let mut params: BTreeMap<String, String> = BTreeMap::new();
    let mut put = |key: &str, v: Option<String>| {
        if let Some(v) = v {
            params.insert(key.to_string(), v);
        }
    };
    put("b", args.b);
    put("mu", args.mu);
    put("h1", args.h1);
    put("xi", args.xi);
    put("c", args.c);
    put("m0", args.m0);
    put("m1", args.m1);
    put("m2", args.m2);
    put("S", args.s);
    put("t", args.t);
    put("dt", args.dt);
    put("case", args.case);
    put("lo", args.lo);
    put("hi", args.hi);
    put("h_uniform", args.h_uniform);
    put(
        "grid_file",
        args.grid_file.map(|p| p.to_string_lossy().into_owned()),
    );
    put("out", args.out.map(|p| p.to_string_lossy().into_owned()));

    if let Some(path) = args.config {
        let text = std::fs::read_to_string(&path).map_err(|e| {
            CliError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        merge_config(&mut params, parse_config_file(&text)?);
    }
    Ok(RunConfig {
        subcommand: sub,
        params,
    })
}

fn main() -> ExitCode {
    let parsed = Cli::parse();
    let cfg = match parsed.command {
        Command::Grid(a) => build_config(cli::Subcommand::Grid, a),
        Command::Evolve(a) => build_config(cli::Subcommand::Evolve, a),
        Command::Solve(a) => build_config(cli::Subcommand::Solve, a),
        Command::Bench(a) => build_config(cli::Subcommand::Bench, a),
    };
    let result = cfg.and_then(|cfg| cli::run(&cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}
