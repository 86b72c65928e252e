//! Command pipelines behind the `gridfield` binary.
//!
//! Each subcommand reads its parameters from a key-value map assembled from
//! command-line flags and an optional `key=value` config file (flags win).
//! CSV results go to `--out` when given, otherwise to standard output; the
//! informational lines then move to standard error so the CSV stays clean.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use crate::bench::{compare, BenchEntry, BenchReport};
use crate::error::Error;
use crate::gridgen::{
    calibrate, generate_boundary_layer_grid, h_case3, step_field, uniform_grid, Grid1D,
};
use crate::kfield::{evolve_constant_m, EvolutionParams, GradientHistory, SumMode};
use crate::kfield::k_case3_first_order;
use crate::numfmt::g17;
use crate::solver::{error_norms, solve, TransportProblem};

/// Pipeline selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Grid,
    Evolve,
    Solve,
    Bench,
}

/// Parsed invocation: a subcommand plus its key-value parameters.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub params: BTreeMap<String, String>,
}

/// Failure modes of a pipeline run, split by exit code: configuration
/// problems exit 2, runtime and numeric problems exit 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Runtime(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

/// Every parameter key a config file or flag may set.
pub const KNOWN_KEYS: &[&str] = &[
    "b", "mu", "h1", "xi", "c", "m0", "m1", "m2", "S", "t", "dt", "case", "lo", "hi",
    "h_uniform", "grid_file", "out", "l1", "l2sq",
];

/// Parse a `key=value` config file: one pair per line, `#` starts a comment,
/// blank lines are ignored.
pub fn parse_config_file(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("config line {}: expected key=value", lineno + 1))
        })?;
        let key = key.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!(
                "config line {}: unknown key '{key}'",
                lineno + 1
            )));
        }
        pairs.push((key, value.trim().to_string()));
    }
    Ok(pairs)
}

/// Fill `params` with config-file pairs, keeping existing (flag) values.
pub fn merge_config(params: &mut BTreeMap<String, String>, pairs: Vec<(String, String)>) {
    for (k, v) in pairs {
        params.entry(k).or_insert(v);
    }
}

fn parse_finite(key: &str, raw: &str) -> CliResult<f64> {
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("parameter '{key}': '{raw}' is not a number")))?;
    if !v.is_finite() {
        return Err(CliError::Config(format!(
            "parameter '{key}' must be finite, got {raw}"
        )));
    }
    Ok(v)
}

fn req_f64(cfg: &RunConfig, key: &str) -> CliResult<f64> {
    match cfg.params.get(key) {
        Some(raw) => parse_finite(key, raw),
        None => Err(CliError::Config(format!("missing required parameter '{key}'"))),
    }
}

fn opt_f64(cfg: &RunConfig, key: &str, default: f64) -> CliResult<f64> {
    match cfg.params.get(key) {
        Some(raw) => parse_finite(key, raw),
        None => Ok(default),
    }
}

fn maybe_f64(cfg: &RunConfig, key: &str) -> CliResult<Option<f64>> {
    cfg.params
        .get(key)
        .map(|raw| parse_finite(key, raw))
        .transpose()
}

/// Route CSV output: to the `out` file when set (info lines then belong on
/// stdout), otherwise to stdout with info on stderr.
fn emit(cfg: &RunConfig, csv: &str, info: &[String]) -> CliResult<()> {
    match cfg.params.get("out") {
        Some(path) => {
            fs::write(path, csv)
                .map_err(|e| CliError::Runtime(format!("cannot write {path}: {e}")))?;
            for line in info {
                println!("{line}");
            }
        }
        None => {
            for line in info {
                eprintln!("{line}");
            }
            print!("{csv}");
        }
    }
    Ok(())
}

fn load_grid_file(path: &str) -> CliResult<Grid1D> {
    let text = fs::read_to_string(Path::new(path))
        .map_err(|e| CliError::Runtime(format!("cannot read {path}: {e}")))?;
    Ok(Grid1D::from_csv(&text)?)
}

/// `grid` pipeline: calibrate, generate, and write the grid CSV.
pub fn run_grid(cfg: &RunConfig) -> CliResult<()> {
    let b = req_f64(cfg, "b")?;
    let mu = req_f64(cfg, "mu")?;
    let h1 = req_f64(cfg, "h1")?;
    let xi = req_f64(cfg, "xi")?;
    let lo = opt_f64(cfg, "lo", 0.0)?;
    let hi = opt_f64(cfg, "hi", 1.0)?;

    let spec = calibrate(b, mu, h1, xi)?;
    let grid = generate_boundary_layer_grid(&spec, lo, hi)?;
    let info = vec![
        format!("m0/S = {}", spec.rate),
        format!("nodes = {}", grid.len()),
    ];
    emit(cfg, &grid.to_csv(b, mu), &info)
}

/// `evolve` pipeline: per-node `x,k,h` rows at the requested time, using the
/// closed form selected by `case`.
pub fn run_evolve(cfg: &RunConfig) -> CliResult<()> {
    let case = match cfg.params.get("case") {
        Some(raw) => match raw.trim() {
            "1" => 1u8,
            "2" => 2,
            "3" => 3,
            other => return Err(CliError::Config(format!("invalid case '{other}'"))),
        },
        None => return Err(CliError::Config("missing required parameter 'case'".into())),
    };

    let c = opt_f64(cfg, "c", 1.0)?;
    let h1 = req_f64(cfg, "h1")?;
    if !(c > 0.0) {
        return Err(CliError::Runtime("non-positive field value".into()));
    }
    // the first step anchors the step constant: A = h1 * c
    let a = h1 * c;

    let lo = opt_f64(cfg, "lo", 0.0)?;
    let hi = opt_f64(cfg, "hi", 1.0)?;
    let positions: Vec<f64> = match cfg.params.get("grid_file") {
        Some(path) => load_grid_file(path)?.nodes().to_vec(),
        None => {
            let h = opt_f64(cfg, "h_uniform", h1)?;
            uniform_grid(lo, hi, h)?.nodes().to_vec()
        }
    };

    let (k, h) = match case {
        1 => (c, step_field(c, a)?),
        2 => {
            let m = req_f64(cfg, "m0")?;
            let s = req_f64(cfg, "S")?;
            let t = req_f64(cfg, "t")?;
            let k = evolve_constant_m(&[c], m, s, t)?[0];
            (k, step_field(k, a)?)
        }
        _ => {
            let s = req_f64(cfg, "S")?;
            let mu = req_f64(cfg, "mu")?;
            let t = req_f64(cfg, "t")?;
            let m0 = opt_f64(cfg, "m0", 0.0)?;
            let m1 = opt_f64(cfg, "m1", 0.0)?;
            let m2 = opt_f64(cfg, "m2", 0.0)?;
            let l1 = opt_f64(cfg, "l1", 0.0)?;
            let l2sq = opt_f64(cfg, "l2sq", 0.0)?;
            let params = EvolutionParams::new(m0, m1, m2, s, mu, SumMode::FixedS)?;
            let hist = GradientHistory::new(l1, l2sq, t)?;
            let k = k_case3_first_order(c, &params, &hist)?;
            (k, h_case3(c, a, &params, &hist)?)
        }
    };

    let mut csv = String::from("x,k,h\n");
    for &x in &positions {
        csv.push_str(&format!("{},{},{}\n", g17(x), g17(k), g17(h)));
    }
    let info = vec![format!("k = {k}"), format!("h = {h}")];
    emit(cfg, &csv, &info)
}

/// `solve` pipeline: solve the BVP on a grid from file or an inline uniform
/// spec and write the solution CSV.
pub fn run_solve(cfg: &RunConfig) -> CliResult<()> {
    let b = req_f64(cfg, "b")?;
    let mu = req_f64(cfg, "mu")?;

    let grid = match cfg.params.get("grid_file") {
        Some(path) => load_grid_file(path)?,
        None => {
            let h = maybe_f64(cfg, "h_uniform")?.ok_or_else(|| {
                CliError::Config("need either 'grid_file' or 'h_uniform'".into())
            })?;
            let lo = opt_f64(cfg, "lo", 0.0)?;
            let hi = opt_f64(cfg, "hi", 1.0)?;
            uniform_grid(lo, hi, h)?
        }
    };

    let prob = TransportProblem::new(mu, b, grid.lo(), grid.hi(), 0.0, 1.0)?;
    let sol = solve(&prob, &grid)?;
    let norms = error_norms(&sol, &prob);
    let info = vec![format!("linf = {}", norms.linf), format!("l2w = {}", norms.l2w)];
    emit(cfg, &sol.to_csv(&prob), &info)
}

/// `bench` pipeline: adaptive grid vs uniform reference on one problem.
/// A grid that fails to build still gets a report row, marked `ERR`.
pub fn run_bench(cfg: &RunConfig) -> CliResult<()> {
    let b = req_f64(cfg, "b")?;
    let mu = req_f64(cfg, "mu")?;
    let h1 = req_f64(cfg, "h1")?;
    let xi = req_f64(cfg, "xi")?;
    let lo = opt_f64(cfg, "lo", 0.0)?;
    let hi = opt_f64(cfg, "hi", 1.0)?;
    // default reference: the uniform grid at the Péclet-1 step
    let h_uniform = opt_f64(cfg, "h_uniform", 2.0 * mu / b)?;

    let prob = TransportProblem::new(mu, b, lo, hi, 0.0, 1.0)?;

    let adaptive = calibrate(b, mu, h1, xi)
        .and_then(|spec| generate_boundary_layer_grid(&spec, lo, hi));
    let uniform = uniform_grid(lo, hi, h_uniform);

    let mut entries: Vec<BenchEntry> = Vec::new();
    let mut good: Vec<(String, Grid1D)> = Vec::new();
    for (label, built) in [("adaptive", adaptive), ("uniform", uniform)] {
        match built {
            Ok(grid) => good.push((label.to_string(), grid)),
            Err(e) => entries.push(BenchEntry::failed(label, e.to_string())),
        }
    }
    let solved = compare(&prob, &good).map(|r| r.entries).unwrap_or_default();
    // reassemble in the fixed adaptive-then-uniform order
    let mut all = Vec::new();
    for label in ["adaptive", "uniform"] {
        if let Some(e) = solved.iter().find(|e| e.label == label) {
            all.push(e.clone());
        } else if let Some(e) = entries.iter().find(|e| e.label == label) {
            all.push(e.clone());
        }
    }
    let report = BenchReport {
        problem: prob,
        entries: all,
    };

    let info: Vec<String> = report
        .entries
        .iter()
        .map(|e| match (&e.error, e.linf) {
            (None, Some(linf)) => {
                format!("{}: nodes = {}, linf = {linf}", e.label, e.node_count.unwrap())
            }
            (Some(err), _) => format!("{}: ERR ({err})", e.label),
            _ => format!("{}: ERR", e.label),
        })
        .collect();
    emit(cfg, &report.to_csv(), &info)
}

/// Dispatch a parsed invocation.
pub fn run(cfg: &RunConfig) -> CliResult<()> {
    // reject unparseable numbers even for keys the subcommand ignores
    for (key, raw) in &cfg.params {
        if key != "out" && key != "grid_file" && key != "case" {
            parse_finite(key, raw)?;
        }
    }
    match cfg.subcommand {
        Subcommand::Grid => run_grid(cfg),
        Subcommand::Evolve => run_evolve(cfg),
        Subcommand::Solve => run_solve(cfg),
        Subcommand::Bench => run_bench(cfg),
    }
}
