//! Command-line front end.
//!
//! Four subcommands wrap the library: `find` refines shrinkers, `sweep`
//! tabulates shooting outcomes, `verify` runs the consistency suite and
//! `spectrum` scans the equator Morse index over a range of dimensions.
//!
//! Exit codes: 0 on success (including an empty `find`), 2 for invalid flags
//! or an inadmissible dimension, 1 for a numerical failure or a failed
//! `verify` check. Numerical failures print a JSON diagnostic on stderr.

mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::diagnostics::{
    equator_discriminant, h_and_derivative, morse_index, verify_model, Check, MorseGrid,
};
use crate::error::Error;
use crate::models::{type1_quantity, FlowKind, ModelParams};
use crate::ode::{IntegratorConfig, SystemState};
use crate::shooter::{bracket_sweep, find_shrinkers, FindConfig, ShootConfig, ShrinkerSolution};

pub use output::num;
use output::{companion, emit, json_document, opt, Csv};

#[derive(Parser, Debug)]
#[command(
    name = "shrinkers",
    version,
    about = "Self-similar shrinkers of the equivariant harmonic-map and Yang-Mills heat flows"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sweep, bracket and refine shrinkers with crossing counts 1..=n-max.
    Find(FindArgs),
    /// Tabulate shooting outcomes on a log-spaced grid of the origin parameter.
    Sweep(SweepArgs),
    /// Run the consistency checks for one model and dimension.
    Verify(VerifyArgs),
    /// Negative spectrum of the energy Hessian at the equator map over a range of d.
    Spectrum(SpectrumArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Harmonic-map flow into the sphere.
    Hm,
    /// Yang-Mills flow.
    Ym,
}

impl From<Model> for FlowKind {
    fn from(m: Model) -> Self {
        match m {
            Model::Hm => FlowKind::HarmonicMap,
            Model::Ym => FlowKind::YangMills,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    /// Dimension; real values are admitted (hm needs d > 2, ym needs d > 4).
    #[arg(long, allow_negative_numbers = true)]
    pub d: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Tolerances {
    /// Relative local error tolerance of the integrator.
    #[arg(long, default_value_t = 1e-10)]
    pub rel_tol: f64,
    /// Absolute local error tolerance of the integrator.
    #[arg(long, default_value_t = 1e-12)]
    pub abs_tol: f64,
    /// Largest accepted tail mismatch |Y^3 v'(Y) + 2K N(v(Y))|.
    #[arg(long, default_value_t = 1e-6)]
    pub tail_tol: f64,
    /// Tail point Y of forward shots [default: 12, or 2 sqrt(2d) when larger].
    #[arg(long)]
    pub y_end: Option<f64>,
}

impl Tolerances {
    fn shoot_config(&self) -> ShootConfig {
        ShootConfig {
            integrator: IntegratorConfig::with_tolerances(self.rel_tol, self.abs_tol),
            tail_point: self.y_end,
            tail_tol: self.tail_tol,
            ..ShootConfig::default()
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Window {
    #[arg(long, default_value_t = 1e-3)]
    pub a_min: f64,
    #[arg(long, default_value_t = 50.0)]
    pub a_max: f64,
    /// Number of log-spaced grid points.
    #[arg(long, default_value_t = 500)]
    pub n: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct FindArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 3)]
    pub n_max: usize,
    #[command(flatten)]
    pub window: Window,
    /// Bisection width on the origin parameter.
    #[arg(long, default_value_t = 1e-10)]
    pub tol_a: f64,
    /// Points of the uniform profile grid on [0, Y]; profiles are written
    /// next to --out as <stem>.profile-n<k>.csv.
    #[arg(long, default_value_t = 241)]
    pub profile_points: usize,
    #[command(flatten)]
    pub tol: Tolerances,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub window: Window,
    #[command(flatten)]
    pub tol: Tolerances,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub tol: Tolerances,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SpectrumArgs {
    /// Single dimension; shorthand for --d-min d --d-max d.
    #[arg(long, conflicts_with_all = ["d_min", "d_max"])]
    pub d: Option<f64>,
    #[arg(long, default_value_t = 6.5)]
    pub d_min: f64,
    #[arg(long, default_value_t = 8.0)]
    pub d_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub d_step: f64,
    /// Interior grid nodes.
    #[arg(long, default_value_t = 2000)]
    pub nodes: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub y_min: f64,
    #[arg(long, default_value_t = 20.0)]
    pub y_max: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Failure that maps to a nonzero exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Numerical(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InadmissibleDimension { .. }
            | Error::InvalidArgument(_)
            | Error::InvalidConfig(_)
            | Error::InvalidOrigin(_) => Failure::Usage(e.to_string()),
            other => Failure::Numerical(json!({ "error": other.to_string() })),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Numerical(json!({ "error": format!("i/o: {e}") }))
    }
}

type Outcome = std::result::Result<i32, Failure>;

/// Parses `args` (program name first) and runs the command; returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match &cli.command {
        Command::Find(a) => cmd_find(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Spectrum(a) => cmd_spectrum(a),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            2
        }
        Err(Failure::Numerical(diag)) => {
            eprintln!("{}", serde_json::to_string(&diag).unwrap());
            1
        }
    }
}

fn params_of(m: &ModelArgs) -> Result<ModelParams, Failure> {
    Ok(ModelParams::new(m.model.into(), m.d)?)
}

fn config_value<A: Serialize, L: Serialize>(command: &str, args: &A, resolved: &L) -> Value {
    json!({ "command": command, "args": args, "resolved": resolved })
}

#[derive(Serialize)]
struct FindRecord {
    status: &'static str,
    n: Option<usize>,
    a: Option<f64>,
    b: Option<f64>,
    energy: Option<f64>,
    max_type1: Option<f64>,
    tail_residual: Option<f64>,
}

impl FindRecord {
    fn of(s: &ShrinkerSolution) -> Self {
        Self {
            status: "found",
            n: Some(s.n),
            a: Some(s.a),
            b: Some(s.b),
            energy: s.energy,
            max_type1: s.max_type1,
            tail_residual: Some(s.tail_residual),
        }
    }

    fn none_found() -> Self {
        Self {
            status: "none_found",
            n: None,
            a: None,
            b: None,
            energy: None,
            max_type1: None,
            tail_residual: None,
        }
    }
}

fn find_config(args: &FindArgs) -> FindConfig {
    let mut cfg = FindConfig {
        a_min: args.window.a_min,
        a_max: args.window.a_max,
        n_grid: args.window.n,
        ..FindConfig::default()
    };
    cfg.refine.shoot = args.tol.shoot_config();
    cfg.refine.tol_a = args.tol_a;
    cfg
}

fn profile_csv(params: &ModelParams, s: &ShrinkerSolution, y_end: f64, points: usize, config: &Value) -> String {
    let mut csv = Csv::new("find profile", config);
    csv.meta(&format!("n: {}", s.n));
    csv.meta(&format!("a: {}", num(s.a)));
    csv.meta(&format!("b: {}", num(s.b)));
    csv.header(&["y", "f", "fp", "h", "hp", "type1"]);
    let points = points.max(2);
    for i in 0..points {
        let y = if i + 1 == points { y_end } else { y_end * i as f64 / (points - 1) as f64 };
        let Some(u) = s.trajectory.interpolate(y) else { continue };
        let (h, hp) = h_and_derivative(params, y, &u);
        let t1 = match params.kind() {
            FlowKind::YangMills => None,
            FlowKind::HarmonicMap if y == 0.0 => Some(params.d() * u[1] * u[1]),
            FlowKind::HarmonicMap => type1_quantity(params, &SystemState::new(y, u)).ok(),
        };
        csv.row(vec![num(y), num(u[0]), num(u[1]), num(h), num(hp), opt(t1)]);
    }
    csv.finish()
}

fn cmd_find(args: &FindArgs) -> Outcome {
    let params = params_of(&args.model)?;
    if args.n_max == 0 {
        return Err(Failure::Usage("--n-max must be at least 1".into()));
    }
    let cfg = find_config(args);
    let config = config_value("find", args, &cfg);
    let found = find_shrinkers(&params, args.n_max, &cfg)?;
    let tail_tol = args.tol.tail_tol;
    let cap = cfg.refine.shoot.bound_cap;
    let mut checks = Vec::new();
    for s in &found {
        checks.push(Check::new(&format!("tail_condition_n{}", s.n), s.tail_residual, tail_tol));
        if let Some(t) = s.max_type1 {
            let bound = cap * (params.d() * s.a * s.a).max(1.0);
            checks.push(Check::new(&format!("type1_bounded_n{}", s.n), t, bound));
        }
    }
    let records: Vec<FindRecord> = if found.is_empty() {
        vec![FindRecord::none_found()]
    } else {
        found.iter().map(FindRecord::of).collect()
    };

    let body = match args.output.format {
        Format::Json => json_document(&config, &records, &checks),
        Format::Csv => {
            let mut csv = Csv::new("find", &config);
            csv.checks(&checks);
            csv.header(&["status", "n", "a", "b", "energy", "max_type1", "tail_residual"]);
            for r in &records {
                csv.row(vec![
                    r.status.to_string(),
                    r.n.map(|n| n.to_string()).unwrap_or_default(),
                    opt(r.a),
                    opt(r.b),
                    opt(r.energy),
                    opt(r.max_type1),
                    opt(r.tail_residual),
                ]);
            }
            csv.finish()
        }
    };
    emit(args.output.out.as_deref(), &body)?;
    if let Some(out) = &args.output.out {
        let y_end = cfg.refine.shoot.tail_point_for(&params);
        for s in &found {
            let path = companion(out, &format!("profile-n{}.csv", s.n));
            std::fs::write(path, profile_csv(&params, s, y_end, args.profile_points, &config))?;
        }
    }
    if checks.iter().all(|c| c.passed) {
        Ok(0)
    } else {
        Err(Failure::Numerical(json!({ "error": "solution failed its acceptance checks", "checks": checks })))
    }
}

fn cmd_sweep(args: &SweepArgs) -> Outcome {
    let params = params_of(&args.model)?;
    let sc = args.tol.shoot_config();
    let config = config_value("sweep", args, &sc);
    let table = bracket_sweep(&params, args.window.a_min, args.window.a_max, args.window.n, &sc)?;
    let out = args.output.out.as_deref();
    let body = match args.output.format {
        Format::Json => json_document(&config, &table, &[]),
        Format::Csv => {
            let mut csv = Csv::new("sweep", &config);
            csv.meta(&format!("brackets: {}", table.brackets.len()));
            if out.is_none() {
                for b in &table.brackets {
                    csv.meta(&format!(
                        "bracket {},{},{},{},{}",
                        num(b.a_lo),
                        num(b.a_hi),
                        b.crossings_lo,
                        b.crossings_hi,
                        serde_json::to_value(b.kind).unwrap().as_str().unwrap()
                    ));
                }
            }
            csv.header(&["a", "crossings", "exit", "miss", "b_estimate"]);
            for r in &table.rows {
                let o = &r.outcome;
                csv.row(vec![num(r.a), o.crossings.to_string(), o.exit.as_str().into(), num(o.miss), num(o.b_estimate)]);
            }
            csv.finish()
        }
    };
    emit(out, &body)?;
    if let (Some(path), Format::Csv) = (out, args.output.format) {
        std::fs::write(companion(path, "brackets.json"), json_document(&config, &table.brackets, &[]))?;
    }
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> Outcome {
    let params = params_of(&args.model)?;
    let sc = args.tol.shoot_config();
    let config = config_value("verify", args, &sc);
    let checks = verify_model(&params, &sc)?;
    let passed = checks.iter().all(|c| c.passed);
    let body = match args.output.format {
        Format::Json => json_document(&config, &json!({ "model": params.kind().name(), "d": params.d(), "passed": passed }), &checks),
        Format::Csv => {
            let mut csv = Csv::new("verify", &config);
            csv.header(&["name", "passed", "measured", "tolerance"]);
            for c in &checks {
                csv.row(vec![c.name.clone(), c.passed.to_string(), num(c.measured), num(c.tolerance)]);
            }
            csv.finish()
        }
    };
    emit(args.output.out.as_deref(), &body)?;
    Ok(if passed { 0 } else { 1 })
}

/// Values `d_min + i d_step` up to `d_max`, rounded to twelve decimals so
/// that the printed grid carries no accumulated binary noise.
fn dimension_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>, Failure> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Failure::Usage(format!("empty dimension range [{lo}, {hi}]")));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Failure::Usage(format!("--d-step must be positive, got {step}")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12).collect())
}

#[derive(Serialize)]
struct SpectrumRow {
    d: f64,
    discriminant: f64,
    oscillatory: bool,
    negative_count: usize,
    smallest: Vec<f64>,
    residual: f64,
}

fn cmd_spectrum(args: &SpectrumArgs) -> Outcome {
    let (lo, hi) = match args.d {
        Some(d) => (d, d),
        None => (args.d_min, args.d_max),
    };
    let ds = dimension_grid(lo, hi, args.d_step)?;
    let grid = MorseGrid { nodes: args.nodes, y_min: args.y_min, y_max: args.y_max };
    let config = config_value(
        "spectrum",
        args,
        &json!({ "grid": grid, "d_first": ds[0], "d_last": ds[ds.len() - 1], "d_count": ds.len() }),
    );
    let rows: Vec<SpectrumRow> = ds
        .par_iter()
        .map(|&d| {
            let r = morse_index(d, &grid)?;
            let disc = equator_discriminant(d);
            Ok(SpectrumRow {
                d,
                discriminant: disc.value,
                oscillatory: disc.oscillatory,
                negative_count: r.negative_count,
                smallest: r.smallest,
                residual: r.residual,
            })
        })
        .collect::<crate::Result<_>>()?;
    let increases = rows.windows(2).filter(|w| w[1].negative_count > w[0].negative_count).count();
    let checks = vec![Check::new("count_non_increasing", increases as f64, 0.0)];
    let body = match args.output.format {
        Format::Json => json_document(&config, &rows, &checks),
        Format::Csv => {
            let mut csv = Csv::new("spectrum", &config);
            csv.checks(&checks);
            csv.header(&["d", "discriminant", "oscillatory", "negative_count", "lambda_0", "lambda_1", "lambda_2", "residual"]);
            for r in &rows {
                let ev = |k: usize| r.smallest.get(k).copied().map(num).unwrap_or_default();
                csv.row(vec![
                    num(r.d),
                    num(r.discriminant),
                    r.oscillatory.to_string(),
                    r.negative_count.to_string(),
                    ev(0),
                    ev(1),
                    ev(2),
                    num(r.residual),
                ]);
            }
            csv.finish()
        }
    };
    emit(args.output.out.as_deref(), &body)?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_grid_is_clean() {
        let g = dimension_grid(6.5, 8.0, 0.05).unwrap();
        assert_eq!(g.len(), 31);
        assert_eq!(g[11], 7.05);
        assert_eq!(*g.last().unwrap(), 8.0);
        assert_eq!(dimension_grid(7.0, 7.0, 0.1).unwrap(), vec![7.0]);
        assert!(dimension_grid(8.0, 6.5, 0.1).is_err());
        assert!(dimension_grid(6.5, 8.0, 0.0).is_err());
    }

    #[test]
    fn flag_errors_exit_two() {
        assert_eq!(run(["shrinkers", "verify", "--model", "hm", "--d", "2"]), 2);
        assert_eq!(run(["shrinkers", "verify", "--model", "xx", "--d", "3"]), 2);
        assert_eq!(run(["shrinkers", "spectrum", "--d-min", "8", "--d-max", "6"]), 2);
        assert_eq!(run(["shrinkers", "find", "--model", "hm", "--d", "4", "--n-max", "0"]), 2);
    }
}
