//! Command-line front end: `sugra list` and `sugra verify`.

mod bgfile;
mod report;

pub use bgfile::{
    parse_background_file, parse_background_str, BackgroundFile, BuildError, FileError,
    FileSettings, Position,
};
pub use report::{render_text, JsonReport, JsonRow, REPORT_VERSION};

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::catalog::{self, CatalogError, ENTRIES};
use crate::exprlang::Expr;
use crate::exterior::{Metric, SingularHyperplane};
use crate::geometry::ProductStructure;
use crate::sugra::{
    evaluate, Background, ResidualReport, SugraError, DEFAULT_POINTS, DEFAULT_SEED,
    DEFAULT_TOLERANCE,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "sugra", version, about = "Verify eleven-dimensional supergravity backgrounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List catalog entries.
    List,
    /// Evaluate field-equation residuals for a catalog id or a .bg file.
    Verify(VerifyArgs),
}

#[derive(Debug, clap::Args)]
struct VerifyArgs {
    /// Catalog id or path to a background file.
    target: String,
    /// Number of sample points.
    #[arg(long)]
    points: Option<usize>,
    /// Sampling seed.
    #[arg(long, env = "SUGRA_SEED")]
    seed: Option<u64>,
    /// Residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Scale a parameter, metric entry or flux piece: KEY:FACTOR.
    #[arg(long, value_parser = parse_perturb)]
    perturb: Option<(String, f64)>,
    /// Write the JSON report to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the JSON report instead of the text table.
    #[arg(long)]
    json: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Record wall time in the report (makes output non-reproducible).
    #[arg(long)]
    timing: bool,
}

fn parse_perturb(s: &str) -> Result<(String, f64), String> {
    let (key, factor) = s
        .rsplit_once(':')
        .ok_or_else(|| format!("expected KEY:FACTOR, got '{s}'"))?;
    let factor: f64 = factor
        .parse()
        .map_err(|_| format!("bad factor '{factor}'"))?;
    if key.is_empty() || !factor.is_finite() {
        return Err(format!("expected KEY:FACTOR, got '{s}'"));
    }
    Ok((key.to_string(), factor))
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown catalog id or file '{0}'")]
    UnknownTarget(String),
    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: FileError,
    },
    #[error("{0}")]
    Build(#[from] BuildError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Sugra(#[from] SugraError),
    #[error("cannot perturb '{0}': no such parameter, metric entry or flux piece")]
    UnknownPerturbKey(String),
    #[error("invalid option: {0}")]
    BadOption(String),
    #[error("cannot write report: {0}")]
    Io(#[from] std::io::Error),
}

/// Entry point; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match cli.command {
        Command::List => {
            let _ = write!(out, "{}", list_text());
            EXIT_PASS
        }
        Command::Verify(args) => match verify(&args, out) {
            Ok(true) => EXIT_PASS,
            Ok(false) => EXIT_FAIL,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                EXIT_INPUT
            }
        },
    }
}

pub fn list_text() -> String {
    let width = ENTRIES.iter().map(|e| e.id.len()).max().unwrap_or(0);
    let mut s = String::new();
    for e in ENTRIES {
        let params: Vec<String> = e.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        s.push_str(&format!(
            "{:width$}  {}  [{}; perturb {}]\n",
            e.id,
            e.summary,
            params.join(", "),
            e.perturb_key
        ));
    }
    s
}

/// Resolves a target into a background plus file-level run settings.
pub fn load_target(
    target: &str,
    perturb: Option<&(String, f64)>,
) -> Result<(Background, FileSettings), CliError> {
    if catalog::info(target).is_some() {
        let bg = match perturb {
            Some((key, f)) if catalog::info(target).unwrap().params.iter().any(|(k, _)| k == key) => {
                catalog::build(target, &catalog::perturbed_params(target, key, *f)?)?
            }
            Some((key, f)) => perturb_background(&catalog::build_default(target)?, key, *f)?,
            None => catalog::build_default(target)?,
        };
        return Ok((bg, FileSettings::default()));
    }
    let path = Path::new(target);
    if !path.is_file() {
        return Err(CliError::UnknownTarget(target.to_string()));
    }
    let file = parse_background_file(path).map_err(|source| CliError::File {
        path: target.to_string(),
        source,
    })?;
    let mut bg = file.build()?;
    if let Some((key, f)) = perturb {
        bg = perturb_background(&bg, key, *f)?;
    }
    Ok((bg, file.settings))
}

/// Scales one ingredient of a background. Keys: `H` (the `g(0,0)` entry of
/// the Lorentzian block), `g(a,b)` by coordinate names, or a flux piece
/// name (`phi`, `alpha`, …, `theta`).
pub fn perturb_background(bg: &Background, key: &str, factor: f64) -> Result<Background, CliError> {
    let mut ps = bg.product.clone();
    let mut flux = bg.flux.clone();
    let unknown = || CliError::UnknownPerturbKey(key.to_string());
    if key == "H" {
        ps.lorentz = scale_entry(&ps.lorentz, 0, 0, factor)?;
    } else if let Some(inner) = key.strip_prefix("g(").and_then(|k| k.strip_suffix(')')) {
        let names: Vec<&str> = inner.split(',').map(str::trim).collect();
        if names.len() != 2 {
            return Err(unknown());
        }
        let (l, r) = (ps.lorentz.chart().clone(), ps.riemann.chart().clone());
        match (
            (l.index_of(names[0]), l.index_of(names[1])),
            (r.index_of(names[0]), r.index_of(names[1])),
        ) {
            ((Some(i), Some(j)), _) => ps.lorentz = scale_entry(&ps.lorentz, i, j, factor)?,
            (_, (Some(i), Some(j))) => ps.riemann = scale_entry(&ps.riemann, i, j, factor)?,
            _ => return Err(unknown()),
        }
    } else if key == "phi" {
        flux.phi = flux.phi.scale(factor);
    } else if key == "psi" {
        flux.psi = flux.psi.scale(factor);
    } else if bgfile::is_form_piece(key) {
        let slot = bgfile::flux_slot(&mut flux, key);
        *slot = slot.scale_const(factor);
    } else {
        return Err(unknown());
    }
    let ps = ProductStructure::new(ps.lorentz, ps.riemann).map_err(BuildError::from)?;
    Ok(Background::new(&bg.id, &bg.note, ps, flux, bg.sample.clone())?)
}

fn scale_entry(m: &Metric, i: usize, j: usize, factor: f64) -> Result<Metric, CliError> {
    let n = m.dim();
    let mut upper: Vec<(usize, usize, Expr)> = Vec::new();
    for a in 0..n {
        for b in a..n {
            let e = m.entry(a, b).clone();
            let e = if (a, b) == (i.min(j), i.max(j)) { e.scale(factor) } else { e };
            if !e.is_zero() {
                upper.push((a, b, e));
            }
        }
    }
    let singular: Vec<SingularHyperplane> = m.singular().to_vec();
    Ok(Metric::from_upper(m.chart(), &upper, m.signature())
        .map_err(BuildError::from)?
        .with_singular(singular))
}

/// Settings after applying flags over file values over defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    pub points: usize,
    pub seed: u64,
    pub tolerance: f64,
}

pub fn evaluate_target(
    bg: &Background,
    settings: RunSettings,
    jobs: Option<usize>,
) -> Result<ResidualReport, CliError> {
    let plan = bg.plan(settings.points, settings.seed)?;
    Ok(evaluate(bg, &plan, settings.tolerance, jobs)?)
}

fn verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<bool, CliError> {
    let start = Instant::now();
    if let Some(t) = args.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::BadOption(format!("--tol must be positive, got {t}")));
        }
    }
    if args.points == Some(0) {
        return Err(CliError::BadOption("--points must be at least 1".into()));
    }
    if args.jobs == Some(0) {
        return Err(CliError::BadOption("--jobs must be at least 1".into()));
    }
    let (bg, file) = load_target(&args.target, args.perturb.as_ref())?;
    let settings = RunSettings {
        points: args.points.or(file.points).unwrap_or(DEFAULT_POINTS),
        seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        tolerance: args.tol.or(file.tolerance).unwrap_or(DEFAULT_TOLERANCE),
    };
    let report = evaluate_target(&bg, settings, args.jobs)?;
    let millis = args.timing.then(|| start.elapsed().as_millis() as u64);
    let json = JsonReport::new(&report, millis);
    if let Some(path) = &args.out {
        std::fs::write(path, json.to_json())?;
    }
    if args.json {
        writeln!(out, "{}", json.to_json())?;
    } else {
        write!(out, "{}", render_text(&json))?;
    }
    Ok(report.pass())
}
