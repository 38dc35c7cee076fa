//! Command-line front end for `holder-core`.
//!
//! [`run`] parses an argument vector, dispatches to the library and returns a
//! [`RunReport`]: a JSON value for stdout, a one-line summary for stderr and an exit
//! code (0 on success, 1 on domain errors, 2 on usage errors).

#![allow(clippy::result_large_err)]

pub mod parse;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use holder_core::arcs::{symbolic_contact_order, ArcError};
use holder_core::complex::ExportFormat;
use holder_core::foliation::{leaf_contact_order, FoliationError, Point};
use holder_core::numeric::{numerical_contact_order, Grid, NormKind, NumericError, PolynomialSampler};
use holder_core::polynomial::{weighted_degree_check, PolynomialError, SurfaceGerm, WeightedPolynomial};
use holder_core::surface::{complex_of_surface, horn_exponent, Beta, SliceOptions, SurfaceError};
use holder_core::weights::WeightError;
use holder_core::{simplex_directions, validate_weights, Rational, WeightVector};
use serde_json::{json, Value};
use thiserror::Error;

use parse::{parse_arc, parse_integers, parse_point, parse_polynomial, ParseError};
use verify::{run_suite, Suite};

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub json: Value,
    pub summary: String,
    pub exit_code: i32,
    /// Printed instead of `json` when set (help text, DOT output).
    pub raw: Option<String>,
}

impl RunReport {
    /// What goes to stdout, newline terminated.
    pub fn stdout(&self) -> String {
        match &self.raw {
            Some(text) if text.ends_with('\n') => text.clone(),
            Some(text) => format!("{text}\n"),
            None => format!("{}\n", self.json),
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("--{flag}: {source}")]
    Parse { flag: &'static str, source: ParseError },
    #[error(transparent)]
    Weights(#[from] WeightError),
    #[error(transparent)]
    Foliation(#[from] FoliationError),
    #[error(transparent)]
    Arc(#[from] ArcError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Polynomial(#[from] PolynomialError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Parse { .. } => "parse",
            CliError::Weights(_) => "weights",
            CliError::Foliation(_) => "foliation",
            CliError::Arc(_) => "arc",
            CliError::Numeric(_) => "numeric",
            CliError::Polynomial(_) => "polynomial",
            CliError::Surface(_) => "surface",
            CliError::Io { .. } => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse { .. } => 2,
            _ => 1,
        }
    }

    fn to_json(&self) -> Value {
        let mut error = json!({ "kind": self.kind(), "message": self.to_string() });
        if let CliError::Polynomial(PolynomialError::NotWeightedHomogeneous { degrees }) = self {
            error["degrees"] = json!(degrees);
        }
        json!({ "error": error })
    }
}

#[derive(Debug, Parser)]
#[command(name = "holder", version, about = "Bi-Lipschitz invariants of weighted homogeneous surface germs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutFormat {
    Dot,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Directions a_i/a_j of the weight simplex.
    Directions {
        #[arg(long, allow_hyphen_values = true)]
        weights: String,
    },
    /// Exact contact order of the leaves through two points.
    ContactLeaves {
        #[arg(long, allow_hyphen_values = true)]
        weights: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Contact order of two Puiseux arcs, optionally estimated numerically as well.
    ContactArcs {
        #[arg(long, allow_hyphen_values = true)]
        arc1: String,
        #[arg(long, allow_hyphen_values = true)]
        arc2: String,
        #[arg(long)]
        numeric: bool,
        #[arg(long, default_value = "euclidean")]
        norm: String,
        #[arg(long, default_value = "1/100")]
        t0: String,
        #[arg(long, default_value = "1/2")]
        ratio: String,
        #[arg(long, default_value_t = 12)]
        count: usize,
        /// Write the sampled `t,d` pairs to this file (requires --numeric).
        #[arg(long, requires = "numeric")]
        csv: Option<PathBuf>,
    },
    /// Check that a polynomial is weighted homogeneous.
    CheckHomogeneous {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, allow_hyphen_values = true)]
        weights: String,
    },
    /// Horn exponent of the surface germ {f = 0}.
    Horn {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, allow_hyphen_values = true)]
        weights: String,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long = "box", default_value_t = 2.0)]
        box_half_width: f64,
    },
    /// Canonical Hölder complex of the surface germ {f = 0}.
    Complex {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, allow_hyphen_values = true)]
        weights: String,
        #[arg(long, value_enum, default_value = "json")]
        out: OutFormat,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long = "box", default_value_t = 2.0)]
        box_half_width: f64,
    },
    /// Seeded randomized property suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Defaults: simplex 1000, ultrametric 500, norms 50, canonical 200.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Runs the command line `argv` (including the program name).
pub fn run<I, T>(argv: I) -> RunReport
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return RunReport {
                    json: Value::Null,
                    summary: String::new(),
                    exit_code: 0,
                    raw: Some(text),
                };
            }
            let message = text.lines().next().unwrap_or("invalid arguments");
            let message = message.trim_start_matches("error: ").to_string();
            return failure(CliError::Usage(message));
        }
    };
    match dispatch(cli.command) {
        Ok(report) => report,
        Err(e) => failure(e),
    }
}

fn failure(e: CliError) -> RunReport {
    RunReport {
        json: e.to_json(),
        summary: format!("error: {e}"),
        exit_code: e.exit_code(),
        raw: None,
    }
}

fn success(json: Value, summary: String) -> RunReport {
    RunReport {
        json,
        summary,
        exit_code: 0,
        raw: None,
    }
}

fn parsed<T>(flag: &'static str, result: Result<T, ParseError>) -> Result<T, CliError> {
    result.map_err(|source| CliError::Parse { flag, source })
}

/// Weights sorted nonincreasing, and `perm` with sorted coordinate `i` = input coordinate
/// `perm[i]`. The sort is stable, so sorted input gives the identity.
fn sorted_weights(raw: &[i64]) -> Result<(WeightVector, Vec<usize>), CliError> {
    let mut perm: Vec<usize> = (0..raw.len()).collect();
    perm.sort_by(|&i, &j| raw[j].cmp(&raw[i]));
    let sorted: Vec<i64> = perm.iter().map(|&i| raw[i]).collect();
    // Report positivity errors against the caller's indexing.
    if let Some(i) = raw.iter().position(|&a| a <= 0) {
        return Err(WeightError::NotPositive { index: i + 1, value: raw[i] }.into());
    }
    Ok((validate_weights(&sorted)?, perm))
}

fn permute_point(p: &[Rational], perm: &[usize]) -> Result<Point, CliError> {
    if p.len() != perm.len() {
        return Err(FoliationError::DimensionMismatch {
            expected: perm.len(),
            got: p.len(),
        }
        .into());
    }
    Ok(perm.iter().map(|&i| p[i].clone()).collect())
}

fn strings(values: &[Rational]) -> Vec<String> {
    values.iter().map(|r| r.to_string()).collect()
}

fn parse_grid_value(flag: &'static str, text: &str) -> Result<Rational, CliError> {
    if let Ok(r) = text.parse::<Rational>() {
        return Ok(r);
    }
    text.parse::<f64>()
        .ok()
        .and_then(|x| Rational::snap(x, 1_000_000_000))
        .ok_or_else(|| CliError::Usage(format!("--{flag}: expected a number, got `{text}`")))
}

/// Polynomial and weights, permuted so that the weights are nonincreasing.
fn germ_input(poly: &str, weights: &str) -> Result<(WeightedPolynomial, WeightVector, Vec<usize>), CliError> {
    let f = parsed("poly", parse_polynomial(poly))?;
    let raw = parsed("weights", parse_integers(weights))?;
    if raw.len() != f.nvars() {
        return Err(PolynomialError::WeightCount {
            vars: f.nvars(),
            weights: raw.len(),
        }
        .into());
    }
    let (w, perm) = sorted_weights(&raw)?;
    Ok((f.permute(&perm), w, perm))
}

fn slice_options(grid: usize, box_half_width: f64) -> SliceOptions {
    SliceOptions {
        grid,
        box_half_width,
        ..SliceOptions::default()
    }
}

fn dispatch(command: Command) -> Result<RunReport, CliError> {
    match command {
        Command::Directions { weights } => {
            let raw = parsed("weights", parse_integers(&weights))?;
            let (w, _) = sorted_weights(&raw)?;
            let dirs = simplex_directions(&w);
            let summary = format!("{} direction(s) for weights {w}: {}", dirs.len(), strings(&dirs).join(", "));
            Ok(success(json!({ "directions": strings(&dirs) }), summary))
        }
        Command::ContactLeaves { weights, x, y } => {
            let raw = parsed("weights", parse_integers(&weights))?;
            let x = parsed("x", parse_point(&x))?;
            let y = parsed("y", parse_point(&y))?;
            let (w, perm) = sorted_weights(&raw)?;
            let order = leaf_contact_order(&w, &permute_point(&x, &perm)?, &permute_point(&y, &perm)?)?;
            let summary = format!("leaves have contact order {order} for weights {w}");
            Ok(success(
                json!({
                    "contact_order": order.value().to_string(),
                    "weights": w.as_slice(),
                    "permutation": perm,
                }),
                summary,
            ))
        }
        Command::ContactArcs {
            arc1,
            arc2,
            numeric,
            norm,
            t0,
            ratio,
            count,
            csv,
        } => {
            let a = parsed("arc1", parse_arc(&arc1))?;
            let b = parsed("arc2", parse_arc(&arc2))?;
            let norm: NormKind = norm
                .parse()
                .map_err(|_| CliError::Usage(format!("--norm: expected euclidean, max or l1, got `{norm}`")))?;
            let grid = Grid::new(parse_grid_value("t0", &t0)?, parse_grid_value("ratio", &ratio)?, count)?;
            let exact = symbolic_contact_order(&a, &b)?;
            let mut out = json!({ "contact_order": exact.value().to_string() });
            let mut summary = format!("arcs have contact order {exact}");
            if numeric {
                let profile = numerical_contact_order(&PolynomialSampler::new(&a), &PolynomialSampler::new(&b), norm, &grid)?;
                if let Some(path) = &csv {
                    std::fs::write(path, profile.to_csv()).map_err(|e| CliError::Io {
                        path: path.clone(),
                        message: e.to_string(),
                    })?;
                }
                let error = profile.exponent - exact.value().to_f64();
                summary.push_str(&format!(
                    "; {} norm estimate {:.4} (R^2 = {:.6})",
                    norm.name(),
                    profile.exponent,
                    profile.r_squared
                ));
                out["numeric"] = json!({
                    "norm": norm.name(),
                    "t0": grid.t0().to_string(),
                    "ratio": grid.ratio().to_string(),
                    "count": count,
                    "exponent": profile.exponent,
                    "intercept": profile.intercept,
                    "r_squared": profile.r_squared,
                    "accepted": profile.accepted,
                    "error": error,
                });
            }
            Ok(success(out, summary))
        }
        Command::CheckHomogeneous { poly, weights } => {
            let (f, w, perm) = germ_input(&poly, &weights)?;
            let degree = weighted_degree_check(&f, &w)?;
            Ok(success(
                json!({
                    "homogeneous": true,
                    "degree": degree,
                    "weights": w.as_slice(),
                    "permutation": perm,
                }),
                format!("weighted homogeneous of degree {degree} for weights {w}"),
            ))
        }
        Command::Horn {
            poly,
            weights,
            grid,
            box_half_width,
        } => {
            let (f, w, perm) = germ_input(&poly, &weights)?;
            let germ = SurfaceGerm::new(f, w)?;
            let mut report = horn_exponent(&germ, &slice_options(grid, box_half_width))?;
            report.permutation = perm;
            let beta = match &report.beta {
                Some(Beta::Single(b)) => format!("beta = {b}"),
                Some(Beta::PerComponent(bs)) => {
                    format!("beta per component = [{}]", strings(bs).join(", "))
                }
                None => "no exponent".to_string(),
            };
            let summary = if report.applicable {
                beta
            } else {
                format!("{beta} (not applicable: {})", report.reasons.join("; "))
            };
            let json = serde_json::to_value(&report).expect("report serializes");
            Ok(success(json, summary))
        }
        Command::Complex {
            poly,
            weights,
            out,
            output,
            grid,
            box_half_width,
        } => {
            let (f, w, perm) = germ_input(&poly, &weights)?;
            let germ = SurfaceGerm::new(f, w)?;
            let complex = complex_of_surface(&germ, &slice_options(grid, box_half_width))?;
            let (format, name) = match out {
                OutFormat::Dot => (ExportFormat::Dot, "dot"),
                OutFormat::Json => (ExportFormat::Json, "json"),
            };
            let text = complex.export(format);
            let summary = format!(
                "canonical complex with {} vertices and {} edges",
                complex.vertex_count(),
                complex.edge_count()
            );
            match output {
                Some(path) => {
                    std::fs::write(&path, &text).map_err(|e| CliError::Io {
                        path: path.clone(),
                        message: e.to_string(),
                    })?;
                    Ok(success(
                        json!({
                            "output": path.display().to_string(),
                            "format": name,
                            "vertices": complex.vertex_count(),
                            "edges": complex.edge_count(),
                            "permutation": perm,
                        }),
                        format!("{summary}, written to {}", path.display()),
                    ))
                }
                None => {
                    let json: Value = serde_json::from_str(&complex.to_json()).expect("complex JSON");
                    Ok(RunReport {
                        raw: matches!(out, OutFormat::Dot).then_some(text),
                        ..success(json, summary)
                    })
                }
            }
        }
        Command::Verify { suite, trials, seed } => {
            let trials = trials.unwrap_or_else(|| suite.default_trials());
            let report = run_suite(suite, trials, seed);
            let summary = format!(
                "{}: {} of {} trials failed (seed {})",
                report.suite, report.failures, report.trials, report.seed
            );
            let exit_code = if report.failures == 0 { 0 } else { 1 };
            Ok(RunReport {
                json: serde_json::to_value(&report).expect("report serializes"),
                summary,
                exit_code,
                raw: None,
            })
        }
    }
}
