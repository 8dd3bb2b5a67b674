//! Command-line front end for the `liemetric` library.
//!
//! [`run`] performs a command and returns the exit code together with what
//! should go to stdout and stderr, so it can be tested without a subprocess.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use liemetric::homogeneous::{go_geodesic_ode, go_invariant_metrizability, GoState};
use liemetric::io::{
    go_trajectory_csv, parse_algebra, trajectory_csv, AlgebraDocument, FeasibilityDocument, GoVerdictDocument,
};
use liemetric::metrizability::{invariant_metrizability, FeasibilityStatus, SolverConfig};
use liemetric::sampling::DEFAULT_SEED;
use liemetric::spray::{exp_orbit, integrate_canonical_sode, GroupPoint};
use liemetric::{catalog, AlgebraElement, LieAlgebra};
use nalgebra::Vector2;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_UNDETERMINED: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Print Jacobi and representation closure residuals of an algebra.
    Check,
    /// Decide invariant metrizability of the canonical spray.
    Metrize,
    /// Integrate the canonical geodesic through the identity with velocity `--alpha`.
    Geodesic,
    /// Integrate a geodesic of the plane structure with parameter `--kappa`.
    GoDemo,
    /// Run every built-in check and print one line per check.
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Report,
}

#[derive(Debug, Clone, PartialEq, Parser)]
#[command(name = "liemetric", version, about = "Invariant metrizability of Lie group sprays")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Algebra file (JSON) or catalog name such as `heisenberg3` or `abelian(4)`.
    pub input_path: Option<String>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub steps: u64,
    #[arg(long = "t-end", default_value_t = 1.0, allow_hyphen_values = true)]
    pub t_end: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub kappa: f64,
    /// Initial algebra velocity, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha: Option<Vec<f64>>,
    /// Initial plane velocity, comma separated (default 1,0).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub v: Option<Vec<f64>>,
    #[arg(long = "out")]
    pub output_path: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn for_command(command: Command) -> Self {
        Self {
            command,
            input_path: None,
            seed: DEFAULT_SEED,
            steps: 1000,
            t_end: 1.0,
            kappa: 0.0,
            alpha: None,
            v: None,
            output_path: None,
            format: None,
        }
    }

    pub fn parse_from_args<I, T>(args: I) -> Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        Self::try_parse_from(args)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self {
            exit_code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn input_error(message: impl std::fmt::Display) -> Self {
        Self {
            exit_code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

/// Catalog name first, then file path.
pub fn load_algebra(source: &str) -> Result<LieAlgebra, String> {
    if let Ok(a) = catalog(source) {
        return Ok(a);
    }
    let text = std::fs::read_to_string(source)
        .map_err(|e| format!("`{source}` is neither a catalog name nor a readable file ({e})"))?;
    parse_algebra(&text).map_err(|e| format!("{source}: {e}"))
}

pub fn run(config: &RunConfig) -> Outcome {
    if !config.t_end.is_finite() {
        return Outcome::input_error("--t-end must be finite");
    }
    if config.steps == 0 {
        return Outcome::input_error("--steps must be at least 1");
    }
    let outcome = match config.command {
        Command::Check => check(config),
        Command::Metrize => metrize(config),
        Command::Geodesic => geodesic(config),
        Command::GoDemo => go_demo(config),
        Command::Verify => verify(config),
    };
    outcome.unwrap_or_else(Outcome::input_error)
}

fn require_algebra(config: &RunConfig) -> Result<(String, LieAlgebra), String> {
    let source = config
        .input_path
        .as_deref()
        .ok_or("this command needs an algebra file or catalog name")?;
    Ok((source.to_string(), load_algebra(source)?))
}

/// Writes to `--out` when given, otherwise returns the text for stdout.
fn emit(config: &RunConfig, text: String) -> Result<Option<String>, String> {
    match &config.output_path {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}

fn check(config: &RunConfig) -> Result<Outcome, String> {
    let (name, algebra) = require_algebra(config)?;
    let jacobi = algebra.jacobi_residual();
    let mut out = String::new();
    let _ = writeln!(out, "algebra: {name}");
    let _ = writeln!(out, "dim: {}", algebra.dim());
    let _ = writeln!(out, "labels: {}", algebra.labels().join(","));
    let _ = writeln!(out, "jacobi_residual: {jacobi:e}");
    match algebra.closure_residual() {
        Ok(r) => {
            let _ = writeln!(out, "closure_residual: {r:e}");
        }
        Err(_) => out.push_str("closure_residual: none (no matrix representation)\n"),
    }
    let is_lie = algebra.is_lie_algebra(1e-10);
    let _ = writeln!(out, "lie_algebra: {is_lie}");
    if config.format == Some(Format::Report) {
        out.push_str(&AlgebraDocument::from_algebra(&algebra).to_json());
        out.push('\n');
    }
    let stdout = emit(config, out)?.unwrap_or_default();
    Ok(Outcome {
        exit_code: if is_lie { EXIT_OK } else { EXIT_INPUT },
        stdout,
        stderr: if is_lie {
            String::new()
        } else {
            "error: the bracket violates the Jacobi identity\n".into()
        },
    })
}

fn metrize(config: &RunConfig) -> Result<Outcome, String> {
    if config.format == Some(Format::Csv) {
        return Err("metrize writes reports only".into());
    }
    let (name, algebra) = require_algebra(config)?;
    let report = invariant_metrizability(&algebra, &SolverConfig::with_seed(config.seed)).map_err(|e| e.to_string())?;
    let mut text = FeasibilityDocument::new(&name, &report).to_json();
    text.push('\n');
    let stdout = emit(config, text)?.unwrap_or_else(|| format!("status: {}\n", report.status));
    Ok(Outcome {
        exit_code: if report.status == FeasibilityStatus::Undetermined {
            EXIT_UNDETERMINED
        } else {
            EXIT_OK
        },
        stdout,
        stderr: String::new(),
    })
}

fn geodesic(config: &RunConfig) -> Result<Outcome, String> {
    let (name, algebra) = require_algebra(config)?;
    let coords = config.alpha.clone().ok_or("geodesic needs --alpha")?;
    if coords.len() != algebra.dim() {
        return Err(format!(
            "--alpha has {} components, {name} has dimension {}",
            coords.len(),
            algebra.dim()
        ));
    }
    let alpha = AlgebraElement::new(coords);
    let rep = algebra.require_rep().map_err(|e| e.to_string())?;
    let x0 = GroupPoint::identity(rep.size());
    let v0 = rep.embed(&alpha).map_err(|e| e.to_string())?;
    let traj =
        integrate_canonical_sode(&x0, &v0, config.t_end, config.steps as usize).map_err(|e| e.to_string())?;
    let text = match config.format.unwrap_or(Format::Csv) {
        Format::Csv => trajectory_csv(&traj),
        Format::Report => {
            let exact = exp_orbit(&algebra, &x0, &alpha, config.t_end).map_err(|e| e.to_string())?;
            let error = (traj.endpoint().0 - exact.matrix()).amax();
            format!(
                "algebra: {name}\nt_end: {:e}\nsteps: {}\nendpoint_error_vs_exponential: {error:e}\n",
                config.t_end, config.steps
            )
        }
    };
    Ok(Outcome::ok(emit(config, text)?.unwrap_or_default()))
}

fn go_demo(config: &RunConfig) -> Result<Outcome, String> {
    let v = match config.v.as_deref() {
        None => Vector2::new(1.0, 0.0),
        Some([a, b]) => Vector2::new(*a, *b),
        Some(other) => return Err(format!("--v needs 2 components, got {}", other.len())),
    };
    if !config.kappa.is_finite() || !v.iter().all(|c| c.is_finite()) {
        return Err("--kappa and --v must be finite".into());
    }
    let steps = config.steps as usize;
    let states = go_geodesic_ode(config.kappa, &GoState::new(Vector2::zeros(), v), config.t_end, steps)
        .map_err(|e| e.to_string())?;
    let times: Vec<f64> = (0..=steps)
        .map(|i| config.t_end * i as f64 / steps as f64)
        .collect();
    let mut verdict = GoVerdictDocument::new(&go_invariant_metrizability(config.kappa)).to_json();
    verdict.push('\n');
    if config.format == Some(Format::Report) {
        return Ok(Outcome::ok(emit(config, verdict)?.unwrap_or_default()));
    }
    let csv = go_trajectory_csv(&times, &states);
    Ok(match emit(config, csv)? {
        Some(csv) => Outcome {
            exit_code: EXIT_OK,
            stdout: csv,
            stderr: verdict,
        },
        None => Outcome::ok(verdict),
    })
}

fn verify(config: &RunConfig) -> Result<Outcome, String> {
    let report = liemetric::verify::run_all(config.seed);
    let text = report.render();
    let stdout = emit(config, text.clone())?.unwrap_or_default();
    Ok(Outcome {
        exit_code: if report.all_passed() { EXIT_OK } else { EXIT_INPUT },
        stdout,
        stderr: String::new(),
    })
}
