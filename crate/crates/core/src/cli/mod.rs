//! The `blowup` command line: `certify`, `region`, `simulate` and
//! `compare-levine`.
//!
//! Exit codes: 0 success, 2 invalid input, 3 inconclusive (no certificate),
//! 4 verification failure. Nothing else is returned.

mod commands;
mod config;

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use commands::{levine_comparison, LevineComparison, RatioCount, Witness};
pub use config::{OdiRunConfig, ScalarInitial, SystemRunConfig, Tolerances, WaveRunConfig};

use crate::integrate::IntegrateError;
use crate::odi::OdiError;
use crate::spectral::SpectralError;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_INCONCLUSIVE: u8 = 3;
pub const EXIT_VERIFICATION: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) | CliError::Io(_) => EXIT_INVALID,
            CliError::Inconclusive(_) => EXIT_INCONCLUSIVE,
            CliError::Verification(_) => EXIT_VERIFICATION,
        }
    }
}

impl From<OdiError> for CliError {
    fn from(e: OdiError) -> Self {
        match e {
            OdiError::NotCertified(_)
            | OdiError::HypothesisViolated(_)
            | OdiError::ConditionViolated { .. } => CliError::Inconclusive(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<IntegrateError> for CliError {
    fn from(e: IntegrateError) -> Self {
        match e {
            IntegrateError::Odi(inner) => inner.into(),
            IntegrateError::InvalidOptions(_)
            | IntegrateError::DimensionMismatch { .. }
            | IntegrateError::Precondition(_) => CliError::Invalid(e.to_string()),
            _ => CliError::Verification(e.to_string()),
        }
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::Odi(inner) => inner.into(),
            SpectralError::Integrate(inner) => inner.into(),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "blowup", version, about = "Finite-time blow-up certificates and their numerical verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether initial data is certified to blow up; prints a JSON verdict.
    #[command(subcommand)]
    Certify(CertifyCommand),
    /// Print a boundary curve as CSV `x,y`.
    Region(RegionArgs),
    /// Run a config file and verify the run against its certificate.
    Simulate(SimulateArgs),
    /// Cross-test sampled points of the comparison wedge and of our region.
    CompareLevine(LevineArgs),
}

#[derive(Debug, Subcommand)]
pub enum CertifyCommand {
    /// `v'' + a v >= b v'^q`.
    Scalar {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, allow_hyphen_values = true)]
        q: f64,
        #[arg(long, allow_hyphen_values = true)]
        v0: f64,
        #[arg(long, allow_hyphen_values = true)]
        v1: f64,
    },
    /// Wave inequality projected onto the first eigenfunction.
    Wave {
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long = "C", allow_hyphen_values = true)]
        growth: f64,
        #[arg(long, allow_hyphen_values = true)]
        q: f64,
        #[arg(long, allow_hyphen_values = true)]
        v0: f64,
        #[arg(long, allow_hyphen_values = true)]
        v1: f64,
        #[arg(long, default_value_t = 0.5)]
        phi_sup: f64,
    },
    /// Coupled inequality `U'' + aU >= V'^p`, `V'' + aV >= U'^q`.
    System {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
        #[arg(long, allow_hyphen_values = true)]
        q: f64,
        #[arg(long, allow_hyphen_values = true)]
        u0: f64,
        #[arg(long, allow_hyphen_values = true)]
        v0: f64,
        #[arg(long, allow_hyphen_values = true)]
        u1: f64,
        #[arg(long, allow_hyphen_values = true)]
        v1: f64,
        /// Sup of the eigenfunction, for the PDE L1 bound.
        #[arg(long)]
        phi_sup: Option<f64>,
    },
    /// Hyperbolic-elliptic reduction.
    Elliptic {
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, allow_hyphen_values = true)]
        q: f64,
        #[arg(long, allow_hyphen_values = true)]
        u0: f64,
        #[arg(long, allow_hyphen_values = true)]
        u1: f64,
        #[arg(long, default_value_t = 0.5)]
        phi_sup: f64,
    },
    /// Hyperbolic-parabolic reduction.
    Parabolic {
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, allow_hyphen_values = true)]
        q: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true)]
        m: f64,
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
        #[arg(long, allow_hyphen_values = true)]
        u0: f64,
        #[arg(long, allow_hyphen_values = true)]
        v0: f64,
        #[arg(long, allow_hyphen_values = true)]
        u1: f64,
        #[arg(long, default_value_t = 0.5)]
        phi_sup: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegionKindArg {
    Subq,
    Superq,
    Levine,
    System,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SystemFace {
    P,
    Q,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[arg(long, value_enum)]
    pub kind: RegionKindArg,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<f64>,
    /// With `--v1`, draw `F2` through this point instead of the admissible edge.
    #[arg(long, allow_hyphen_values = true)]
    pub v0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub v1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long = "C", allow_hyphen_values = true)]
    pub growth: Option<f64>,
    /// Which face of the system region to draw.
    #[arg(long, value_enum, default_value = "p")]
    pub face: SystemFace,
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
    pub range: Vec<f64>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimulateKind {
    Odi,
    System,
    Wave,
    Elliptic,
    Parabolic,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(value_enum)]
    pub kind: SimulateKind,
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides `output_dir` from the config.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LevineArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: f64,
    #[arg(long = "C", allow_hyphen_values = true)]
    pub growth: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub q: f64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Maximum number of witnesses to emit.
    #[arg(long, default_value_t = 5)]
    pub witnesses: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command,
/// writing results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match commands::dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "blowup: {e}");
            e.exit_code()
        }
    }
}

pub fn main() -> ExitCode {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let code = run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    ExitCode::from(code)
}
