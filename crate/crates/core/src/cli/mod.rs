//! `koethe-lab` command line: argument model, dispatch and report output.

mod commands;
mod render;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::growth_dsl::DslError;
use crate::matrix_calculus::CalculusError;
use crate::norm_lab::NormError;
use crate::quasi_equiv::QuasiError;
use crate::smooth_ops::SmoothError;

pub use render::render_text;

pub const THREADS_ENV: &str = "KOETHE_LAB_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: DslError },
    #[error(transparent)]
    Dsl(#[from] DslError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Smooth(#[from] SmoothError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Quasi(#[from] QuasiError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("bad --probe argument '{0}' (expected J=<int> Q=<int>)")]
    BadProbe(String),
    #[error("{0}")]
    BadArgument(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstructKind {
    PowerSeries,
    CanonicalBasis,
    BlockHouseholder,
    PlantedPair,
}

#[derive(Debug, Parser)]
#[command(name = "koethe-lab", version, about = "Köthe matrix decisions, probes and finite operator experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Report path (construct: output directory).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Probe grid size, e.g. `--probe J=10000 Q=8`.
    #[arg(long, global = true, num_args = 1..=2, value_names = ["J=<int>", "Q=<int>"])]
    pub probe: Option<Vec<String>>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse specs or grids and validate the Köthe axioms.
    Check { inputs: Vec<PathBuf> },
    /// Symbolic classification, optionally cross-checked by `--probe`.
    Classify { inputs: Vec<PathBuf> },
    /// Numeric probes on a grid file or an evaluated spec.
    Probe { input: PathBuf },
    /// Emit a named family as spec and grid files.
    Construct {
        #[arg(value_enum)]
        kind: ConstructKind,
        /// `j`, `log j`, `j^θ` or `log log j` (tabulated as `log(1 + log j)`).
        #[arg(long, default_value = "j")]
        alpha: String,
        #[arg(long, default_value_t = 64)]
        truncate: usize,
        #[arg(long, default_value_t = 8)]
        grades: usize,
        /// Also write the profile of the unit-vector basis.
        #[arg(long)]
        profile: bool,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 6)]
        blocks: u32,
    },
    /// Quasi-equivalence match between two grids.
    Match { a: PathBuf, b: PathBuf },
    /// Random-instance suites for the norm constructions, or one model file.
    Normlab {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        models: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Limits {
    pub j: usize,
    pub q: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { j: 10_000, q: 8 }
    }
}

impl Limits {
    pub fn parse(args: &[String]) -> Result<Self, CliError> {
        let mut out = Limits::default();
        for tok in args.iter().flat_map(|a| a.split(',')).filter(|t| !t.is_empty()) {
            let (key, value) = tok.split_once('=').ok_or_else(|| CliError::BadProbe(tok.to_string()))?;
            let v: usize = value.trim().parse().map_err(|_| CliError::BadProbe(tok.to_string()))?;
            if v == 0 {
                return Err(CliError::BadProbe(tok.to_string()));
            }
            match key.trim() {
                "J" | "j" => out.j = v,
                "Q" | "q" => out.q = v,
                _ => return Err(CliError::BadProbe(tok.to_string())),
            }
        }
        Ok(out)
    }
}

#[derive(Debug)]
pub struct RunConfig {
    pub command: Command,
    pub limits: Option<Limits>,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl TryFrom<Cli> for RunConfig {
    type Error = CliError;

    fn try_from(cli: Cli) -> Result<Self, CliError> {
        let limits = cli.probe.as_deref().map(Limits::parse).transpose()?;
        Ok(RunConfig { command: cli.command, limits, seed: cli.seed, format: cli.format, out: cli.out })
    }
}

/// Exit `0`, or `2` when a symbolic verdict or lemma check is contradicted.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: serde_json::Value,
}

pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    commands::dispatch(config)
}

/// Renders the report in the configured format.
pub fn format_report(config: &RunConfig, outcome: &Outcome) -> Result<String, CliError> {
    Ok(match config.format {
        Format::Json => serde_json::to_string_pretty(&outcome.report)? + "\n",
        Format::Text => render_text(&outcome.report),
    })
}

/// Caps the global rayon pool from `KOETHE_LAB_THREADS`.
pub fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::BadArgument(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?;
        // Fails only if a pool already exists, which is harmless here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Full entry point: parse, run, write the report. Returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = init_threads().and_then(|_| RunConfig::try_from(cli)).and_then(|cfg| {
        let outcome = run(&cfg)?;
        let text = format_report(&cfg, &outcome)?;
        match (&cfg.out, &cfg.command) {
            (Some(path), c) if !matches!(c, Command::Construct { .. }) => std::fs::write(path, text)?,
            _ => print!("{text}"),
        }
        Ok(outcome.code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
