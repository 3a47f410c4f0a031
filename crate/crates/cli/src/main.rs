//! `jainlab`: evaluate Jain-Baskakov operators and run moment, bound and
//! convergence experiments. Results go to CSV or JSON.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jainlab::Family;

use settings::{Format, FunctionSpec, GridSpec, Settings};

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    /// A checked property does not hold (exit 1).
    Property(String),
    /// Invalid configuration or input (exit 2).
    Config(String),
    /// A numeric resource cap was hit (exit 3).
    Numeric(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Property(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<jainlab::Error> for CliError {
    fn from(e: jainlab::Error) -> Self {
        if e.is_numeric_cap() {
            CliError::Numeric(e.to_string())
        } else if matches!(e, jainlab::Error::SandwichViolated { .. }) {
            CliError::Property(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Property(m) => write!(f, "property violated: {m}"),
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric cap: {m}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "jainlab",
    version,
    about = "Jain-Baskakov operator experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Evaluate an operator at one point.
    Eval,
    /// Compare closed-form and numeric moments over a grid.
    VerifyMoments,
    /// Measured error against the assembled rate bound.
    Bound,
    /// Test-monomial sup-errors over a compact interval.
    Korovkin,
    /// Estimate the sandwich constant for the second central moment.
    EstimateC,
}

#[derive(Args)]
struct Flags {
    /// jain | jain-baskakov | jain-baskakov-c | stancu
    #[arg(long, global = true)]
    family: Option<Family>,
    #[arg(long, global = true)]
    n: Option<u32>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    mu: Option<f64>,
    #[arg(long, global = true)]
    r: Option<u32>,
    /// Basis parameter; repeat for several values.
    #[arg(long, global = true, allow_negative_numbers = true)]
    c: Vec<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    x: Option<f64>,
    /// poly:c0,c1,... | piecewise:bp|c0,c1;bp|... | corpus:<name>
    #[arg(long, global = true)]
    f: Option<String>,
    /// a,b,c or start:stop:count[:log]
    #[arg(long, global = true)]
    n_grid: Option<String>,
    /// a,b,c or start:stop:count[:log]
    #[arg(long, global = true)]
    x_grid: Option<String>,
    /// inv-sqrt | const:<v>
    #[arg(long, global = true)]
    mu_rule: Option<String>,
    #[arg(long, global = true)]
    threshold: Option<f64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// TOML file with the same keys as the flags; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for grid sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

impl Flags {
    fn into_settings(self) -> Settings {
        Settings {
            family: self.family,
            n: self.n,
            mu: self.mu,
            r: self.r,
            c: (!self.c.is_empty()).then_some(self.c),
            alpha: self.alpha,
            beta: self.beta,
            x: self.x,
            f: self.f.map(FunctionSpec::Text),
            n_grid: self.n_grid.map(GridSpec::Text),
            x_grid: self.x_grid.map(GridSpec::Text),
            mu_rule: self.mu_rule,
            threshold: self.threshold,
            format: self.format,
            out: self.out,
            jobs: self.jobs,
            accuracy: None,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let base = match &cli.flags.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    let settings = base.merge(cli.flags.into_settings());
    if let Some(jobs) = settings.jobs {
        if jobs == 0 {
            return Err(CliError::config("jobs >= 1 required"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::config(format!("cannot start {jobs} workers: {e}")))?;
    }
    match cli.command {
        Command::Eval => commands::eval(&settings),
        Command::VerifyMoments => commands::verify_moments_cmd(&settings),
        Command::Bound => commands::bound(&settings),
        Command::Korovkin => commands::korovkin(&settings),
        Command::EstimateC => commands::estimate_c(&settings),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("jainlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
