//! Command-line front end for `ncmeasure`: spec files in, deterministic
//! reports out.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod point;
pub mod report;

pub use config::{Format, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "ncmeasure",
    version,
    about = "Lebesgue decomposition of NC measures on truncated Fock spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub config: RunConfig,

    /// Write the report here (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for internal parallelism (0 = automatic).
    #[arg(long, env = "NCMEASURE_THREADS", default_value_t = 0, global = true)]
    pub threads: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decompose MU against the splitting measure LAMBDA.
    Decompose { mu: PathBuf, lambda: PathBuf },
    /// Evaluate transforms of MU at the points in POINTS.
    Transform { mu: PathBuf, points: PathBuf },
    /// Cuntz distance trace and Gram ranks of LAMBDA.
    Diagnose { lambda: PathBuf },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    InFile {
        path: PathBuf,
        source: ncmeasure::Error,
    },

    #[error(transparent)]
    Core(#[from] ncmeasure::Error),

    #[error("cannot write report to {}: {source}", path.display())]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn in_file(path: &Path, source: ncmeasure::Error) -> Self {
        CliError::InFile {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 2: spec or validation error, 3: numerical failure, 4: invariant breach.
    pub fn exit_code(&self) -> i32 {
        use ncmeasure::Error as E;
        match self {
            CliError::Read { .. } => 2,
            CliError::Write { .. } => 4,
            CliError::InFile { source: e, .. } | CliError::Core(e) => match e {
                E::NotHermitian { .. }
                | E::NotPositive { .. }
                | E::DegenerateMeasure { .. }
                | E::OrderingViolation { .. } => 3,
                E::Invariant(_) => 4,
                _ => 2,
            },
        }
    }
}

/// Runs one invocation and returns the rendered report.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let cfg = &cli.config;
    let value = match &cli.command {
        Command::Decompose { mu, lambda } => {
            let m = commands::load_measure_spec(mu)?;
            let l = commands::load_measure_spec(lambda)?;
            commands::decompose(&m, &l, cfg)?
        }
        Command::Transform { mu, points } => {
            let m = commands::load_measure_spec(mu)?;
            let p = commands::load_point_spec(points)?;
            commands::transform(&m, &p, cfg)?
        }
        Command::Diagnose { lambda } => {
            let l = commands::load_measure_spec(lambda)?;
            commands::diagnose(&l, cfg)?
        }
    };
    Ok(commands::render(value, cfg.format))
}

/// Sends the report to `--out` or stdout.
pub fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => report::write_atomic(path, text).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
