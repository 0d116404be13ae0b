//! Command-line harness: `sensitivity`, `ensemble`, `envelope` and
//! `windows`, writing CSV tables and SVG plots to an output directory.
//!
//! Exit status is 0 on success, 1 for configuration (or I/O) errors and 2
//! when at least one row or ensemble member failed.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{
    cmd_ensemble, cmd_envelope, cmd_sensitivity, cmd_windows, Outcome, CI_LEVEL,
    WINDOW_TABLE_POINTS,
};
pub use config::{ExperimentConfig, ParamSweep, SystemKind};

use crate::error::Result;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_ROW_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "shadowlab",
    version,
    about = "Windowed shadowing sensitivities of chaotic ODEs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy)]
enum CommandKind {
    Sensitivity,
    Ensemble,
    Envelope,
    Windows,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derivative estimates for every parameter value, member and window.
    Sensitivity(Overrides),
    /// Spread of the estimates across an ensemble of initial conditions.
    Ensemble(Overrides),
    /// Norm of the shadowing direction along one trajectory.
    Envelope(Overrides),
    /// Table and plot of the window functions.
    Windows(Overrides),
}

/// Flags override the config file, which overrides the defaults.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Flat `key = value` file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// `lorenz` or `linear`.
    #[arg(long)]
    pub system: Option<String>,
    /// Value, comma list, or `start:stop:step`.
    #[arg(long)]
    pub rho: Option<String>,
    #[arg(long = "T")]
    pub horizon: Option<String>,
    #[arg(long)]
    pub dt: Option<String>,
    #[arg(long = "burn-in")]
    pub burn_in: Option<String>,
    /// Label, comma list, or `all`.
    #[arg(long)]
    pub window: Option<String>,
    /// `tangent`, `adjoint` or `both`.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long = "ensemble-size")]
    pub ensemble_size: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long)]
    pub jobs: Option<String>,
}

impl Overrides {
    /// Default config, then the file, then the flags.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_file(p)?,
            None => ExperimentConfig::default(),
        };
        let flags = [
            ("system", &self.system),
            ("rho", &self.rho),
            ("T", &self.horizon),
            ("dt", &self.dt),
            ("burn_in", &self.burn_in),
            ("window", &self.window),
            ("method", &self.method),
            ("ensemble_size", &self.ensemble_size),
            ("seed", &self.seed),
            ("out", &self.out),
            ("jobs", &self.jobs),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        Ok(cfg)
    }
}

/// Runs a parsed command on a worker pool sized by `jobs`.
pub fn execute(command: &Command) -> Result<Outcome> {
    let (kind, flags) = match command {
        Command::Sensitivity(o) => (CommandKind::Sensitivity, o),
        Command::Ensemble(o) => (CommandKind::Ensemble, o),
        Command::Envelope(o) => (CommandKind::Envelope, o),
        Command::Windows(o) => (CommandKind::Windows, o),
    };
    let cfg = flags.resolve()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool
        .build()
        .map_err(|e| crate::Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match kind {
        CommandKind::Sensitivity => cmd_sensitivity(&cfg),
        CommandKind::Ensemble => cmd_ensemble(&cfg),
        CommandKind::Envelope => cmd_envelope(&cfg),
        CommandKind::Windows => cmd_windows(&cfg.output_dir),
    })
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(out) => {
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            if out.failed_rows > 0 {
                eprintln!("{} row(s) failed", out.failed_rows);
                EXIT_ROW_FAILED
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}
