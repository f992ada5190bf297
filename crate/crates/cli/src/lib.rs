//! Command-line harness around `hybridlink-core`: scenario JSON in, CSV out.

pub mod commands;
pub mod error;
pub mod scenario;
pub mod table;

use std::path::PathBuf;

use clap::Parser;

pub use commands::{execute, Command, Report};
pub use error::{CliError, Result};
pub use scenario::{Grid, Scenario};
pub use table::{format_value, ResultTable};

pub const THREADS_ENV: &str = "HYBRIDLINK_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "hybridlink",
    version,
    about = "Hybrid entanglement swapping and key-rate tables"
)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Scenario JSON (version 1); defaults apply when omitted.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Override a scenario key, e.g. `alpha=0.6` or `distance_grid.count=11`.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
}

/// Thread count from `HYBRIDLINK_THREADS`; `None` leaves the machine default.
pub fn thread_cap(value: Option<&str>) -> Result<Option<usize>> {
    match value.map(str::trim) {
        None | Some("") => Ok(None),
        Some(v) => match v.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!(
                "{THREADS_ENV} must be a positive integer, got `{v}`"
            ))),
        },
    }
}

/// Rendered CSV plus any self-check failures; the table is written either way.
#[derive(Debug, Clone)]
pub struct Output {
    pub csv: String,
    pub failed: Vec<String>,
}

impl Output {
    pub fn check(&self) -> Result<()> {
        if self.failed.is_empty() {
            Ok(())
        } else {
            Err(CliError::Check(format!("failed suites: {}", self.failed.join(", "))))
        }
    }
}

/// Loads the scenario, runs the command on a sized pool, and writes `--out` if given.
pub fn run(cli: &Cli, threads: Option<usize>) -> Result<Output> {
    let scenario = Scenario::load(cli.scenario.as_deref(), &cli.params)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Usage(e.to_string()))?;
    let report = pool.install(|| execute(cli.command, &scenario))?;
    let csv = report.table.to_csv();
    if let Some(path) = &cli.out {
        std::fs::write(path, &csv).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(Output {
        csv,
        failed: report.failed,
    })
}
