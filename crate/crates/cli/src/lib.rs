//! Command-line front end: each subcommand regenerates one data set and
//! validates it against the closed-form predictions.
//!
//! Exit status: 0 success, 1 computation error, 2 configuration error,
//! 3 I/O error, 4 failed `--check`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

pub use args::{Cli, Command};
pub use commands::Report;
pub use config::{Format, Overrides, RunConfig};
pub use error::{CliError, CliResult};

/// Resolve the configuration layers for `cli`.
pub fn resolve(cli: &Cli) -> CliResult<RunConfig> {
    let file = match &cli.config {
        Some(path) => Overrides::from_file(path)?,
        None => Overrides::default(),
    };
    RunConfig::resolve(cli.overrides().over(file), cli.check)
}

/// Run `command` on a pool of `cfg.threads` workers.
pub fn execute(command: &Command, cfg: &RunConfig) -> CliResult<Report> {
    let job = || match command {
        Command::Simulate { .. } => commands::simulate(cfg),
        Command::RatioSweep { .. } => commands::ratio_sweep(cfg),
        Command::AlphaSweep { .. } => commands::alpha_sweep(cfg),
        Command::Density => commands::density(cfg),
        Command::ExitTime => commands::exit_time(cfg),
        Command::Born { .. } => commands::born(cfg),
        Command::Models => commands::models(cfg),
    };
    match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("cannot start {n} workers: {e}")))?
            .install(job),
        None => job(),
    }
}

/// Parse `args` (program name first) and run the command in-process.
pub fn run_from<I, T>(args: I) -> CliResult<Report>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Config(e.to_string()))?;
    let cfg = resolve(&cli)?;
    execute(&cli.command, &cfg)
}

/// Full CLI: parse, run, print the report, map the outcome to an exit code.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(CliError::CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = resolve(&cli).and_then(|cfg| {
        let report = execute(&cli.command, &cfg)?;
        let mut stdout = std::io::stdout().lock();
        serde_json::to_writer_pretty(&mut stdout, &report)
            .map_err(std::io::Error::from)
            .and_then(|_| writeln!(stdout))
            .map_err(|e| CliError::io("<stdout>", e))?;
        if cfg.check && !report.passed() {
            let names: Vec<&str> = report.failures().iter().map(|c| c.name.as_str()).collect();
            return Err(CliError::CheckFailed(names.join("; ")));
        }
        Ok(())
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("telegraph: {e}");
            e.exit_code()
        }
    }
}
