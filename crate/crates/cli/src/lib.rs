//! The `flashx` command-line front end.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 infeasible or
//! invalid mapping, 3 closed-form counts disagreeing with the step walk.

use std::fmt;

use clap::Parser;
use flashx_core::Error;

pub mod args;
pub mod commands;
pub mod output;
pub mod reproduce;
pub mod resolve;


use args::{Cli, Command};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_INFEASIBLE: u8 = 2;
pub const EXIT_ORACLE: u8 = 3;

/// The closed form and the step walk disagree.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleMismatch(pub Vec<String>);

impl fmt::Display for OracleMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "oracle mismatch: {}", self.0.join("; "))
    }
}

impl std::error::Error for OracleMismatch {}

pub fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<OracleMismatch>().is_some() {
        return EXIT_ORACLE;
    }
    match err.downcast_ref::<Error>() {
        Some(
            Error::InvalidMapping(_)
            | Error::NoFeasibleMapping { .. }
            | Error::IllegalLoopOrder { .. }
            | Error::IllegalClusterSize { .. }
            | Error::InfeasibleSpatialTile { .. },
        ) => EXIT_INFEASIBLE,
        _ => EXIT_CONFIG,
    }
}

pub fn run(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Explore(a) => commands::explore_cmd(a),
        Command::Cost(a) => commands::cost_cmd(a),
        Command::PruneStats(a) => commands::prune_stats_cmd(a),
        Command::Reproduce(a) => reproduce::reproduce_cmd(a),
        Command::Presets(a) => commands::presets_cmd(a),
    }
}

/// Sizes the worker pool from `FLASHX_THREADS` when set.
pub fn init_threads() -> anyhow::Result<()> {
    let Ok(v) = std::env::var("FLASHX_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| Error::Config {
        field: "FLASHX_THREADS".into(),
        reason: format!("`{v}` is not a thread count"),
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config {
            field: "FLASHX_THREADS".into(),
            reason: e.to_string(),
        })?;
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match init_threads().and_then(|_| run(&cli)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}
