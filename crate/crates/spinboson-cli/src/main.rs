//! `spinboson`: run the measurement-model computations from the shell.
//!
//! Exit codes: 0 success, 1 computation failure, 2 bad usage or invalid
//! parameters.

mod commands;
mod config;
mod output;

use clap::Parser;

/// Caller mistakes (bad flags, malformed config); exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() {
    let cli = config::Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(exit_code(&e));
    }
}

fn run(cli: config::Cli) -> anyhow::Result<()> {
    let resolved = config::resolve(cli)?;
    eprintln!("{}", serde_json::to_string_pretty(&resolved.to_json())?);
    commands::run(&resolved)
}

fn exit_code(e: &anyhow::Error) -> i32 {
    if e.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    if let Some(lib) = e.downcast_ref::<spinboson::Error>() {
        if lib.is_invalid_input() {
            return 2;
        }
    }
    1
}
