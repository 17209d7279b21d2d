//! `butterfly`: rates, sweeps, crossings and simulations from the command
//! line. Exit status 0 on success, 1 on usage errors, 2 when a computation
//! or a verification check fails.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use butterfly_core::Error;
use clap::Parser;

use args::{Cli, Command};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Domain { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Compute(e.to_string()),
        }
    }
}

const EXIT_USAGE: u8 = 1;
const EXIT_FAILURE: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILURE),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let (rendered, out, ok) = match &cli.command {
        Command::Rate(a) => (commands::rate(a)?, a.out.clone(), true),
        Command::Sweep(a) => (commands::sweep(a)?, a.out.clone(), true),
        Command::Crossing(a) => (commands::crossing(a)?, a.out.clone(), true),
        Command::Simulate(a) => (commands::simulate_cmd(a)?, a.out.clone(), true),
        Command::Verify(a) => {
            let (r, ok) = commands::verify(a)?;
            (r, a.out.clone(), ok)
        }
    };
    rendered.write(out.as_deref()).map_err(|e| CliError::Compute(format!("cannot write output: {e}")))?;
    Ok(ok)
}
