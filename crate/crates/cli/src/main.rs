mod commands;
mod echo;

use std::process::ExitCode;

use clap::Parser;

use commands::Cli;
use groupshap::ErrorClass;

/// Failure of a subcommand, mapped onto the exit-code taxonomy.
#[derive(Debug)]
pub enum Failure {
    /// Inconsistent flags (exit 1).
    Usage(String),
    /// Library error: validation (exit 2) or degenerate statistics (exit 3).
    Core(groupshap::Error),
}

impl From<groupshap::Error> for Failure {
    fn from(e: groupshap::Error) -> Self {
        Failure::Core(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            match e.class() {
                ErrorClass::Validation => ExitCode::from(2),
                ErrorClass::Degenerate => ExitCode::from(3),
            }
        }
    }
}
