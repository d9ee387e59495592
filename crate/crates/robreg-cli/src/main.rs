mod args;
mod handlers;
mod io;

use std::fmt;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// CLI failure with its process exit code: 1 for input problems, 2 when a
/// solver fails to converge or a numerical check breaks down.
#[derive(Debug)]
pub struct CliError {
    message: String,
    code: u8,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            message: message.into(),
            code: 1,
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        CliError {
            message: message.into(),
            code: 2,
        }
    }

    pub fn code(&self) -> u8 {
        self.code
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl From<robreg::Error> for CliError {
    fn from(e: robreg::Error) -> Self {
        CliError::input(e.to_string())
    }
}

fn main() -> ExitCode {
    // clap's default usage-error exit code is 2, which this tool reserves
    // for non-convergence; map malformed command lines to 1 instead
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let ok = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return ExitCode::from(if ok { 0 } else { 1 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Fit(args) => handlers::fit(args),
        Command::Path(args) => handlers::path(args),
        Command::Worstcase(args) => handlers::worstcase(args),
        Command::Bound(args) => handlers::bound(args),
        Command::Radius(args) => handlers::radius(args),
        Command::Kde(args) => handlers::kde(args),
        Command::Consistency(args) => handlers::consistency(args),
        Command::Sparsity(args) => handlers::sparsity(args),
        Command::Stability(args) => handlers::stability(args),
    }
}
