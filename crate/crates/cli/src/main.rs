mod args;
mod commands;
mod render;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use statmode_core::Error;

use crate::args::Cli;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Usage(_) | Error::Domain(_) => 1,
        Error::Data(_) | Error::Io { .. } => 2,
        Error::NoConvergence { .. } | Error::Degenerate(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap sends help and version to stdout, everything else to stderr
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match commands::run(cli) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(outcome.stdout.as_bytes()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("statmode: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
