use std::io::ErrorKind;
use std::process::ExitCode;

use clap::Parser;
use pathdev_cli::cli::Cli;
use pathdev_cli::commands::run;
use pathdev_cli::CliError;

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Io { source, .. }) if source.kind() == ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
