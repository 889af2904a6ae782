use std::process::ExitCode;

use clap::Parser;
use spherical_cli::config::Cli;

fn main() -> ExitCode {
    match spherical_cli::run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
