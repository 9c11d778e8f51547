use std::process::ExitCode;

use areawalk::cli::{exit_code, run, Cli, RunConfig};
use clap::Parser;

fn main() -> ExitCode {
    let config = RunConfig::from(Cli::parse());
    match run(&config) {
        Ok(outcome) => {
            for name in &outcome.failures {
                eprintln!("FAIL: {name}");
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
