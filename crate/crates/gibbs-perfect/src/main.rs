use std::process::ExitCode;

use clap::Parser;
use gibbs_perfect::cli::{run_cli, Cli};

fn main() -> ExitCode {
    ExitCode::from(run_cli(Cli::parse()) as u8)
}
