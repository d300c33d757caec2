use std::process::ExitCode;

use clap::Parser;
use germlab::cli::{emit, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli);
    ExitCode::from(emit(&cli, &outcome))
}
