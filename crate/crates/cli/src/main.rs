use std::process::ExitCode;

use clap::Parser;
use onlinefwer_cli::args::{execute, Cli};

fn main() -> ExitCode {
    execute(Cli::parse())
}
