use std::process::ExitCode;

use clap::Parser;
use overlap_cli::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match overlap_cli::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(overlap_cli::exit_code(&err))
        }
    }
}
