use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use geomq::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(outcome.output.as_bytes());
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("geomq: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
