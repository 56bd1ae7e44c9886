use std::process::ExitCode;

use clap::Parser;
use nodal_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = cli.into_config().and_then(|cfg| run(&cfg));
    match outcome {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", f.display());
            }
            for v in &outcome.violations {
                eprintln!("violated: {v}");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
