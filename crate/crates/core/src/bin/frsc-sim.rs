use std::process::ExitCode;

use clap::Parser;
use frsc_sim::cli::{execute, Cli};
use frsc_sim::Error;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file = match &cli.flags.config {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(t) => Some(t),
            Err(e) => {
                eprintln!("error: config key `config`: cannot read {}: {e}", p.display());
                return ExitCode::from(2);
            }
        },
        None => None,
    };
    let cfg = match cli.resolve(file.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match execute(&cfg) {
        Ok(report) => {
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            for n in &report.notes {
                println!("{n}");
            }
            ExitCode::SUCCESS
        }
        Err(e @ Error::Config { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
