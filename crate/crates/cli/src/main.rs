use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "fockforge",
    about = "Deformed-ladder batch verification: run configured task sweeps and write CSV/JSON reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute every task in the configuration and write reports.
    Run {
        /// Path to the JSON run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Report directory (overrides FOCKFORGE_OUT and the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Thread-pool size for within-task parallelism.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Parse and validate a configuration without running anything.
    Validate {
        /// Path to the JSON run configuration.
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, out, jobs } => {
            match fockforge_cli::run(&config, out.as_deref(), jobs) {
                Ok(true) => ExitCode::SUCCESS,
                Ok(false) => {
                    eprintln!("one or more task assertions failed (see summary.json)");
                    ExitCode::from(1)
                }
                Err(e) => {
                    eprintln!("error: {}", e.message());
                    ExitCode::from(e.exit_code())
                }
            }
        }
        Command::Validate { config } => match fockforge_cli::validate(&config) {
            Ok(()) => {
                println!("configuration OK");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {}", e.message());
                ExitCode::from(e.exit_code())
            }
        },
    }
}
