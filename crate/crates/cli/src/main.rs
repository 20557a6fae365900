use clap::Parser;
use mesoscat::config::Command;
use mesoscat::{execute, Invocation};
use std::path::PathBuf;
use std::process::ExitCode;

/// Meso-scale approximations for membranes with clusters of small inertial inclusions.
#[derive(Parser)]
#[command(name = "mesoscat", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON problem description.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `output.directory` from the config (default: current directory).
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    verbose: bool,
}

fn main() -> ExitCode {
    let a = Args::parse();
    let inv = Invocation {
        command: a.command,
        config: a.config,
        output_dir: a.output_dir,
        threads: a.threads,
        verbose: a.verbose,
    };
    match execute(&inv) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
