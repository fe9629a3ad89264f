//! `fiq`: reproducible experiments on finite-information quantities.
//!
//! Every output starts with a `#` line carrying the version and a command
//! line that reproduces the body byte for byte.
//!
//! Exit codes: 0 success, 1 usage, 2 degenerate input, 3 resource cap.

mod commands;
mod config;
mod error;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{
    BehaviorArgs, FeasibilityArgs, HumphreysArgs, LlnArgs, MeasureArgs, Report, SimulateArgs,
};
use config::FileConfig;
use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "fiq",
    version,
    about = "Finite-information quantities and propensity experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    Simulate(SimulateArgs),
    Measure(MeasureArgs),
    Lln(LlnArgs),
    Humphreys(HumphreysArgs),
    Feasibility(FeasibilityArgs),
    Behavior(BehaviorArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (report, out) = match cli.command {
        Command::Simulate(a) => {
            let file = FileConfig::load(a.output.config.as_deref())?;
            let out = a.output.out.clone();
            (commands::simulate(a, file)?, out)
        }
        Command::Measure(a) => {
            let file = FileConfig::load(a.output.config.as_deref())?;
            let out = a.output.out.clone();
            (commands::measure_cmd(a, file)?, out)
        }
        Command::Lln(a) => {
            let file = FileConfig::load(a.output.config.as_deref())?;
            let out = a.output.out.clone();
            (commands::lln(a, file)?, out)
        }
        Command::Humphreys(a) => {
            let file = FileConfig::load(a.output.config.as_deref())?;
            let out = a.output.out.clone();
            (commands::humphreys(a, file)?, out)
        }
        Command::Feasibility(a) => {
            let file = FileConfig::load(a.output.config.as_deref())?;
            let out = a.output.out.clone();
            (commands::feasibility(a, file)?, out)
        }
        Command::Behavior(a) => {
            let out = a.output.out.clone();
            (commands::behavior(a)?, out)
        }
    };
    emit(&report, out)?;
    report.status
}

fn emit(report: &Report, out: Option<std::path::PathBuf>) -> Result<(), CliError> {
    let text = report.render();
    match out {
        Some(path) => std::fs::write(&path, text).map_err(|source| CliError::Io { path, source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let rendered = e.render().to_string();
            eprintln!(
                "fiq: {}",
                rendered
                    .lines()
                    .next()
                    .unwrap_or("usage error")
                    .trim_start_matches("error: ")
            );
            return ExitCode::from(1);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fiq: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
