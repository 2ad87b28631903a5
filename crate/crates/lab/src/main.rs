use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ergolab::{config::ExperimentConfig, LabError};

#[derive(Parser)]
#[command(name = "ergolab", version, about = "Return-time and measure-geometry experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write its CSV and JSON reports.
    Run { config: String },
    /// Parse and validate a config without running it.
    Validate { config: String },
    /// List the nameable systems and their parameters.
    ListSystems,
    /// Print the version.
    Version,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config } => match ergolab::run_config_file(&config) {
            Ok(outcome) => {
                println!(
                    "ran: {} rows, pass={} fail={} inconclusive={}",
                    outcome.rows.len(),
                    outcome.pass,
                    outcome.fail,
                    outcome.inconclusive
                );
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Validate { config } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => return fail(LabError::Io(format!("reading {config}: {e}"))),
            };
            match ExperimentConfig::from_json(&text) {
                Ok(_) => {
                    println!("ok");
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::ListSystems => {
            for (name, params, doc) in ergolab_core::gallery::system_catalog() {
                if params.is_empty() {
                    println!("{name}: {doc}");
                } else {
                    println!("{name} [{params}]: {doc}");
                }
            }
            ExitCode::SUCCESS
        }
        Command::Version => {
            println!("ergolab {}", env!("CARGO_PKG_VERSION"));
            ExitCode::SUCCESS
        }
    }
}

fn fail(e: LabError) -> ExitCode {
    eprintln!("{e}");
    ExitCode::from(e.exit_code())
}
