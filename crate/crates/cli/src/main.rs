//! `qcldpc`: construct, analyze, threshold, optimize and simulate QC-LDPC codes.
//!
//! Exit codes: 0 success, 2 usage, 3 validation, 4 numerical failure.

mod commands;
mod manifest;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{AnalyzeArgs, ConstructArgs, OptimizeArgs, SimulateArgs, ThresholdArgs};

#[derive(Debug, Parser)]
#[command(name = "qcldpc", version, about = "Quasi-cyclic LDPC construction and analysis")]
struct Cli {
    /// Worker threads (default: all available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a parity-check matrix from a base file or a built-in mask.
    Construct(ConstructArgs),
    /// Structural audit of an alist matrix.
    Analyze(AnalyzeArgs),
    /// Density-evolution threshold of a degree distribution.
    Threshold(ThresholdArgs),
    /// Differential-evolution search for a degree distribution.
    Optimize(OptimizeArgs),
    /// AWGN Monte-Carlo FER/BER simulation.
    Simulate(SimulateArgs),
}

const EXIT_VALIDATION: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<qcldpc_core::Error>() {
        Some(qcldpc_core::Error::Numerical(_)) => EXIT_NUMERICAL,
        _ => EXIT_VALIDATION,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    }
    let result = match cli.command {
        Command::Construct(args) => commands::construct(args),
        Command::Analyze(args) => commands::analyze(args),
        Command::Threshold(args) => commands::threshold(args),
        Command::Optimize(args) => commands::optimize(args),
        Command::Simulate(args) => commands::simulate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
