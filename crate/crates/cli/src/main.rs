//! `replicator`: simulate, solve and check replicator dynamics on polymatrix
//! games described in JSON files.

mod classify;
mod cloud;
mod common;
mod equilibrium;
mod failure;
mod gamefile;
mod simulate;
mod svg;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use failure::Failure;

#[derive(Debug, Parser)]
#[command(name = "replicator", version, about = "Replicator dynamics on polymatrix games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one orbit; CSV to stdout, or trajectory.csv and diagnostics.json under --out.
    Simulate(simulate::SimulateArgs),
    /// Interior or maximal-support Nash equilibrium as JSON.
    Equilibrium(equilibrium::EquilibriumArgs),
    /// Predicted and measured limit behavior of an orbit as JSON.
    Classify(classify::ClassifyArgs),
    /// Evolve a disk of points in cumulative space; snapshots, volumes and SVG frames under --out.
    Cloud(cloud::CloudArgs),
    /// Run the invariant checks on a game; exits 1 if any check fails.
    Verify(verify::VerifyArgs),
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    match &cli.command {
        Command::Simulate(a) => simulate::run(a).map(|_| true),
        Command::Equilibrium(a) => equilibrium::run(a).map(|_| true),
        Command::Classify(a) => classify::run(a).map(|_| true),
        Command::Cloud(a) => cloud::run(a).map(|_| true),
        Command::Verify(a) => verify::run(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let f = Failure::usage(e.to_string().trim_end());
            eprintln!("{}", f.to_json());
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(2)
        }
    }
}
