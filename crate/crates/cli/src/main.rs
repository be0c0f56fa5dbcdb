mod commands;
mod output;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CliError, Overrides};

#[derive(Parser, Debug)]
#[command(name = "disktree", version, about = "Gradient trees and the holomorphic disks converging to them")]
struct Cli {
    /// Scenario file (JSON)
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,

    /// Output file; CSV unless the name ends in .json
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Comma-separated epsilon schedule overriding the scenario file
    #[arg(long, global = true, value_delimiter = ',')]
    eps: Option<Vec<f64>>,

    /// Disk radius delta in (0, 1/2)
    #[arg(long, global = true)]
    delta: Option<f64>,

    /// Samples per grid axis
    #[arg(long, global = true)]
    grid: Option<usize>,

    /// Comma-separated region names to keep (e.g. complement,ext_e1)
    #[arg(long, global = true, value_delimiter = ',')]
    regions: Option<Vec<String>>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Polygon type, table row, tree type and critical points
    Classify,
    /// Gradient tree as JSON
    Tree,
    /// Evaluate the disk map at a point of the upper half plane (frame coordinates)
    MapEval {
        /// Point as RE,IM
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Accessory parameter z4 along the epsilon schedule
    SolveZ4,
    /// Sup-norm errors and bounds per region along the epsilon schedule
    Converge,
    /// Analytic error bounds per region along the epsilon schedule
    Bounds,
    /// Built-in consistency checks
    Selftest {
        /// Run only checks whose name contains this string
        #[arg(long)]
        only: Option<String>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let ov = Overrides { eps: cli.eps, delta: cli.delta, grid: cli.grid, regions: cli.regions };
    let out = cli.out.as_deref();
    match cli.command {
        Command::Selftest { only } => selftest::run(only.as_deref()),
        cmd => {
            let path = cli.scenario.ok_or_else(|| CliError::Parse("--scenario is required".into()))?;
            let file = commands::load(&path, &ov)?;
            match cmd {
                Command::Classify => commands::classify(&file, out),
                Command::Tree => commands::tree(&file, out),
                Command::MapEval { z } => commands::map_eval(&file, &z, out),
                Command::SolveZ4 => commands::solve_z4(&file, out),
                Command::Converge => commands::converge(&file, &ov, out),
                Command::Bounds => commands::bounds(&file, &ov, out),
                Command::Selftest { .. } => unreachable!(),
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DISKTREE_LOG", "warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
