use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

use config::{CliResult, FileConfig, Formats};

/// Complex quantum trajectories, extended probability densities and their checks.
#[derive(Debug, Parser)]
#[command(name = "qtraj", version)]
struct Cli {
    /// JSON file with default settings; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Output {
    /// Output directory (created if missing).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated subset of csv,json,svg.
    #[arg(long, value_delimiter = ',')]
    format: Option<Vec<String>>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate trajectories from seeds or Cassinian invariants.
    Trajectory {
        /// sho:n, free:k, packet:x0,k0,sigma0 or step:E,V0
        #[arg(long)]
        state: Option<String>,
        /// Starting point a+bi (repeatable).
        #[arg(long = "seed", allow_hyphen_values = true)]
        seeds: Vec<String>,
        /// Values of |1 - x²| for first-excited-state orbits.
        #[arg(long, value_delimiter = ',')]
        cassinian_b: Vec<f64>,
        /// Integrate to this time instead of until the path closes.
        #[arg(long, allow_hyphen_values = true)]
        t_end: Option<f64>,
        #[arg(long)]
        rel_tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Combined extended density on a grid over the complex plane.
    Density {
        #[arg(long)]
        state: Option<String>,
        /// re_min:re_max:cells,im_min:im_max:cells
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[arg(long)]
        rel_tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Born density from the velocity field on a real range.
    Born {
        #[arg(long)]
        state: Option<String>,
        /// min:max:points
        #[arg(long, allow_hyphen_values = true)]
        range: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Physical size of the separatrix for a given mass and frequency.
    Classical {
        /// Mass in kg.
        #[arg(long, allow_hyphen_values = true)]
        mass: Option<f64>,
        /// Angular frequency in 1/s.
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<f64>,
        /// Use the electron mass.
        #[arg(long)]
        electron: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run verification suites; exits 1 if any fails.
    Verify {
        /// Comma-separated suite names (default: all).
        #[arg(long = "suite", value_delimiter = ',')]
        suites: Vec<String>,
        /// Replace every upper-bound tolerance with this value.
        #[arg(long)]
        tol: Option<f64>,
        /// Write the JSON report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn or_vec<T>(flag: Vec<T>, file: Option<Vec<T>>) -> Vec<T> {
    if flag.is_empty() {
        file.unwrap_or_default()
    } else {
        flag
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let rel_tol = |flag: Option<f64>| config::positive("--rel-tol", flag.or(file.rel_tol).unwrap_or(1e-9));
    match cli.command {
        Command::Trajectory { state, seeds, cassinian_b, t_end, rel_tol: tol, output } => commands::trajectory(commands::TrajectoryArgs {
            state: state.or(file.state.clone()),
            seeds: or_vec(seeds, file.seeds.clone()),
            cassinian_b: or_vec(cassinian_b, file.cassinian_b.clone()),
            t_end: t_end.or(file.t_end),
            rel_tol: rel_tol(tol)?,
            out: output.out.or(file.out.clone()),
            formats: Formats::parse(output.format.or(file.formats.clone()))?,
        }),
        Command::Density { state, grid, rel_tol: tol, output } => commands::density(commands::DensityArgs {
            state: state.or(file.state.clone()),
            grid: grid.or(file.grid.clone()),
            rel_tol: config::positive("--rel-tol", tol.or(file.rel_tol).unwrap_or(1e-8))?,
            out: output.out.or(file.out.clone()),
            formats: Formats::parse(output.format.or(file.formats.clone()))?,
        }),
        Command::Born { state, range, output } => commands::born(commands::BornArgs {
            state: state.or(file.state.clone()),
            range: range.or(file.range.clone()),
            out: output.out.or(file.out.clone()),
            formats: Formats::parse(output.format.or(file.formats.clone()))?,
        }),
        Command::Classical { mass, omega, electron, out } => commands::classical(commands::ClassicalArgs {
            mass: mass.or(file.mass),
            omega: omega.or(file.omega),
            electron: electron || file.electron.unwrap_or(false),
            out: out.or(file.out.clone()),
        }),
        Command::Verify { suites, tol, out } => commands::run_verify(commands::VerifyArgs {
            suites: or_vec(suites, file.suites.clone()),
            tol: tol.or(file.tol),
            out,
        }),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code)
        }
    }
}
