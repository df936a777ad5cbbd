//! `cpm`: command-line front end for the pcalabi library.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pcalabi::{Background, FlowKind, Method};

/// Exit status for command-line usage errors (sysexits `EX_USAGE`).
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(name = "cpm", version, about = "Combinatorial p-th Calabi flows for circle packings on closed surfaces")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a mesh file and print its combinatorics.
    Validate(ValidateArgs),
    /// Run one flow and write its trajectory.
    Flow(FlowArgs),
    /// Solve for the constant (Euclidean) or zero (hyperbolic) curvature packing with Newton's method.
    Solve(SolveArgs),
    /// Report curvatures and energies of one metric.
    Energy(EnergyArgs),
    /// Run a grid of flows over exponents and seeds, optionally in parallel.
    Sweep(SweepArgs),
    /// Write the bundled fixture meshes to a directory.
    Fixtures(FixturesArgs),
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Mesh file, or a fixture name looked up in $CPM_FIXTURES.
    pub mesh: PathBuf,
    /// Also decide the Euclidean existence condition by brute force.
    #[arg(long)]
    pub euclidean: bool,
    /// Largest vertex count for the brute-force check.
    #[arg(long, default_value_t = pcalabi::mesh::DEFAULT_ECON_CAP)]
    pub cap: usize,
}

/// Where the initial radii come from. Without a flag the command's default applies.
#[derive(Debug, Args, Clone)]
pub struct InitArgs {
    /// Radii file (`r <i> <radius>` per vertex).
    #[arg(long, conflicts_with_all = ["uniform", "random"])]
    pub radii: Option<PathBuf>,
    /// Every radius set to this value.
    #[arg(long, conflicts_with = "random")]
    pub uniform: Option<f64>,
    /// Radii drawn uniformly from [0.5, 2] using --seed.
    #[arg(long)]
    pub random: bool,
    /// Seed for randomized initial radii.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Clone)]
pub struct IntegratorArgs {
    /// euler, rk4 or rk45.
    #[arg(long, default_value = "rk45")]
    pub method: Method,
    /// Fixed step, or the initial step for rk45.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 1e3)]
    pub t_max: f64,
    /// Stop once max |K - K_target| falls below this.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Absolute local error tolerance for rk45.
    #[arg(long, default_value_t = 1e-10)]
    pub abs_tol: f64,
    /// Relative local error tolerance for rk45.
    #[arg(long, default_value_t = 1e-10)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_steps: usize,
    /// Keep every k-th accepted step in the trajectory.
    #[arg(long, default_value_t = 1)]
    pub sample_every: usize,
}

#[derive(Debug, Args, Clone)]
pub struct FlowOptions {
    /// p-calabi, p-calabi-normalized, ricci, ricci-normalized or graph-p-calabi.
    #[arg(long, default_value = "p-calabi")]
    pub flow: FlowKind,
    #[arg(long, default_value = "euclidean")]
    pub background: Background,
    /// Keep Euclidean p-Calabi initial radii as given instead of rescaling to unit product.
    #[arg(long)]
    pub no_normalize: bool,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    pub mesh: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[command(flatten)]
    pub options: FlowOptions,
    #[command(flatten)]
    pub init: InitArgs,
    /// Output directory for trajectory.csv, summary.json, manifest.json and final.radii.
    #[arg(long, default_value = "cpm-flow")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub mesh: PathBuf,
    #[arg(long, default_value = "euclidean")]
    pub background: Background,
    /// Stop once max |K - K_target| falls below this.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    /// Starting point: `uniform` (all radii 1), `random` (seeded) or a radii file.
    #[arg(long, default_value = "uniform")]
    pub init: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the report to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    pub mesh: PathBuf,
    #[arg(long, default_value = "euclidean")]
    pub background: Background,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[command(flatten)]
    pub init: InitArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub mesh: PathBuf,
    /// Comma-separated exponents.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub p: Vec<f64>,
    /// Number of random initial metrics per exponent, seeded from --seed upwards.
    #[arg(long, default_value_t = 1)]
    pub runs: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub options: FlowOptions,
    /// Worker threads for independent runs.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Output directory; every run writes into its own subdirectory.
    #[arg(long, default_value = "cpm-sweep")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FixturesArgs {
    /// Target directory (created if missing).
    #[arg(long, default_value = "fixtures")]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let argv: Vec<String> = std::env::args().collect();
    let result = match cli.command {
        Command::Validate(a) => commands::validate(&a),
        Command::Flow(a) => commands::flow(&a, &argv),
        Command::Solve(a) => commands::solve(&a),
        Command::Energy(a) => commands::energy(&a),
        Command::Sweep(a) => commands::sweep(&a, &argv),
        Command::Fixtures(a) => commands::fixtures(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
