//! `lrsda`: construct and verify low-redundancy sum-and-difference arrays,
//! enumerate their extended co-arrays, and run seeded DOA experiments.
//!
//! Exit codes: 0 on success (scientific mismatches are findings, not
//! failures), 2 on usage errors, 3 on internal failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

use output::Format;

#[derive(Parser)]
#[command(
    name = "lrsda",
    version,
    about = "Low-redundancy sum/difference arrays: geometry, co-array verification, DOA simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand an array geometry and verify its co-array extent
    Geometry(GeometryArgs),
    /// Weight function and hole structure of an array's extended co-array
    Coarray(CoarrayArgs),
    /// Claimed-vs-verified DOF table with a discrepancy report
    DofTable(TableArgs),
    /// Enumerated redundancy of the best geometry per sensor count
    RedundancySweep(RedundancySweepArgs),
    /// One seeded snapshot simulation with its spatial spectrum
    DoaSim(DoaSimArgs),
    /// Monte-Carlo RMSE sweep over SNR, snapshots, or source count
    RmseSweep(RmseSweepArgs),
    /// Exact reconstruction-condition report (JSON)
    Reconstruction(ReconstructionArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ArrayKind {
    LrSda,
    Custom,
}

#[derive(Args, Debug, Clone)]
struct ArraySelection {
    /// Array family to build
    #[arg(long, value_enum, default_value_t = ArrayKind::LrSda)]
    array: ArrayKind,
    /// Total sensor count; picks the best closed-form split by enumeration
    #[arg(long, conflicts_with_all = ["n1", "n2"])]
    n: Option<u32>,
    /// Sensors in sub-array 1
    #[arg(long, requires = "n2")]
    n1: Option<u32>,
    /// Sensors in sub-arrays 2 and 3 together
    #[arg(long, requires = "n1")]
    n2: Option<u32>,
    /// Sensors in sub-array 3 (default: ceil(n2/2) - 1)
    #[arg(long)]
    eta: Option<u32>,
    /// Right shift of the whole geometry (default: best by enumeration)
    #[arg(long)]
    delta: Option<u32>,
    /// Comma-separated positions in units of d (for --array custom)
    #[arg(long, value_delimiter = ',')]
    positions: Option<Vec<i64>>,
}

#[derive(Args, Debug, Clone)]
struct OutputOptions {
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (csv for tables, json for reconstruction reports)
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug)]
struct GeometryArgs {
    #[command(flatten)]
    selection: ArraySelection,
    #[command(flatten)]
    output: OutputOptions,
}

#[derive(Args, Debug)]
struct CoarrayArgs {
    #[command(flatten)]
    selection: ArraySelection,
    #[command(flatten)]
    output: OutputOptions,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[command(flatten)]
    output: OutputOptions,
}

#[derive(Args, Debug)]
struct RedundancySweepArgs {
    /// Smallest sensor count
    #[arg(long, default_value_t = 2)]
    n_min: u32,
    /// Largest sensor count
    #[arg(long, default_value_t = 30)]
    n_max: u32,
    #[command(flatten)]
    output: OutputOptions,
}

#[derive(Args, Debug)]
struct DoaSimArgs {
    #[command(flatten)]
    selection: ArraySelection,
    #[command(flatten)]
    output: OutputOptions,
    /// JSON experiment description; command-line flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of sources, placed uniformly over [-60, 60] degrees
    #[arg(long)]
    sources: Option<usize>,
    /// Explicit source angles in degrees (overrides --sources)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    angles: Option<Vec<f64>>,
    /// SNR in dB
    #[arg(long, allow_negative_numbers = true)]
    snr: Option<f64>,
    /// Snapshot count
    #[arg(long)]
    snapshots: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Spectrum grid step in degrees
    #[arg(long)]
    grid_step: Option<f64>,
    /// Per-source power
    #[arg(long)]
    power: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
enum SweepKind {
    Snr,
    Snapshots,
    Sources,
}

#[derive(Args, Debug)]
struct RmseSweepArgs {
    #[command(flatten)]
    selection: ArraySelection,
    #[command(flatten)]
    output: OutputOptions,
    /// JSON experiment description; command-line flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Swept quantity
    #[arg(long, value_enum)]
    sweep: Option<SweepKind>,
    /// Sweep axis values (comma separated)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    values: Option<Vec<f64>>,
    /// Number of sources for SNR/snapshot sweeps
    #[arg(long)]
    sources: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    snr: Option<f64>,
    #[arg(long)]
    snapshots: Option<usize>,
    /// Independent trials per sweep point
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    grid_step: Option<f64>,
    #[arg(long)]
    power: Option<f64>,
}

#[derive(Args, Debug)]
struct ReconstructionArgs {
    #[command(flatten)]
    selection: ArraySelection,
    #[command(flatten)]
    output: OutputOptions,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Geometry(args) => commands::geometry(args),
        Command::Coarray(args) => commands::coarray(args),
        Command::DofTable(args) => commands::dof_table(args),
        Command::RedundancySweep(args) => commands::redundancy_sweep(args),
        Command::DoaSim(args) => commands::doa_sim(args),
        Command::RmseSweep(args) => commands::rmse_sweep(args),
        Command::Reconstruction(args) => commands::reconstruction(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
