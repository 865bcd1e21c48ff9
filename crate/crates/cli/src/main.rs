//! `discord`: geometric discord, dephasing trajectories, freezing checks and
//! region scans for two-qubit states.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::CliError;

#[derive(Debug, Parser)]
#[command(name = "discord", version, about = "Geometric quantum discord and its freezing under dephasing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the discord of a state with every evaluator.
    Gmqd(GmqdArgs),
    /// Evolve a state under Markovian or colored dephasing.
    Evolve(EvolveArgs),
    /// Check the freezing conditions of a state.
    Freeze(FreezeArgs),
    /// Scan the physical and freezing regions of Bell-diagonal parameters.
    Scan(ScanArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Write output here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Recorded in JSON output.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Re-verify closed forms against the singular-value route and abort on disagreement.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Clone, Args)]
pub struct StateSource {
    /// JSON state file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Inline JSON state.
    #[arg(long)]
    pub state: Option<String>,
    /// Bell-diagonal correlations `c1,c2,c3` (with optional --r, --s).
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
    pub c: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true, requires = "c")]
    pub r: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "c")]
    pub s: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct GmqdArgs {
    #[command(flatten)]
    pub source: StateSource,
    #[command(flatten)]
    pub common: Common,
    /// Also run the brute-force measurement oracle.
    #[arg(long)]
    pub oracle: bool,
    /// Polar grid points of the oracle search.
    #[arg(long, default_value_t = discord_core::gmqd::ORACLE_DEFAULT_STEPS)]
    pub oracle_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Channel {
    Markov,
    Colored,
}

#[derive(Debug, Clone, Args)]
pub struct ColoredArgs {
    /// Noise rate a (1/s).
    #[arg(long)]
    pub a: Option<f64>,
    /// Memory time tau (s).
    #[arg(long)]
    pub tau: Option<f64>,
    /// Noise axis: 1 bit flip, 2 bit-phase flip, 3 phase flip.
    #[arg(long, default_value_t = 3)]
    pub direction: usize,
    #[arg(long, default_value_t = 1.5)]
    pub nu_max: f64,
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    pub channel: Channel,
    #[command(flatten)]
    pub source: StateSource,
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 1001)]
    pub steps: usize,
    /// Largest dephasing strength of a Markovian sweep.
    #[arg(long, default_value_t = 1.0)]
    pub p_max: f64,
    #[command(flatten)]
    pub colored: ColoredArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FreezeArgs {
    #[command(flatten)]
    pub source: StateSource,
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub colored: ColoredArgs,
    /// Grid points of the colored-noise trajectory used for interval detection.
    #[arg(long, default_value_t = 15001)]
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axes {
    C2c3,
    C1c3,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub r: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub s: f64,
    #[arg(long, default_value_t = 201)]
    pub grid: usize,
    #[arg(long, value_enum, default_value = "c2c3")]
    pub axes: Axes,
    #[command(flatten)]
    pub common: Common,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = match &cli.command {
        Command::Gmqd(a) => a.common.workers,
        Command::Evolve(a) => a.common.workers,
        Command::Freeze(a) => a.common.workers,
        Command::Scan(a) => a.common.workers,
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(p) => p,
        Err(e) => return report(CliError::Io(format!("cannot start worker pool: {e}"))),
    };
    let result = pool.install(|| match &cli.command {
        Command::Gmqd(a) => commands::cmd_gmqd(a),
        Command::Evolve(a) => commands::cmd_evolve(a),
        Command::Freeze(a) => commands::cmd_freeze(a),
        Command::Scan(a) => commands::cmd_scan(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(e),
    }
}

fn report(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code())
}
