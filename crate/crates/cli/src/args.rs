use std::path::PathBuf;

use butterfly_core::analysis::MONTE_CARLO_TOL;
use butterfly_core::report::{DEFAULT_SEED, DEFAULT_TRIALS};
use butterfly_core::{ChannelKind, ExponentMode, Strategy};
use clap::builder::{PossibleValuesParser, TypedValueParser};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "butterfly", version, about = "Classical vs quantum multicast rates in butterfly-block networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quantum bound and classical rates for one channel and grid shape
    Rate(RunArgs),
    /// Rates and gaps over a range of the noise parameter
    Sweep(RunArgs),
    /// Noise level where a classical rate meets the quantum bound
    Crossing(RunArgs),
    /// Monte Carlo estimate of an erasure routing strategy
    Simulate(RunArgs),
    /// Run the internal consistency checks
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyArg {
    Flood,
    Backup,
    Cc,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Flood => Strategy::FloodCoding,
            StrategyArg::Backup => Strategy::BackupNoCC,
            StrategyArg::Cc => Strategy::InterNodeCC,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

fn channel_parser() -> impl TypedValueParser<Value = ChannelKind> {
    PossibleValuesParser::new(["identity", "depolarizing", "erasure"]).map(|s| s.parse::<ChannelKind>().unwrap())
}

fn mode_parser() -> impl TypedValueParser<Value = ExponentMode> {
    PossibleValuesParser::new(["as-printed", "ny-corrected"]).map(|s| s.parse::<ExponentMode>().unwrap())
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, value_parser = channel_parser(), default_value = "erasure")]
    pub channel: ChannelKind,
    /// Noise parameter: p for depolarizing, epsilon for erasure
    #[arg(long, allow_negative_numbers = true)]
    pub param: Option<f64>,
    /// Parameter range for sweeps, as lo:hi:step
    #[arg(long, value_name = "LO:HI:STEP")]
    pub param_range: Option<String>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub ny: Option<usize>,
    /// Grid shape as NXxNY, e.g. 4x3
    #[arg(long, value_name = "NXxNY", value_parser = parse_grid)]
    pub grid: Option<(usize, usize)>,
    /// Comma-separated nx values (minimum-gap table or crossing grid)
    #[arg(long, value_delimiter = ',')]
    pub nx_list: Vec<usize>,
    /// Comma-separated ny values (crossing grid)
    #[arg(long, value_delimiter = ',')]
    pub ny_list: Vec<usize>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Cc)]
    pub strategy: StrategyArg,
    /// Use the inter-node assisted rate for crossings
    #[arg(long)]
    pub assisted: bool,
    /// Large-nx limits
    #[arg(long)]
    pub asymptotic: bool,
    /// Optimise one product input distribution for all receivers jointly
    #[arg(long)]
    pub joint_input: bool,
    #[arg(long, value_parser = mode_parser(), default_value = "ny-corrected")]
    pub exponent_mode: ExponentMode,
    /// Crossing search interval, as lo:hi
    #[arg(long, value_name = "LO:HI", default_value = "0.001:0.6")]
    pub bracket: String,
    /// Crossing tolerance
    #[arg(long, default_value_t = MONTE_CARLO_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output file; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Also write a gnuplot script plotting the CSV output
    #[arg(long, value_name = "PATH")]
    pub emit_plotscript: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Fast subset of the checks
    #[arg(long)]
    pub quick: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Offset added to one closed form before checking it
    #[arg(long, hide = true, allow_negative_numbers = true)]
    pub inject_fault: Option<f64>,
}

pub fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected NXxNY, got '{s}'"))?;
    let nx: usize = a.trim().parse().map_err(|_| format!("bad nx in '{s}'"))?;
    let ny: usize = b.trim().parse().map_err(|_| format!("bad ny in '{s}'"))?;
    if nx == 0 || ny == 0 {
        return Err(format!("grid dimensions must be >= 1, got '{s}'"));
    }
    Ok((nx, ny))
}

/// Splits `lo:hi:step` (or `lo:hi` when `parts == 2`).
pub fn parse_floats(s: &str, parts: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(':')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("bad number '{x}' in '{s}'")))
        .collect::<Result<_, _>>()?;
    if v.len() != parts {
        return Err(format!("expected {parts} ':'-separated numbers, got '{s}'"));
    }
    Ok(v)
}
