//! Command-line front end for `rsajam`.

mod commands;
pub mod error;
pub mod svg;
pub mod table;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rsajam::ModelKind;

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "rsajam",
    version,
    about = "Random sequential adsorption on Erdős–Rényi graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo ensembles of the counts chain (or the direct process)
    Simulate(SimulateArgs),
    /// Integrate the fluid limit
    Fluid(FluidArgs),
    /// Sup-norm distance between a simulation and the fluid limit
    Compare(CompareArgs),
    /// Mean degree at which two tetris heights have equal density
    Crossing(CrossingArgs),
    /// Coupling and conditional-mean self-checks
    Validate(ValidateArgs),
    /// Sample one graph, run a model on it and dump edges and labels
    Sample(SampleArgs),
}

/// `lo:hi:step`, inclusive of `hi` up to rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CRange {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl CRange {
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.lo + i as f64 * self.step).collect()
    }
}

impl FromStr for CRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, step] = parts.as_slice() else {
            return Err(format!("expected lo:hi:step, got {s:?}"));
        };
        let num = |x: &str| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| format!("not a number: {x:?}"))
        };
        let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
        if !step.is_finite() || step <= 0.0 {
            return Err("range step must be positive".into());
        }
        if !lo.is_finite() || !hi.is_finite() || hi < lo {
            return Err(format!("empty range {lo}:{hi}"));
        }
        Ok(CRange { lo, hi, step })
    }
}

/// `a:b` with `a ≤ b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket(pub f64, pub f64);

impl FromStr for Bracket {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
        let num = |x: &str| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| format!("not a number: {x:?}"))
        };
        Ok(Bracket(num(a)?, num(b)?))
    }
}

/// Two comma-separated class indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassPair(pub usize, pub usize);

impl FromStr for ClassPair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| format!("expected i,j, got {s:?}"))?;
        let num = |x: &str| {
            x.trim()
                .parse::<usize>()
                .map_err(|_| format!("not a class index: {x:?}"))
        };
        Ok(ClassPair(num(a)?, num(b)?))
    }
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    s.parse::<ModelKind>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimMode {
    Counts,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RunMode {
    Direct,
    Coupled,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct DegreeArgs {
    /// Mean degree
    #[arg(long)]
    pub c: Option<f64>,
    /// Sweep of mean degrees, `lo:hi:step`
    #[arg(long = "c-range")]
    pub c_range: Option<CRange>,
}

impl DegreeArgs {
    pub fn values(&self) -> Vec<f64> {
        match (self.c, self.c_range) {
            (Some(c), _) => vec![c],
            (None, Some(r)) => r.values(),
            (None, None) => Vec::new(),
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file (standard output if absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Also write an SVG plot here
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_parser = parse_model)]
    pub model: ModelKind,
    #[arg(long = "K")]
    pub k: usize,
    #[command(flatten)]
    pub degree: DegreeArgs,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of time-grid points on [0, 1]
    #[arg(long, default_value_t = rsajam::grid::DEFAULT_GRID_POINTS)]
    pub grid: usize,
    #[arg(long, value_enum, default_value_t = SimMode::Counts)]
    pub mode: SimMode,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct FluidArgs {
    #[arg(long, value_parser = parse_model)]
    pub model: ModelKind,
    #[arg(long = "K")]
    pub k: usize,
    #[command(flatten)]
    pub degree: DegreeArgs,
    #[arg(long, default_value_t = rsajam::grid::DEFAULT_GRID_POINTS)]
    pub grid: usize,
    /// RK4 step
    #[arg(long, default_value_t = rsajam::fluid::DEFAULT_STEP)]
    pub step: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, value_parser = parse_model)]
    pub model: Option<ModelKind>,
    #[arg(long = "K")]
    pub k: Option<usize>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = rsajam::grid::DEFAULT_GRID_POINTS)]
    pub grid: usize,
    #[arg(long, default_value_t = rsajam::fluid::DEFAULT_STEP)]
    pub step: f64,
    /// Largest acceptable sup-norm deviation
    #[arg(long, default_value_t = 0.01)]
    pub tol: f64,
    /// Simulation CSV to read instead of simulating
    #[arg(long = "sim-csv")]
    pub sim_csv: Option<PathBuf>,
    /// Fluid CSV to read instead of integrating
    #[arg(long = "fluid-csv")]
    pub fluid_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CrossingArgs {
    #[arg(long = "K", default_value_t = 2)]
    pub k: usize,
    /// Heights to compare, `i,j`
    #[arg(long, default_value = "1,2")]
    pub classes: ClassPair,
    /// Search interval for c, `lo:hi`
    #[arg(long, default_value = "1:10")]
    pub bracket: Bracket,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long, default_value_t = rsajam::fluid::DEFAULT_STEP)]
    pub step: f64,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Coupling trials per model
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Read exploration edges from the wrong keys (the sweep must then fail)
    #[arg(long = "corrupt-edge-keys")]
    pub corrupt_edge_keys: bool,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, value_parser = parse_model)]
    pub model: ModelKind,
    #[arg(long = "K")]
    pub k: usize,
    #[arg(long)]
    pub c: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Replication index within the seed
    #[arg(long, default_value_t = 0)]
    pub rep: u64,
    #[arg(long, value_enum, default_value_t = RunMode::Direct)]
    pub mode: RunMode,
    /// Edge list output, `i j` per line (1-based)
    #[arg(long)]
    pub edges: Option<PathBuf>,
    /// Label output, `vertex label` per line (1-based)
    #[arg(long)]
    pub labels: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    match run(cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Simulate(a) => commands::simulate(&a, out),
        Command::Fluid(a) => commands::fluid(&a, out),
        Command::Compare(a) => commands::compare(&a, out),
        Command::Crossing(a) => commands::crossing(&a, out),
        Command::Validate(a) => commands::validate(&a, out, err),
        Command::Sample(a) => commands::sample(&a, out),
    }
}

/// Thread cap from `RSAJAM_THREADS`, if set.
pub fn thread_cap(value: Option<&str>) -> CliResult<Option<usize>> {
    match value {
        None => Ok(None),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!(
                "RSAJAM_THREADS must be a positive integer, got {v:?}"
            ))),
        },
    }
}
