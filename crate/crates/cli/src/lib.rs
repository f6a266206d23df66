//! The `mobinfer` command line: ingestion, configuration and report emission
//! around `mobinfer-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod ingest;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{CommonArgs, RunConfig};
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "mobinfer", version, about = "Stay/travel inference on sparse trajectories")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Label every record S, T or U with SDS
    Label(IoArgs),
    /// Exact discrete labels (S or T) for short trajectories
    Oracle(OracleArgs),
    /// Sparsity profile of a dataset, written as four CSV files
    Stats(StatsArgs),
    /// Generate a labeled CTRW dataset
    Simulate(SimulateArgs),
    /// Keep each record with a fixed probability
    Resample(ResampleArgs),
    /// Score predicted labels against ground truth
    Evaluate(EvaluateArgs),
    /// Neighbor-bracketing violation rate over a parameter grid
    Prop1(Prop1Args),
    /// Per-trajectory stay and travel recall lower bounds
    Bounds(IoArgs),
    /// Train and apply the voting or HMM baseline
    Baseline(BaselineArgs),
    /// Precision/recall of SDS under re-sampling on simulated data
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct IoArgs {
    /// Input CSV with columns time, lon, lat, mid
    #[arg(long)]
    pub input: PathBuf,
    /// Output file [default: stdout]
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// Longest trajectory accepted
    #[arg(long, default_value_t = mobinfer_core::oracle::DEFAULT_ORACLE_LIMIT)]
    pub limit: usize,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Directory receiving summary.csv, global_sparsity.csv, local_coverage.csv and by_sparsity.csv
    #[arg(long)]
    pub output_dir: PathBuf,
    /// Temporal thresholds for the coverage histograms, in seconds
    #[arg(long, value_delimiter = ',', default_value = "1800")]
    pub coverage_delta_t: Vec<i64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// Simulation model settings.
#[derive(Debug, Clone, Args)]
pub struct SimArgs {
    #[arg(long, default_value_t = 100)]
    pub trajectories: usize,
    /// Scheduled observations per trajectory
    #[arg(long, default_value_t = 200)]
    pub records: usize,
    /// Observe only during stays
    #[arg(long)]
    pub stay_only: bool,
    #[arg(long, default_value_t = 250.0)]
    pub jitter: f64,
    #[arg(long, default_value_t = 1.8)]
    pub wait_exponent: f64,
    #[arg(long, default_value_t = 1800.0)]
    pub wait_min: f64,
    #[arg(long, default_value_t = 86_400.0)]
    pub wait_max: f64,
    #[arg(long, default_value_t = 1.75)]
    pub jump_exponent: f64,
    #[arg(long, default_value_t = 1600.0)]
    pub jump_min: f64,
    #[arg(long, default_value_t = 50_000.0)]
    pub jump_max: f64,
    /// Travel speed in m/s
    #[arg(long, default_value_t = 10.0)]
    pub speed: f64,
    #[arg(long, default_value_t = 1.5)]
    pub interval_exponent: f64,
    #[arg(long, default_value_t = 60.0)]
    pub interval_min: f64,
    #[arg(long, default_value_t = 86_400.0)]
    pub interval_max: f64,
    /// Ground-truth window grid step in seconds, in (0, 1]
    #[arg(long, default_value_t = 1.0)]
    pub resolution: f64,
    #[arg(long, default_value_t = 116.4, allow_negative_numbers = true)]
    pub origin_lon: f64,
    #[arg(long, default_value_t = 39.9, allow_negative_numbers = true)]
    pub origin_lat: f64,
    /// Epoch seconds of simulation time 0
    #[arg(long, default_value_t = 1_468_166_400)]
    pub epoch: i64,
    /// Allow waits, jumps and jitter outside the truncation bounds
    #[arg(long)]
    pub no_truncation: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub sim: SimArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct ResampleArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// Probability of keeping each record
    #[arg(long)]
    pub rate: f64,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Predicted labels (columns mid, time, label)
    #[arg(long)]
    pub predicted: PathBuf,
    /// Ground-truth labels (columns mid, time, label)
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct Prop1Args {
    #[command(flatten)]
    pub io: IoArgs,
    /// Spatial thresholds to test [default: --delta-s]
    #[arg(long, value_delimiter = ',')]
    pub delta_s_grid: Vec<f64>,
    /// Temporal thresholds to test [default: --delta-t]
    #[arg(long, value_delimiter = ',')]
    pub delta_t_grid: Vec<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Voting,
    Hmm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeekStartArg {
    Sunday,
    Monday,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    pub method: Method,
    /// Labeled training dataset (label column S/T; U rows are ignored)
    #[arg(long, required_unless_present = "model_in")]
    pub train: Option<PathBuf>,
    /// Load a saved model instead of training
    #[arg(long, conflicts_with = "train")]
    pub model_in: Option<PathBuf>,
    /// Save the model
    #[arg(long)]
    pub model_out: Option<PathBuf>,
    /// Dataset to label
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// First day of the week for hour indices
    #[arg(long, value_enum, default_value_t = WeekStartArg::Sunday)]
    pub week_start: WeekStartArg,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Re-sampling rates in (0, 1]
    #[arg(long, value_delimiter = ',', default_value = "1.0,0.9,0.8,0.7,0.6,0.5,0.4,0.3,0.2,0.1")]
    pub rates: Vec<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub sim: SimArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

impl Command {
    fn common(&self) -> &CommonArgs {
        match self {
            Command::Label(a) | Command::Bounds(a) => &a.common,
            Command::Oracle(a) => &a.io.common,
            Command::Stats(a) => &a.common,
            Command::Simulate(a) => &a.common,
            Command::Resample(a) => &a.io.common,
            Command::Evaluate(a) => &a.common,
            Command::Prop1(a) => &a.io.common,
            Command::Baseline(a) => &a.common,
            Command::Experiment(a) => &a.common,
        }
    }
}

/// Parse `args` (including the program name), run the command and return the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = stdout.write_all(text.as_bytes());
                0
            } else {
                let _ = stderr.write_all(text.as_bytes());
                1
            };
        }
    };
    match execute(&cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: &Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let cfg = RunConfig::resolve(command.common())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} workers: {e}", cfg.workers)))?;
    let mut out = Vec::new();
    let mut err = Vec::new();
    let res = pool.install(|| commands::dispatch(command, &cfg, &mut out, &mut err));
    stderr.write_all(&err)?;
    stdout.write_all(&out)?;
    stdout.flush()?;
    res
}
