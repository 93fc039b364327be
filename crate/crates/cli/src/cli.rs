use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use pathdev::devlayer::OutputMode;
use pathdev::liealg::Family;

#[derive(Debug, Parser)]
#[command(name = "pathdev", version, about = "Path development layers on matrix Lie groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Develop each input series into the chosen matrix group.
    Develop(DevelopArgs),
    /// Truncated signatures of each input series.
    Signature(SignatureArgs),
    /// Compare backward-pass gradients with central finite differences.
    Gradcheck(GradcheckArgs),
    /// Train a model from a JSON run config.
    Train(TrainArgs),
    /// Evaluate a saved model on labelled series.
    Eval(EvalArgs),
    /// Time forward and backward passes over a ladder of series lengths.
    Bench(BenchArgs),
    /// Check that matrices produced by `develop` lie in their group.
    CheckGroup(CheckGroupArgs),
    /// Write a synthetic dataset as series and target CSVs.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
pub struct DevelopArgs {
    /// Time-series CSV (`-` for stdin).
    #[arg(long)]
    pub input: PathBuf,
    /// Algebra family (GL, SO, SE2, SP, LORENTZ); taken from the weights file if omitted.
    #[arg(long)]
    pub algebra: Option<Family>,
    /// Matrix order m.
    #[arg(long)]
    pub order: Option<usize>,
    /// JSON weights file.
    #[arg(long, conflicts_with = "seed")]
    pub weights: Option<PathBuf>,
    /// Seed for randomly initialised weights.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Standard deviation multiplier for random weights.
    #[arg(long, default_value_t = 1.0)]
    pub init_scale: f64,
    /// Emit every state (`seq`) or only the final one (`last`).
    #[arg(long, default_value = "last")]
    pub mode: OutputMode,
    /// Prepend the time channel.
    #[arg(long)]
    pub add_time: bool,
    /// Output file (default stdout).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write JSON instead of CSV.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SignatureArgs {
    /// Time-series CSV (`-` for stdin).
    #[arg(long)]
    pub input: PathBuf,
    /// Truncation depth K.
    #[arg(long)]
    pub depth: usize,
    /// Include the constant level-0 term.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub include_constant: bool,
    /// Prepend the time channel.
    #[arg(long)]
    pub add_time: bool,
    /// Output file (default stdout).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write JSON lines instead of CSV.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    /// Restrict to one family (default: all families).
    #[arg(long)]
    pub algebra: Option<Family>,
    /// Matrix order; needs --algebra.
    #[arg(long, requires = "algebra")]
    pub order: Option<usize>,
    /// Input channels.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Increments per path.
    #[arg(long, default_value_t = 10)]
    pub len: usize,
    /// Random cases per family, alternating sequence and last-state losses.
    #[arg(long, default_value_t = 6)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relative error above which the check fails.
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    /// Print machine-readable JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// JSON run config.
    #[arg(long)]
    pub config: PathBuf,
    /// Override the config's output directory.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Print per-epoch progress to stderr.
    #[arg(long)]
    pub verbose: bool,
    /// Print machine-readable JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Model file written by `train`.
    #[arg(long)]
    pub model: PathBuf,
    /// Time-series CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// Targets CSV.
    #[arg(long)]
    pub targets: PathBuf,
    /// Print machine-readable JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value = "SO")]
    pub algebra: Family,
    #[arg(long, default_value_t = 4)]
    pub order: usize,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Longest series length; shorter lengths halve down from here.
    #[arg(long, default_value_t = 1024)]
    pub len: usize,
    /// Series per timing.
    #[arg(long, default_value_t = 16)]
    pub batch: usize,
    /// Timings per length; the minimum is reported.
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Print machine-readable JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CheckGroupArgs {
    /// CSV written by `develop` (`-` for stdin).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub algebra: Family,
    /// Defaults to the order implied by the CSV columns.
    #[arg(long)]
    pub order: Option<usize>,
    /// Bound on the defining-relation residual relative to max(1, ‖Z‖²).
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Print machine-readable JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(subcommand)]
    pub kind: GenerateKind,
}

#[derive(Debug, Subcommand)]
pub enum GenerateKind {
    /// Planar arcs labelled by turning direction.
    Rotation {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.05)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: GenerateOutput,
    },
    /// Points under constant rigid motion, targeting a future position.
    RigidMotion {
        #[arg(long)]
        n: usize,
        /// Steps ahead to predict.
        #[arg(long, default_value_t = 5)]
        horizon: usize,
        #[arg(long, default_value_t = 0.01)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: GenerateOutput,
    },
}

#[derive(Debug, Args)]
pub struct GenerateOutput {
    /// Series CSV to write.
    #[arg(long)]
    pub output: PathBuf,
    /// Targets CSV to write.
    #[arg(long)]
    pub targets: PathBuf,
}
