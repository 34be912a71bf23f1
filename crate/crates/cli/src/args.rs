use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "eeg-lstm",
    version,
    about = "LSTM seizure classifiers for single-channel EEG"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cross-validated training on one pair of sets.
    Train(TrainArgs),
    /// Score a checkpoint on every sample of a dataset.
    Evaluate(EvaluateArgs),
    /// Train all six reference pairings and write one results table.
    Reproduce(ReproduceArgs),
    /// Export a synthetic pair in the Bonn file layout.
    GenSynth(GenSynthArgs),
    /// Compare analytic gradients with central finite differences.
    Gradcheck(GradcheckArgs),
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Pair of sets, e.g. A,E. The second set is the positive class.
    #[arg(long)]
    pub pair: Option<String>,

    /// Root directory holding one sub-directory per set.
    #[arg(long)]
    pub data: Option<PathBuf>,

    /// Use generated data instead of files: `default` or key=value overrides
    /// such as `f0=2,f1=10,noise=0.1,len=128`.
    #[arg(long, num_args = 0..=1, default_missing_value = "default", value_name = "SPEC")]
    pub synthetic: Option<String>,

    /// Truncate every sequence to this many samples. Defaults to the full
    /// file length (4097) or the synthetic spec's `len`.
    #[arg(long)]
    pub seq_len: Option<usize>,

    /// Z-score each sequence before use.
    #[arg(long)]
    pub standardize: bool,
}

#[derive(Debug, Args)]
pub struct TrainingArgs {
    #[arg(long, default_value_t = 10)]
    pub folds: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value_t = 20)]
    pub epochs: usize,

    #[arg(long, default_value_t = 4)]
    pub batch: usize,

    #[arg(long, default_value_t = 1e-3)]
    pub lr: f64,

    /// Width of the top LSTM layer; Model 2's first layer is twice as wide.
    #[arg(long, default_value_t = 64)]
    pub hidden: usize,

    /// Folds trained in parallel.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,

    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub source: SourceArgs,

    #[command(flatten)]
    pub training: TrainingArgs,

    /// 1: LSTM(64). 2: LSTM(128), LSTM(64) with dropout.
    #[arg(long, default_value = "1")]
    pub model: String,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// Root directory holding the five set directories.
    #[arg(long)]
    pub data: Option<PathBuf>,

    #[arg(long)]
    pub seq_len: Option<usize>,

    #[arg(long)]
    pub standardize: bool,

    #[command(flatten)]
    pub training: TrainingArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,

    #[command(flatten)]
    pub source: SourceArgs,

    /// Reject the checkpoint unless it holds this variant.
    #[arg(long)]
    pub model: Option<String>,

    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,

    /// Also write the report as JSON to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenSynthArgs {
    #[arg(long, num_args = 0..=1, default_missing_value = "default", default_value = "default", value_name = "SPEC")]
    pub synthetic: String,

    /// Set letters the two classes are written as.
    #[arg(long, default_value = "A,E")]
    pub pair: String,

    /// Values are multiplied by this factor before rounding to integers.
    #[arg(long, default_value_t = 100.0)]
    pub scale: f64,

    #[arg(long, default_value = "synthetic")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    /// Run a single case of this width instead of the default suite.
    #[arg(long)]
    pub hidden: Option<usize>,

    /// Sequence length of the single case.
    #[arg(long)]
    pub steps: Option<usize>,

    /// Restrict the single case to one variant; both run otherwise.
    #[arg(long)]
    pub model: Option<String>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, hide = true)]
    pub perturb_backward: bool,
}
