//! `monoplane`: train Minimerror perceptrons, grow Monoplane networks,
//! verify the published sonar separators and render artifacts.
//!
//! Exit codes: 0 success, 1 verification mismatch or growth stall,
//! 2 usage or I/O error.

mod render;
mod run;
mod setup;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use monoplane::data::ScaleMode;
use monoplane::report::Format;

#[derive(Parser, Debug)]
#[command(
    name = "monoplane",
    version,
    about = "Minimerror perceptrons and Monoplane networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train a single perceptron with Minimerror and evaluate it on the held-out part.
    Train(TrainArgs),
    /// Grow a Monoplane network until the learning set is classified without error.
    Grow(GrowArgs),
    /// Check the published separators under every standardization mode.
    Verify(VerifyArgs),
    /// Render weight, network, trace or report artifacts.
    Report(ReportArgs),
}

/// Which part of the split is learned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PartArg {
    Train,
    Test,
    All,
}

impl PartArg {
    pub fn name(self) -> &'static str {
        match self {
            PartArg::Train => "train",
            PartArg::Test => "test",
            PartArg::All => "all",
        }
    }
}

/// Where standardization statistics come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StatsFrom {
    /// The learning set only.
    Part,
    /// Every pattern of the dataset.
    All,
}

#[derive(Args, Debug, Clone)]
pub struct DataArgs {
    /// Comma-separated dataset, one `v1,...,vN,R|M` pattern per line.
    #[arg(long, env = "MONOPLANE_DATA")]
    pub dataset: PathBuf,
    /// `[train]` / `[test]` index file; defaults to first half / second half.
    #[arg(long)]
    pub split_file: Option<PathBuf>,
    /// Label mines +1 and rocks -1.
    #[arg(long)]
    pub flip_labels: bool,
}

#[derive(Args, Debug, Clone)]
pub struct LearnArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Part to learn; repeat to run several experiments.
    #[arg(long, value_enum, default_value = "train")]
    pub part: Vec<PartArg>,
    #[arg(long, default_value = "std")]
    pub scale: ScaleMode,
    #[arg(long, value_enum, default_value = "part")]
    pub stats_from: StatsFrom,
    /// `key = value` training configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the configuration seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "json")]
    pub format: Format,
    /// Experiments run concurrently on this many threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Output directory; one subdirectory per part when several are given.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct TrainArgs {
    #[command(flatten)]
    pub learn: LearnArgs,
}

#[derive(Args, Debug, Clone)]
pub struct GrowArgs {
    #[command(flatten)]
    pub learn: LearnArgs,
    /// Stop with a growth-stall diagnostic beyond this many hidden units.
    #[arg(long)]
    pub max_hidden: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value = "text")]
    pub format: Format,
    /// Standardization modes are checked on this many threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Show the raw `a.b/(N+1)^2` cosine next to the published values.
    #[arg(long)]
    pub raw_eq8: bool,
    /// Output directory for the report and manifest; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct ReportArgs {
    /// Artifacts to render: one weight, network, trace or JSON report file,
    /// or two weight files for their cosine.
    #[arg(required = true, num_args = 1..=2)]
    pub inputs: Vec<PathBuf>,
    /// Defaults to the natural layout of the artifact.
    #[arg(long)]
    pub format: Option<Format>,
    /// Use `a.b/(N+1)^2` for the cosine of two weight files.
    #[arg(long)]
    pub raw_eq8: bool,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// How a successful invocation ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// Verification mismatch or growth stall.
    Mismatch,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(args) => run::train(&args),
        Command::Grow(args) => run::grow(&args),
        Command::Verify(args) => verify::verify(&args),
        Command::Report(args) => render::report(&args),
    };
    match result {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Mismatch) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
