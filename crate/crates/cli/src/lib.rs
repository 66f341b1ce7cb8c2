//! Command-line front end: synthetic benchmark generation, clustering,
//! evaluation and parameter sweeps.

pub mod commands;
pub mod error;
pub mod io;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "ssclust",
    version,
    about = "Semi-supervised clustering with noisy pairwise annotations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a spherical Gaussian mixture and noisy expert annotations.
    Generate(GenerateArgs),
    /// Fit the joint model with the hybrid genetic search.
    Cluster(ClusterArgs),
    /// Compare a clustering (and optionally its parameters) with ground truth.
    Evaluate(EvaluateArgs),
    /// Sweep expert accuracy and annotation count over synthetic datasets.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub d: usize,
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    /// Expert accuracy.
    #[arg(long, default_value_t = 0.9)]
    pub p: f64,
    /// Number of annotations [default: N].
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output prefix.
    #[arg(long, default_value = "ssclust")]
    pub out: PathBuf,
}

/// Search parameters shared by `cluster` and `benchmark`.
#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 10)]
    pub pi1: usize,
    #[arg(long, default_value_t = 20)]
    pub pi2: usize,
    #[arg(long, default_value_t = 500)]
    pub iters: usize,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write 0 instead of wall-clock milliseconds so reports are reproducible.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ClusterArgs {
    /// Feature file (CSV, one sample per line).
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub k: usize,
    /// Annotation file (`i j t` lines).
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    /// Enable priors for an expert of this accuracy.
    #[arg(long)]
    pub priors: Option<f64>,
    /// Ground-truth labels, to report NMI per repetition.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Ground-truth parameters, to report KL and CI per repetition.
    #[arg(long)]
    pub true_params: Option<PathBuf>,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long, default_value = "ssclust")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long, requires = "true_params")]
    pub pred_params: Option<PathBuf>,
    #[arg(long, requires = "pred_params")]
    pub true_params: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchmarkArgs {
    #[arg(long, default_value_t = 10)]
    pub datasets: usize,
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub d: usize,
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    /// Comma-separated expert accuracies.
    #[arg(long, default_value = "0.8,0.9,1.0", value_parser = parse_float_list)]
    pub p_list: FloatList,
    /// Comma-separated annotation counts as multiples of N.
    #[arg(long, default_value = "0,0.5,1,2,3,4", value_parser = parse_float_list)]
    pub m_list: FloatList,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Output CSV file [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloatList(pub Vec<f64>);

fn parse_float_list(s: &str) -> Result<FloatList, String> {
    let values = s
        .split(',')
        .map(|item| {
            let item = item.trim();
            item.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v >= 0.0)
                .ok_or_else(|| format!("{item:?} is not a non-negative number"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FloatList(values))
}

/// Runs one parsed command; output text goes to `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn std::io::Write) -> CliResult<()> {
    match cli.command {
        Command::Generate(args) => commands::generate(&args),
        Command::Cluster(args) => commands::cluster(&args, stdout),
        Command::Evaluate(args) => commands::evaluate(&args, stdout),
        Command::Benchmark(args) => commands::benchmark(&args, stdout),
    }
}
