use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use swarmnet::benchmarks::BenchFunction;
use swarmnet::data::DatasetKind;
use swarmnet::pso::CoefficientDraw;
use swarmnet::{OptimizerKind, Scenario};

/// Train small feed-forward classifiers with PSO, MTO and MTOCL on the
/// Wisconsin breast-cancer datasets.
#[derive(Debug, Parser)]
#[command(name = "swarmnet", version)]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    pub verbose: u8,

    /// TOML file with matrix settings; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Directory holding the UCI data files.
    #[arg(long, global = true, env = "SWARMNET_DATA_DIR", default_value = "data")]
    pub data_dir: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Clean and normalize one dataset and print its counts.
    Prepare(PrepareArgs),
    /// Run one cell (dataset, optimizer, scenario) for each seed.
    Run(RunArgs),
    /// Run every selected cell; with no flags, the full 36-cell study.
    Matrix(MatrixArgs),
    /// Optimize a benchmark function without any data.
    Bench(BenchArgs),
    /// Summarize a directory of run reports.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct PrepareArgs {
    #[arg(long, default_value = "original")]
    pub dataset: DatasetKind,

    /// Raw UCI file; defaults to the dataset's file in the data directory.
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Where to write the normalized CSV; `-` for standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Settings shared by `run` and `matrix`. Unset flags fall back to the
/// config file, then to the built-in defaults.
#[derive(Debug, Args, Default)]
pub struct TuningArgs {
    /// Sweeps per optimizer run.
    #[arg(long)]
    pub iters: Option<usize>,

    /// PSO swarm size.
    #[arg(long)]
    pub particles: Option<usize>,

    /// PSO random coefficients: per-component (a pair for every weight, the
    /// default) or per-particle (one r1, r2 pair per move).
    #[arg(long)]
    pub pso_coefficients: Option<CoefficientDraw>,

    /// MTO population size (even, at least 6).
    #[arg(long)]
    pub population: Option<usize>,

    /// MTOCL climate-change events.
    #[arg(long)]
    pub climate_events: Option<usize>,

    /// MTOCL elimination fraction.
    #[arg(long)]
    pub elimination: Option<f64>,

    /// Cross-validation folds.
    #[arg(long)]
    pub folds: Option<usize>,

    /// Training share of the holdout split.
    #[arg(long)]
    pub holdout: Option<f64>,

    /// Hidden layer sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub hidden: Option<Vec<usize>>,

    /// Principal components kept in PCA scenarios.
    #[arg(long)]
    pub pca_components: Option<usize>,

    /// Oversample the minority class of every training split.
    #[arg(long, conflicts_with = "no_smote")]
    pub smote: bool,

    /// Never oversample.
    #[arg(long)]
    pub no_smote: bool,

    /// Target majority:minority ratio for SMOTE.
    #[arg(long)]
    pub smote_ratio: Option<f64>,

    /// Fit scaling, SMOTE and PCA on the whole dataset before splitting.
    #[arg(long)]
    pub paper_compat: bool,

    /// Seeds, comma separated.
    #[arg(long, alias = "seed", value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,

    /// Report directory; `-` prints JSON to standard output instead.
    #[arg(long, default_value = "reports")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, default_value = "original")]
    pub dataset: DatasetKind,

    #[arg(long, default_value = "mtocl")]
    pub optimizer: OptimizerKind,

    /// Scenario letter a-d; an alternative to `--cv` and `--pca`.
    #[arg(long, conflicts_with_all = ["cv", "pca"])]
    pub scenario: Option<Scenario>,

    /// Ten-fold cross-validation instead of a holdout split.
    #[arg(long)]
    pub cv: bool,

    /// Project onto principal components, optionally giving the count.
    #[arg(long, num_args = 0..=1, default_missing_value = "0")]
    pub pca: Option<usize>,

    #[command(flatten)]
    pub tuning: TuningArgs,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    #[arg(long, value_delimiter = ',')]
    pub datasets: Option<Vec<DatasetKind>>,

    #[arg(long, value_delimiter = ',')]
    pub optimizers: Option<Vec<OptimizerKind>>,

    #[arg(long, value_delimiter = ',')]
    pub scenarios: Option<Vec<Scenario>>,

    #[command(flatten)]
    pub tuning: TuningArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value = "sphere")]
    pub function: BenchFunction,

    /// One or more optimizers, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "pso")]
    pub optimizer: Vec<OptimizerKind>,

    #[arg(long, default_value_t = 10)]
    pub dim: usize,

    /// Number of seeds, run as 1..=N.
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,

    #[arg(long, default_value_t = 500)]
    pub iters: usize,

    /// PSO random coefficients: per-component or per-particle.
    #[arg(long, default_value = "per-component")]
    pub pso_coefficients: CoefficientDraw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Md,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory of run reports.
    #[arg(long = "in")]
    pub input: PathBuf,

    #[arg(long, value_enum, default_value = "md")]
    pub format: Format,

    /// Destination of the grid; `-` for standard output.
    #[arg(long, default_value = "-")]
    pub output: PathBuf,

    /// Also write one tab-separated convergence file per report here.
    #[arg(long)]
    pub traces: Option<PathBuf>,
}
