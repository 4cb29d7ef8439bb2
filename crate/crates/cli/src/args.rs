use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Bug report classification with N-gram IDF key terms.
///
/// Every subcommand is deterministic given its flags. Randomness is seeded
/// (default 42) and the seed in use is printed.
#[derive(Debug, Parser)]
#[command(name = "bugidf", version, max_term_width = 100)]
pub struct Cli {
    /// Worker threads [default: all cores]. Results do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    /// File of `key=value` lines supplying flags for the subcommand.
    /// Flags given on the command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Download report texts into the local cache.
    Fetch(FetchArgs),
    /// Build the N-gram IDF dictionary from a corpus.
    Extract(ExtractArgs),
    /// Count dictionary terms per report and write a feature file.
    Features(FeaturesArgs),
    /// Fit LDA and write topic-membership features.
    Topics(TopicsArgs),
    /// Reduce a feature file with chi-squared or CFS selection.
    Select(SelectArgs),
    /// Train a classifier on a feature file and save it as JSON.
    Train(TrainArgs),
    /// Evaluate a pipeline by cross-validation or chronological split.
    Eval(EvalArgs),
    /// Repeated random-forest comparison of N-gram and topic features.
    Compare(CompareArgs),
}

pub const SUBCOMMANDS: &[&str] = &[
    "fetch", "extract", "features", "topics", "select", "train", "eval", "compare",
];

#[derive(Debug, Clone, Args, Serialize)]
pub struct CorpusArgs {
    /// Label CSV files (comma separated or repeated); several files are
    /// merged into one corpus.
    #[arg(long, required = true, value_delimiter = ',', num_args = 1..)]
    pub labels: Vec<PathBuf>,

    /// Text cache root, laid out as <DIR>/<project>/<report_id>.txt.
    #[arg(long, value_name = "DIR", default_value = "cache")]
    pub cache_dir: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FetchArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,

    /// Tracker base URL, e.g. https://issues.apache.org/jira.
    #[arg(long)]
    pub base_url: String,

    /// Exit successfully even if some reports return 404; gaps are listed.
    #[arg(long)]
    pub allow_missing: bool,

    /// Concurrent requests.
    #[arg(long, default_value_t = 4)]
    pub concurrency: usize,

    /// Retries per report after a transient failure.
    #[arg(long, default_value_t = 3)]
    pub retries: u32,

    /// Initial retry delay in milliseconds; doubles on each retry.
    #[arg(long, default_value_t = 1000)]
    pub backoff_ms: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,

    /// Longest N-gram considered.
    #[arg(long, default_value_t = 10)]
    pub nmax: usize,

    /// Keep N-grams that only ever occur inside a longer N-gram.
    #[arg(long)]
    pub no_prune: bool,

    /// Drop terms weighted below this.
    #[arg(long)]
    pub min_weight: Option<f64>,

    /// Output dictionary TSV.
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FeaturesArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,

    /// Dictionary TSV written by `extract`.
    #[arg(long)]
    pub dict: PathBuf,

    /// Output feature file (.docids and .names written alongside).
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TopicsArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,

    /// Number of topics.
    #[arg(long, default_value_t = 50)]
    pub topics: usize,

    /// Document-topic prior [default: 50 / topics].
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Topic-word prior.
    #[arg(long, default_value_t = 0.01)]
    pub beta: f64,

    /// Gibbs sweeps.
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,

    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// Output feature file (.docids and .names written alongside).
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Chi2,
    Cfs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionArg {
    None,
    Chi2,
    Cfs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SelectArgs {
    /// Input feature file.
    #[arg(long)]
    pub features: PathBuf,

    #[arg(long, value_enum)]
    pub method: MethodArg,

    /// Features kept by chi2 [default: 200]. Not valid with cfs.
    #[arg(long)]
    pub k: Option<usize>,

    /// Output feature file.
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassifierArg {
    Logistic,
    RandomForest,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ClassifierArgs {
    #[arg(long, value_enum, default_value_t = ClassifierArg::Logistic)]
    pub classifier: ClassifierArg,

    /// Logistic L2 penalty.
    #[arg(long, default_value_t = 1e-4)]
    pub lambda: f64,

    /// Logistic iteration cap.
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,

    /// Logistic relative loss-change tolerance.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,

    /// Forest size.
    #[arg(long, default_value_t = 100)]
    pub trees: usize,

    /// Features tried per split [default: floor(sqrt(features))].
    #[arg(long)]
    pub mtry: Option<usize>,

    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrainArgs {
    #[arg(long)]
    pub features: PathBuf,

    #[command(flatten)]
    pub classifier: ClassifierArgs,

    /// Output model JSON.
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitArg {
    Cv,
    Chrono,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SelectionArgs {
    /// Feature selection [default: cfs with --split cv, chi2 with --split chrono].
    #[arg(long, value_enum)]
    pub select: Option<SelectionArg>,

    /// Features kept by chi2 [default: 200].
    #[arg(long)]
    pub k: Option<usize>,

    /// Fit selection once on all rows rather than on each training split.
    #[arg(long)]
    pub select_on_all: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvalArgs {
    #[arg(long)]
    pub features: PathBuf,

    #[command(flatten)]
    pub classifier: ClassifierArgs,

    #[command(flatten)]
    pub selection: SelectionArgs,

    #[arg(long, value_enum, default_value_t = SplitArg::Cv)]
    pub split: SplitArg,

    /// Cross-validation folds [default: 10].
    #[arg(long)]
    pub folds: Option<usize>,

    /// Oldest fraction used for training in a chronological split [default: 0.9].
    #[arg(long)]
    pub train_fraction: Option<f64>,

    /// Label CSVs providing creation times (required for --split chrono).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub labels: Vec<PathBuf>,

    /// Write a JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CompareArgs {
    /// N-gram feature file.
    #[arg(long)]
    pub ngram_features: PathBuf,

    /// Topic feature file for the same reports.
    #[arg(long)]
    pub topic_features: PathBuf,

    /// Label CSVs providing creation times.
    #[arg(long, required = true, value_delimiter = ',', num_args = 1..)]
    pub labels: Vec<PathBuf>,

    /// Selection applied to the N-gram features.
    #[arg(long, value_enum, default_value_t = SelectionArg::Chi2)]
    pub select: SelectionArg,

    /// Features kept by chi2 [default: 200].
    #[arg(long)]
    pub k: Option<usize>,

    /// Forest runs per feature set.
    #[arg(long, default_value_t = 1000)]
    pub runs: usize,

    #[arg(long, default_value_t = 100)]
    pub trees: usize,

    /// Features tried per split [default: floor(sqrt(features))].
    #[arg(long)]
    pub mtry: Option<usize>,

    /// Oldest fraction used for training.
    #[arg(long, default_value_t = 0.9)]
    pub train_fraction: f64,

    /// Master seed; run i uses seed ^ i.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// Directory for report.json, ngram_runs.csv and topic_runs.csv.
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
}
