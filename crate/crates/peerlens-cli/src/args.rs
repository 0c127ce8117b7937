//! Command-line surface: one struct per subcommand.
//!
//! Flags with a config-file counterpart are `Option`s here and resolve as
//! flag, then config file, then built-in default; each help string states
//! the built-in default. Flags without a counterpart use clap defaults.

use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

/// Peering-pair prediction pipeline: snapshots in, datasets, trained
/// models, predictions, and experiment reports out.
///
/// Every subcommand writes its artifacts under --out together with a
/// run.json manifest echoing the fully resolved configuration and a
/// sha256 per artifact (timing files excluded), so rerunning the same
/// invocation reproduces the same bytes.
#[derive(Parser)]
#[command(name = "peerlens", version, max_term_width = 100)]
pub struct Cli {
    /// TOML config file; command-line flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads for parallel stages [default: all cores].
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate a synthetic snapshot (plus an optional backdated one).
    Synth(SynthArgs),
    /// Build a snapshot from AS-Rank, PeeringDB, and relationship dumps.
    Ingest(IngestArgs),
    /// Encode the per-AS feature table of a snapshot.
    Features(FeaturesArgs),
    /// Compute the customer cone of every AS in a snapshot.
    Cones(ConesArgs),
    /// Assemble the labeled pair dataset (optionally pre-split).
    Dataset(DatasetArgs),
    /// Train a tree-ensemble model on a dataset.
    Train(TrainArgs),
    /// Evaluate a trained model on a labeled dataset.
    Eval(EvalArgs),
    /// Score explicit AS pairs with a trained model.
    Predict(PredictArgs),
    /// Attribute single predictions to features by Shapley sampling.
    Explain(ExplainArgs),
    /// Run one experiment from the evaluation suite.
    #[command(subcommand)]
    Experiment(ExperimentCmd),
}

#[derive(Args)]
pub struct SynthArgs {
    /// Number of ASes to generate; required here or as synth.n in the
    /// config file.
    #[arg(long, value_name = "N")]
    pub n: Option<usize>,

    /// Master seed; all generator randomness derives from it [default: 0].
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,

    /// Snapshot date, YYYY-MM-DD [default: 2024-06-01].
    #[arg(long, value_name = "DATE")]
    pub date: Option<NaiveDate>,

    /// Target fraction of peer pairs among labeled pairs [default: 0.83].
    #[arg(long, value_name = "F")]
    pub peer_ratio: Option<f64>,

    /// Probability that an AS buys transit twice [default: 0.15].
    #[arg(long, value_name = "F")]
    pub multi_home_prob: Option<f64>,

    /// Fraction of ASes also present in the PeeringDB table [default: 0.9].
    #[arg(long, value_name = "F")]
    pub coverage: Option<f64>,

    /// Margin separating planted peer pairs from provider-customer pairs
    /// [default: 0.05].
    #[arg(long, value_name = "F")]
    pub affinity_floor: Option<f64>,

    /// How often optional cells are left blank; 0 means fully present
    /// [default: 1].
    #[arg(long, value_name = "F")]
    pub missing_scale: Option<f64>,

    /// Output snapshot directory.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,

    /// Also write a snapshot backdated by 24 months here, as the older
    /// input of the temporal experiment.
    #[arg(long, value_name = "DIR")]
    pub older_out: Option<PathBuf>,
}

#[derive(Args)]
pub struct IngestArgs {
    /// AS-Rank dump, one JSON object per line.
    #[arg(long, value_name = "FILE")]
    pub as_rank: PathBuf,

    /// PeeringDB `net` dump, one JSON object per line.
    #[arg(long, value_name = "FILE")]
    pub peeringdb: PathBuf,

    /// AS relationship file in the `<a>|<b>|<type>` serial format.
    #[arg(long, value_name = "FILE")]
    pub relationships: PathBuf,

    /// Optional point-of-presence memberships as `asn,pop` CSV, where a
    /// pop is F<id> (facility) or X<id> (exchange point). Without it,
    /// facility and exchange counts still come from the PeeringDB table
    /// but per-pair common-infrastructure features are unavailable.
    #[arg(long, value_name = "FILE")]
    pub pops: Option<PathBuf>,

    /// Date the dumps were captured, YYYY-MM-DD.
    #[arg(long, value_name = "DATE")]
    pub date: NaiveDate,

    /// Output snapshot directory.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct FeaturesArgs {
    /// Input snapshot directory.
    #[arg(long, value_name = "DIR")]
    pub snapshot: PathBuf,

    /// Feature variant: default, filtered, or optimum [default: optimum].
    #[arg(long, value_name = "VARIANT")]
    pub variant: Option<String>,

    /// Also write correlation.csv, the feature correlation matrix.
    #[arg(long)]
    pub correlation: bool,

    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct ConesArgs {
    /// Input snapshot directory.
    #[arg(long, value_name = "DIR")]
    pub snapshot: PathBuf,

    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct DatasetArgs {
    /// Input snapshot directory.
    #[arg(long, value_name = "DIR")]
    pub snapshot: PathBuf,

    /// Feature variant: default, filtered, or optimum [default: optimum].
    #[arg(long, value_name = "VARIANT")]
    pub variant: Option<String>,

    /// When set, split the dataset and write train/ and test/
    /// subdirectories instead of one dataset; the value is the train
    /// fraction.
    #[arg(long, value_name = "F")]
    pub split: Option<f64>,

    /// Master seed for the split shuffle [default: 0].
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,

    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

/// Ensemble knobs shared by train and the experiment drivers.
#[derive(Args)]
pub struct HpArgs {
    /// Ensemble size [default: 100].
    #[arg(long, value_name = "N")]
    pub trees: Option<usize>,

    /// Maximum tree depth [default: 6].
    #[arg(long, value_name = "N")]
    pub depth: Option<usize>,

    /// Boosting shrinkage [default: 0.3].
    #[arg(long, value_name = "F")]
    pub learning_rate: Option<f64>,

    /// L2 penalty on boosted leaf values [default: 1].
    #[arg(long, value_name = "F")]
    pub lambda: Option<f64>,

    /// Minimum hessian sum per boosted child [default: 1].
    #[arg(long, value_name = "F")]
    pub min_child_weight: Option<f64>,

    /// Bootstrap-sample forest training rows [default: true].
    #[arg(long, value_name = "BOOL")]
    pub bootstrap: Option<bool>,

    /// Columns tried per forest split: sqrt, all, or a count
    /// [default: sqrt].
    #[arg(long, value_name = "RULE")]
    pub features_per_split: Option<String>,
}

#[derive(Args)]
pub struct TrainArgs {
    /// Input dataset directory.
    #[arg(long, value_name = "DIR")]
    pub dataset: PathBuf,

    /// Model kind: boosted or forest [default: boosted].
    #[arg(long, value_name = "KIND")]
    pub model: Option<String>,

    /// Master seed for training randomness [default: 0].
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,

    #[command(flatten)]
    pub hp: HpArgs,

    /// Output directory; the model lands in model.json.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct EvalArgs {
    /// Trained model file.
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,

    /// Labeled dataset directory to evaluate on.
    #[arg(long, value_name = "DIR")]
    pub dataset: PathBuf,

    /// Output directory; metrics land in metrics.json.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct PredictArgs {
    /// Trained model file.
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,

    /// Snapshot directory to read features from.
    #[arg(long, value_name = "DIR")]
    pub snapshot: PathBuf,

    /// Pairs file: one `ASN_A,ASN_B` per line; blank lines and lines
    /// starting with # are skipped.
    #[arg(long, value_name = "FILE")]
    pub pairs: PathBuf,

    /// Output directory; predictions land in predictions.csv. Without
    /// it the CSV goes to stdout and nothing is written.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ExplainArgs {
    /// Trained model file.
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,

    /// Dataset directory the rows to explain come from; must have the
    /// same schema the model was trained on.
    #[arg(long, value_name = "DIR")]
    pub dataset: PathBuf,

    /// Explain the first N dataset rows (capped at the dataset size).
    #[arg(long, value_name = "N", default_value_t = 10)]
    pub rows: usize,

    /// Background sample: the first N dataset rows (capped likewise).
    #[arg(long, value_name = "N", default_value_t = 32)]
    pub background: usize,

    /// Permutations sampled per explained row.
    #[arg(long, value_name = "N", default_value_t = 256)]
    pub permutations: usize,

    /// Master seed; row i uses a seed derived from (seed, "explain/row",
    /// i) [default: 0].
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,

    /// Output directory; attributions.csv and importance.csv land here.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Subcommand)]
pub enum ExperimentCmd {
    /// Sweep feature variants against model kinds on shared splits.
    Ablation(AblationArgs),
    /// Compare class-rebalance strategies on identical splits.
    Sampling(SamplingArgs),
    /// Sweep the training-set fraction.
    TrainSize(TrainSizeArgs),
    /// Train on one AS universe, test within and across universes.
    Transfer(TransferArgs),
    /// Train on an older snapshot, test on the current one.
    Temporal(TemporalArgs),
    /// Degrade the dataset with injected missing cells before splitting.
    Missing(MissingArgs),
    /// Score unlabeled candidate pairs around anchor ASes.
    Unknown(UnknownArgs),
    /// Retrain while dropping the least important features.
    Reduction(ReductionArgs),
}

/// Flags every repeated experiment shares.
#[derive(Args)]
pub struct ExpCommon {
    /// Input snapshot directory.
    #[arg(long, value_name = "DIR")]
    pub snapshot: PathBuf,

    /// Number of repetitions; repetition i runs with a seed derived from
    /// (--seed, "run", i) [default: 5].
    #[arg(long, value_name = "N")]
    pub seeds: Option<u64>,

    /// Master seed every repetition seed derives from [default: 0].
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,

    #[command(flatten)]
    pub hp: HpArgs,

    /// Also write long.csv: the per-seed table melted to one metric per
    /// row, ready for plotting.
    #[arg(long)]
    pub long: bool,

    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

/// Variant and model-kind selection for single-arm experiments.
#[derive(Args)]
pub struct ArmSelect {
    /// Feature variant: default, filtered, or optimum [default: optimum].
    #[arg(long, value_name = "VARIANT")]
    pub variant: Option<String>,

    /// Model kind: boosted or forest [default: boosted].
    #[arg(long, value_name = "KIND")]
    pub model: Option<String>,
}

#[derive(Args)]
pub struct AblationArgs {
    #[command(flatten)]
    pub common: ExpCommon,

    /// Train fraction of each holdout [default: 0.5].
    #[arg(long, value_name = "F")]
    pub train_fraction: Option<f64>,
}

#[derive(Args)]
pub struct SamplingArgs {
    #[command(flatten)]
    pub common: ExpCommon,

    #[command(flatten)]
    pub arm: ArmSelect,

    /// Train fraction of each holdout [default: 0.5].
    #[arg(long, value_name = "F")]
    pub train_fraction: Option<f64>,

    /// Comma-separated strategies from none, oversample, undersample,
    /// smote<K> [default: none,oversample,undersample,smote5].
    #[arg(long, value_name = "LIST")]
    pub strategies: Option<String>,
}

#[derive(Args)]
pub struct TrainSizeArgs {
    #[command(flatten)]
    pub common: ExpCommon,

    #[command(flatten)]
    pub arm: ArmSelect,

    /// Comma-separated train fractions
    /// [default: 0.02,0.05,0.1,0.2,0.3,0.5,0.7].
    #[arg(long, value_name = "LIST")]
    pub fractions: Option<String>,
}

#[derive(Args)]
pub struct TransferArgs {
    #[command(flatten)]
    pub common: ExpCommon,

    #[command(flatten)]
    pub arm: ArmSelect,
}

#[derive(Args)]
pub struct TemporalArgs {
    #[command(flatten)]
    pub common: ExpCommon,

    #[command(flatten)]
    pub arm: ArmSelect,

    /// Snapshot directory strictly older than --snapshot; training pairs
    /// come from here.
    #[arg(long, value_name = "DIR")]
    pub older_snapshot: PathBuf,
}

#[derive(Args)]
pub struct MissingArgs {
    #[command(flatten)]
    pub common: ExpCommon,

    #[command(flatten)]
    pub arm: ArmSelect,

    /// Train fraction of each holdout [default: 0.5].
    #[arg(long, value_name = "F")]
    pub train_fraction: Option<f64>,

    /// Comma-separated fractions of cells to blank per column
    /// [default: 0.1,0.2,0.3,0.4,0.5].
    #[arg(long, value_name = "LIST")]
    pub fractions: Option<String>,
}

#[derive(Args)]
pub struct UnknownArgs {
    /// Input snapshot directory.
    #[arg(long, value_name = "DIR")]
    pub snapshot: PathBuf,

    /// Master seed for training randomness [default: 0].
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,

    #[command(flatten)]
    pub hp: HpArgs,

    #[command(flatten)]
    pub arm: ArmSelect,

    /// Comma-separated anchor ASNs; overrides --anchor-count.
    #[arg(long, value_name = "LIST")]
    pub anchors: Option<String>,

    /// Without --anchors, anchor on the N best-ranked ASes [default: 20].
    #[arg(long, value_name = "N")]
    pub anchor_count: Option<usize>,

    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct ReductionArgs {
    #[command(flatten)]
    pub common: ExpCommon,

    /// Train fraction of each holdout [default: 0.5].
    #[arg(long, value_name = "F")]
    pub train_fraction: Option<f64>,

    /// Comma-separated base column names to drop, least important first
    /// [default: a frozen importance ranking of all 41 columns].
    #[arg(long, value_name = "LIST")]
    pub drop_order: Option<String>,

    /// Comma-separated numbers of columns to drop per arm
    /// [default: 0,8,16,24,32,40].
    #[arg(long, value_name = "LIST")]
    pub drop_counts: Option<String>,
}
