//! Experiment drivers: repeatable studies over seeds, each producing
//! per-seed evaluation reports, population-statistics aggregates, and a
//! deterministic results directory.
//!
//! Every driver follows the same shape: take a snapshot (or two), a list
//! of seeds, and hyperparameters; run one train-and-evaluate cycle per
//! seed and experimental cell; return a typed result that renders to an
//! [`ExperimentOutput`]. Saved outputs are byte-identical across runs
//! except `timings.csv`, which records wall-clock times and is excluded
//! from the manifest hashes for that reason.

mod ablation;
mod missing;
mod reduction;
mod sampling;
mod temporal;
mod train_size;
mod transfer;
mod unknown;

pub use ablation::{ablation, AblationCell, AblationResult};
pub use missing::{missing_robustness, MissingCell, MissingResult};
pub use reduction::{reduction, ReductionCell, ReductionResult};
pub use sampling::{sampling, Rebalance, SamplingCell, SamplingResult};
pub use temporal::{temporal, TemporalResult, TemporalRun};
pub use train_size::{train_size, TrainSizeCell, TrainSizeResult};
pub use transfer::{transfer, TransferResult, TransferRun};
pub use unknown::{unknown_pairs, CandidateScore, UnknownResult};

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsio::{sha256_hex, write_atomic};
use crate::learner::{train_boosted, train_forest, Hyperparams, Model, ModelKind};
use crate::metrics::{evaluate, Metrics};
use crate::pairset::PairDataset;

pub(crate) const EXPERIMENT_FORMAT: &str = "peerlens/experiment/v1";

/// One train-and-evaluate cycle. Timing fields are informational only and
/// never serialized, so reports stay comparable across machines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_train: usize,
    pub n_test: usize,
    pub metrics: Metrics,
    #[serde(skip)]
    pub train_seconds: f64,
    #[serde(skip)]
    pub eval_seconds: f64,
}

/// Trains `kind` on `train` and evaluates on `test`.
pub fn fit_eval(
    train: &PairDataset,
    test: &PairDataset,
    kind: ModelKind,
    hp: &Hyperparams,
) -> Result<EvalReport> {
    Ok(fit_eval_model(train, test, kind, hp)?.1)
}

pub(crate) fn fit_eval_model(
    train: &PairDataset,
    test: &PairDataset,
    kind: ModelKind,
    hp: &Hyperparams,
) -> Result<(Model, EvalReport)> {
    let started = Instant::now();
    let model = match kind {
        ModelKind::Boosted => train_boosted(train, hp)?,
        ModelKind::Forest => train_forest(train, hp)?,
    };
    let train_seconds = started.elapsed().as_secs_f64();
    let mut report = eval_with(&model, train.len(), test)?;
    report.train_seconds = train_seconds;
    Ok((model, report))
}

/// Evaluates an already-trained model; `train_seconds` stays zero.
pub(crate) fn eval_with(model: &Model, n_train: usize, test: &PairDataset) -> Result<EvalReport> {
    let started = Instant::now();
    let predicted = model.predict_labels(test)?;
    let metrics = evaluate(test.labels()?, &predicted)?;
    Ok(EvalReport {
        n_train,
        n_test: test.len(),
        metrics,
        train_seconds: 0.0,
        eval_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Mean and population standard deviation of the values that were
/// defined; `n` counts them. `None` when no value was defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

pub fn aggregate(values: impl IntoIterator<Item = Option<f64>>) -> Option<Aggregate> {
    let present: Vec<f64> = values.into_iter().flatten().collect();
    if present.is_empty() {
        return None;
    }
    let n = present.len();
    let mean = present.iter().sum::<f64>() / n as f64;
    let var = present.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    Some(Aggregate {
        mean,
        std: var.sqrt(),
        n,
    })
}

/// Column names the per-seed and aggregate tables use for the five
/// metrics, in report order.
pub const METRIC_NAMES: [&str; 5] = ["overall", "peering", "non_peering", "balanced", "f1"];

pub(crate) fn metric_values(m: &Metrics) -> [Option<f64>; 5] {
    [
        Some(m.overall),
        m.peering,
        m.non_peering,
        m.balanced,
        m.f1,
    ]
}

/// A rectangular table destined for a CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl ResultTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> ResultTable {
        ResultTable {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "ragged result row");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.into_inner().map_err(|e| {
            Error::InvalidArgument(format!("csv buffer flush failed: {e}"))
        })
    }
}

/// Shortest-round-trip text form; `None` becomes an empty cell.
pub(crate) fn cell(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

/// Appends the five metric columns of one report to a row.
pub(crate) fn push_metric_cells(row: &mut Vec<String>, metrics: &Metrics) {
    for v in metric_values(metrics) {
        row.push(cell(v));
    }
}

/// Header for an aggregate table: the given key columns followed by
/// `{metric}_mean` and `{metric}_std` for each of the five metrics.
pub(crate) fn aggregate_columns(keys: &[&str]) -> Vec<String> {
    let mut header: Vec<String> = keys.iter().map(|s| s.to_string()).collect();
    for name in METRIC_NAMES {
        header.push(format!("{name}_mean"));
        header.push(format!("{name}_std"));
    }
    header
}

/// Header for a per-seed table: key columns, the set sizes, then the five
/// metric columns.
pub(crate) fn per_seed_columns(keys: &[&str]) -> Vec<String> {
    let mut header: Vec<String> = keys.iter().map(|s| s.to_string()).collect();
    header.push("n_train".into());
    header.push("n_test".into());
    header.extend(METRIC_NAMES.iter().map(|s| s.to_string()));
    header
}

/// Header for a timing table: key columns plus the two duration columns.
pub(crate) fn timing_columns(keys: &[&str]) -> Vec<String> {
    let mut header: Vec<String> = keys.iter().map(|s| s.to_string()).collect();
    header.push("train_seconds".into());
    header.push("eval_seconds".into());
    header
}

/// Appends one report's sizes and metrics to a per-seed row, and its
/// durations to the matching timing row.
pub(crate) fn push_report(
    per_seed_row: &mut Vec<String>,
    timing_row: &mut Vec<String>,
    report: &EvalReport,
) {
    per_seed_row.push(report.n_train.to_string());
    per_seed_row.push(report.n_test.to_string());
    push_metric_cells(per_seed_row, &report.metrics);
    timing_row.push(cell(Some(report.train_seconds)));
    timing_row.push(cell(Some(report.eval_seconds)));
}

/// Appends mean and std cells for each of the five metrics, aggregated
/// over the reports of one experimental cell.
pub(crate) fn push_aggregate_cells(row: &mut Vec<String>, reports: &[EvalReport]) {
    for i in 0..METRIC_NAMES.len() {
        let agg = aggregate(reports.iter().map(|r| metric_values(&r.metrics)[i]));
        row.push(cell(agg.map(|a| a.mean)));
        row.push(cell(agg.map(|a| a.std)));
    }
}

/// Rendered form of an experiment, ready to save.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub name: String,
    pub config: serde_json::Value,
    pub per_seed: ResultTable,
    pub aggregate: ResultTable,
    pub timings: ResultTable,
}

#[derive(Serialize)]
struct ExperimentManifest<'a> {
    format: &'static str,
    name: &'a str,
    config: &'a serde_json::Value,
    files: std::collections::BTreeMap<&'static str, String>,
}

/// Writes `per_seed.csv`, `aggregate.csv`, `timings.csv`, and
/// `manifest.json` into `dir`. The manifest hashes the two deterministic
/// tables; timings are excluded because wall-clock times vary run to run.
pub fn save_experiment(dir: impl AsRef<Path>, output: &ExperimentOutput) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let per_seed = output.per_seed.to_csv()?;
    let agg = output.aggregate.to_csv()?;
    let timings = output.timings.to_csv()?;
    let mut files = std::collections::BTreeMap::new();
    files.insert("per_seed.csv", sha256_hex(&per_seed));
    files.insert("aggregate.csv", sha256_hex(&agg));
    let manifest = ExperimentManifest {
        format: EXPERIMENT_FORMAT,
        name: &output.name,
        config: &output.config,
        files,
    };
    let mut manifest_bytes = serde_json::to_vec_pretty(&manifest)?;
    manifest_bytes.push(b'\n');
    write_atomic(dir.join("per_seed.csv"), &per_seed)?;
    write_atomic(dir.join("aggregate.csv"), &agg)?;
    write_atomic(dir.join("timings.csv"), &timings)?;
    write_atomic(dir.join("manifest.json"), &manifest_bytes)?;
    Ok(())
}

/// Rejects an empty seed list up front; every driver requires one.
pub(crate) fn check_seeds(seeds: &[u64]) -> Result<()> {
    if seeds.is_empty() {
        Err(Error::InvalidArgument("no seeds given".into()))
    } else {
        Ok(())
    }
}

/// Hyperparameters for one repetition: the run seed replaces `hp.seed` so
/// that bootstrap and feature sampling vary with the repetition.
pub(crate) fn run_hp(hp: &Hyperparams, seed: u64) -> Hyperparams {
    Hyperparams {
        seed,
        ..hp.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::synth::{synth_snapshot, SynthParams};
    use crate::pairset::split::random_holdout;
    use crate::pipeline::build_pair_dataset;

    #[test]
    fn aggregate_matches_hand_computation() {
        let agg = aggregate([Some(1.0), Some(2.0), Some(3.0), None]).unwrap();
        assert_eq!(agg.n, 3);
        assert!((agg.mean - 2.0).abs() < 1e-15);
        let expected_std = (2.0f64 / 3.0).sqrt();
        assert!((agg.std - expected_std).abs() < 1e-15);
        assert_eq!(aggregate([None, None]), None);
        let single = aggregate([Some(0.5)]).unwrap();
        assert_eq!((single.mean, single.std, single.n), (0.5, 0.0, 1));
    }

    #[test]
    fn fit_eval_reports_sizes_and_sane_metrics() {
        let snap = synth_snapshot(80, 7, &SynthParams::default()).unwrap();
        let (ds, _) = build_pair_dataset(&snap, crate::catalog::Variant::Optimum).unwrap();
        let (train, test) = random_holdout(&ds, 0.5, 11).unwrap();
        let hp = Hyperparams {
            n_trees: 20,
            ..Hyperparams::default()
        };
        let report = fit_eval(&train, &test, ModelKind::Boosted, &hp).unwrap();
        assert_eq!(report.n_train, train.len());
        assert_eq!(report.n_test, test.len());
        assert!(report.metrics.overall > 0.5, "{:?}", report.metrics);
    }

    #[test]
    fn result_table_rejects_ragged_rows() {
        let mut t = ResultTable::new(["a", "b"]);
        t.push(vec!["1".into(), "2".into()]);
        let csv = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(csv, "a,b\n1,2\n");
        let result = std::panic::catch_unwind(move || t.push(vec!["1".into()]));
        assert!(result.is_err());
    }

    #[test]
    fn saved_experiment_is_deterministic_except_timings() {
        let output = ExperimentOutput {
            name: "demo".into(),
            config: serde_json::json!({"seeds": [1, 2]}),
            per_seed: ResultTable {
                header: vec!["seed".into(), "overall".into()],
                rows: vec![vec!["1".into(), "0.9".into()]],
            },
            aggregate: ResultTable {
                header: vec!["overall_mean".into()],
                rows: vec![vec!["0.9".into()]],
            },
            timings: ResultTable {
                header: vec!["seed".into(), "train_seconds".into()],
                rows: vec![vec!["1".into(), "0.123".into()]],
            },
        };
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a");
        let b = dir.path().join("b");
        save_experiment(&a, &output).unwrap();
        let mut noisier = output.clone();
        noisier.timings.rows[0][1] = "9.876".into();
        save_experiment(&b, &noisier).unwrap();
        for file in ["per_seed.csv", "aggregate.csv", "manifest.json"] {
            assert_eq!(
                std::fs::read(a.join(file)).unwrap(),
                std::fs::read(b.join(file)).unwrap(),
                "{file}"
            );
        }
        assert_ne!(
            std::fs::read(a.join("timings.csv")).unwrap(),
            std::fs::read(b.join("timings.csv")).unwrap()
        );
        let manifest: serde_json::Value =
            serde_json::from_slice(&std::fs::read(a.join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["format"], EXPERIMENT_FORMAT);
        assert!(manifest["files"].get("timings.csv").is_none());
    }
}
