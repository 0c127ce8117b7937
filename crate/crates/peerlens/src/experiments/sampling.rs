//! Class-rebalancing comparison: the same split evaluated with the
//! training side left alone, oversampled, undersampled, or grown with
//! synthetic minority rows.

use serde_json::json;

use super::{
    aggregate_columns, check_seeds, fit_eval, per_seed_columns, push_aggregate_cells, push_report,
    run_hp, timing_columns, EvalReport, ExperimentOutput, ResultTable,
};
use crate::catalog::Variant;
use crate::error::{Error, Result};
use crate::ingest::Snapshot;
use crate::learner::{Hyperparams, ModelKind};
use crate::pairset::sample::{oversample, smote, undersample};
use crate::pairset::split::random_holdout;
use crate::pairset::PairDataset;
use crate::pipeline::build_pair_dataset;

/// How to rebalance the classes of a training set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rebalance {
    None,
    Oversample,
    Undersample,
    Smote { k: usize },
}

impl Rebalance {
    pub fn apply(self, dataset: &PairDataset, master_seed: u64) -> Result<PairDataset> {
        match self {
            Rebalance::None => Ok(dataset.clone()),
            Rebalance::Oversample => oversample(dataset, master_seed),
            Rebalance::Undersample => undersample(dataset, master_seed),
            Rebalance::Smote { k } => smote(dataset, k, master_seed),
        }
    }

    /// The four standard strategies with the usual neighbor count.
    pub fn standard() -> Vec<Rebalance> {
        vec![
            Rebalance::None,
            Rebalance::Oversample,
            Rebalance::Undersample,
            Rebalance::Smote { k: 5 },
        ]
    }
}

impl std::fmt::Display for Rebalance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Rebalance::None => f.write_str("none"),
            Rebalance::Oversample => f.write_str("oversample"),
            Rebalance::Undersample => f.write_str("undersample"),
            Rebalance::Smote { k } => write!(f, "smote{k}"),
        }
    }
}

impl std::str::FromStr for Rebalance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rebalance> {
        match s {
            "none" => Ok(Rebalance::None),
            "oversample" => Ok(Rebalance::Oversample),
            "undersample" => Ok(Rebalance::Undersample),
            "smote" => Ok(Rebalance::Smote { k: 5 }),
            other => match other.strip_prefix("smote").and_then(|k| k.parse().ok()) {
                Some(k) if k >= 1 => Ok(Rebalance::Smote { k }),
                _ => Err(Error::InvalidArgument(format!(
                    "unknown rebalance strategy {other:?} (try none, oversample, undersample, smote, smoteN)"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingCell {
    pub strategy: Rebalance,
    pub reports: Vec<EvalReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingResult {
    pub variant: Variant,
    pub kind: ModelKind,
    pub train_fraction: f64,
    pub strategies: Vec<Rebalance>,
    pub seeds: Vec<u64>,
    pub hyperparams: Hyperparams,
    pub cells: Vec<SamplingCell>,
}

/// Compares rebalancing strategies on identical splits: per seed, one
/// holdout is drawn, then every strategy reshapes only the training side.
/// The test side is never resampled.
pub fn sampling(
    snapshot: &Snapshot,
    variant: Variant,
    kind: ModelKind,
    train_fraction: f64,
    strategies: &[Rebalance],
    seeds: &[u64],
    hp: &Hyperparams,
) -> Result<SamplingResult> {
    check_seeds(seeds)?;
    if strategies.is_empty() {
        return Err(Error::InvalidArgument("no rebalance strategies given".into()));
    }
    let (dataset, _) = build_pair_dataset(snapshot, variant)?;
    let mut cells: Vec<SamplingCell> = strategies
        .iter()
        .map(|&strategy| SamplingCell {
            strategy,
            reports: Vec::new(),
        })
        .collect();
    for &seed in seeds {
        let (train, test) = random_holdout(&dataset, train_fraction, seed)?;
        for cell in &mut cells {
            let rebalanced = cell.strategy.apply(&train, seed)?;
            cell.reports
                .push(fit_eval(&rebalanced, &test, kind, &run_hp(hp, seed))?);
        }
    }
    Ok(SamplingResult {
        variant,
        kind,
        train_fraction,
        strategies: strategies.to_vec(),
        seeds: seeds.to_vec(),
        hyperparams: hp.clone(),
        cells,
    })
}

impl SamplingResult {
    pub fn to_output(&self) -> ExperimentOutput {
        let keys = ["strategy", "seed"];
        let mut per_seed = ResultTable::new(per_seed_columns(&keys));
        let mut timings = ResultTable::new(timing_columns(&keys));
        let mut aggregate = ResultTable::new(aggregate_columns(&["strategy"]));
        for cell in &self.cells {
            for (i, report) in cell.reports.iter().enumerate() {
                let mut row = vec![cell.strategy.to_string(), self.seeds[i].to_string()];
                let mut timing = row.clone();
                push_report(&mut row, &mut timing, report);
                per_seed.push(row);
                timings.push(timing);
            }
            let mut row = vec![cell.strategy.to_string()];
            push_aggregate_cells(&mut row, &cell.reports);
            aggregate.push(row);
        }
        ExperimentOutput {
            name: "sampling".into(),
            config: json!({
                "variant": self.variant,
                "model": self.kind,
                "train_fraction": self.train_fraction,
                "strategies": self.strategies,
                "seeds": self.seeds,
                "hyperparams": self.hyperparams,
            }),
            per_seed,
            aggregate,
            timings,
        }
    }
}
