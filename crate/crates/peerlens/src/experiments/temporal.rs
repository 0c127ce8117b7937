//! Training on the past: fit on an earlier snapshot's features and labels
//! restricted to pairs that still exist, then score the current snapshot,
//! including the peerings that did not exist back then.

use std::collections::BTreeSet;

use serde_json::json;

use super::{
    aggregate_columns, check_seeds, eval_with, fit_eval_model, per_seed_columns,
    push_aggregate_cells, push_report, run_hp, timing_columns, EvalReport, ExperimentOutput,
    ResultTable,
};
use crate::catalog::Variant;
use crate::error::{Error, Result};
use crate::ingest::Snapshot;
use crate::learner::{Hyperparams, ModelKind};
use crate::pairset::split::temporal_pairs;
use crate::pipeline::build_pair_dataset;
use crate::types::AsnId;

#[derive(Debug, Clone, PartialEq)]
pub struct TemporalRun {
    pub seed: u64,
    /// All pairs of the current snapshot.
    pub current_all: EvalReport,
    /// Only pairs absent from the older snapshot: relationships the model
    /// could not have seen in any form.
    pub emerged: EvalReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemporalResult {
    pub variant: Variant,
    pub kind: ModelKind,
    pub older_date: chrono::NaiveDate,
    pub current_date: chrono::NaiveDate,
    /// Older-snapshot rows used for training (pairs alive in both).
    pub n_matched: usize,
    pub seeds: Vec<u64>,
    pub hyperparams: Hyperparams,
    pub runs: Vec<TemporalRun>,
}

const SCOPES: [&str; 2] = ["current_all", "emerged"];

/// Trains on the older snapshot (restricted to pairs the current one also
/// has, so both sides describe the same relationships) and evaluates on
/// the current snapshot. Seeds vary only the learner's own randomness;
/// there is no random split in this experiment.
pub fn temporal(
    current: &Snapshot,
    older: &Snapshot,
    variant: Variant,
    kind: ModelKind,
    seeds: &[u64],
    hp: &Hyperparams,
) -> Result<TemporalResult> {
    check_seeds(seeds)?;
    if older.date >= current.date {
        return Err(Error::InvalidArgument(format!(
            "older snapshot ({}) must predate the current one ({})",
            older.date, current.date
        )));
    }
    let (current_ds, _) = build_pair_dataset(current, variant)?;
    let (older_ds, _) = build_pair_dataset(older, variant)?;
    let train = temporal_pairs(&older_ds, &current_ds)?;

    let older_pairs: BTreeSet<(AsnId, AsnId)> = older_ds.pairs.iter().copied().collect();
    let emerged_idx: Vec<usize> = current_ds
        .pairs
        .iter()
        .enumerate()
        .filter(|(_, p)| !older_pairs.contains(p))
        .map(|(i, _)| i)
        .collect();
    if emerged_idx.is_empty() {
        return Err(Error::EmptyInput(
            "no pairs emerged between the snapshots".into(),
        ));
    }
    let emerged_ds = current_ds.take(&emerged_idx);

    let mut runs = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let (model, current_all) = fit_eval_model(&train, &current_ds, kind, &run_hp(hp, seed))?;
        let emerged = eval_with(&model, train.len(), &emerged_ds)?;
        runs.push(TemporalRun {
            seed,
            current_all,
            emerged,
        });
    }
    Ok(TemporalResult {
        variant,
        kind,
        older_date: older.date,
        current_date: current.date,
        n_matched: train.len(),
        seeds: seeds.to_vec(),
        hyperparams: hp.clone(),
        runs,
    })
}

impl TemporalRun {
    fn report(&self, scope: &str) -> &EvalReport {
        match scope {
            "current_all" => &self.current_all,
            "emerged" => &self.emerged,
            other => unreachable!("unknown temporal scope {other}"),
        }
    }
}

impl TemporalResult {
    pub fn to_output(&self) -> ExperimentOutput {
        let keys = ["scope", "seed"];
        let mut per_seed = ResultTable::new(per_seed_columns(&keys));
        let mut timings = ResultTable::new(timing_columns(&keys));
        let mut aggregate = ResultTable::new(aggregate_columns(&["scope"]));
        for scope in SCOPES {
            for run in &self.runs {
                let mut row = vec![scope.to_string(), run.seed.to_string()];
                let mut timing = row.clone();
                push_report(&mut row, &mut timing, run.report(scope));
                per_seed.push(row);
                timings.push(timing);
            }
            let mut row = vec![scope.to_string()];
            let reports: Vec<EvalReport> =
                self.runs.iter().map(|r| r.report(scope).clone()).collect();
            push_aggregate_cells(&mut row, &reports);
            aggregate.push(row);
        }
        ExperimentOutput {
            name: "temporal".into(),
            config: json!({
                "variant": self.variant,
                "model": self.kind,
                "older_date": self.older_date,
                "current_date": self.current_date,
                "n_matched": self.n_matched,
                "seeds": self.seeds,
                "hyperparams": self.hyperparams,
            }),
            per_seed,
            aggregate,
            timings,
        }
    }
}
