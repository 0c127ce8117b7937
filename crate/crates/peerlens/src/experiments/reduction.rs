//! Feature-reduction study: retrain at increasing drop depths along a
//! least-important-first order and watch the metrics respond.

use serde_json::json;

use super::{
    aggregate, aggregate_columns, cell, check_seeds, metric_values, push_metric_cells, run_hp,
    ExperimentOutput, ResultTable, METRIC_NAMES,
};
use crate::catalog::{Variant, LEAST_IMPORTANT_FIRST};
use crate::error::{Error, Result};
use crate::explain::{sequential_drop, DropStep};
use crate::ingest::Snapshot;
use crate::learner::Hyperparams;
use crate::pairset::split::random_holdout;
use crate::pipeline::build_pair_dataset;

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionCell {
    pub drop_count: usize,
    /// One step per seed, all at this drop depth.
    pub steps: Vec<DropStep>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionResult {
    pub variant: Variant,
    pub drop_order: Vec<String>,
    pub drop_counts: Vec<usize>,
    pub train_fraction: f64,
    pub seeds: Vec<u64>,
    pub hyperparams: Hyperparams,
    pub cells: Vec<ReductionCell>,
}

/// Runs the drop study per seed on the full-width dataset with a fresh
/// holdout each time. Without an explicit order, columns leave in the
/// stock least-important-first order.
pub fn reduction(
    snapshot: &Snapshot,
    drop_order: Option<&[String]>,
    drop_counts: &[usize],
    train_fraction: f64,
    seeds: &[u64],
    hp: &Hyperparams,
) -> Result<ReductionResult> {
    check_seeds(seeds)?;
    if drop_counts.is_empty() {
        return Err(Error::InvalidArgument("no drop counts given".into()));
    }
    let order: Vec<String> = match drop_order {
        Some(names) => names.to_vec(),
        None => LEAST_IMPORTANT_FIRST.iter().map(|s| s.to_string()).collect(),
    };
    let variant = Variant::Default;
    let (dataset, _) = build_pair_dataset(snapshot, variant)?;
    let mut per_seed_steps: Vec<Vec<DropStep>> = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let (train, test) = random_holdout(&dataset, train_fraction, seed)?;
        per_seed_steps.push(sequential_drop(
            &train,
            &test,
            &order,
            drop_counts,
            &run_hp(hp, seed),
        )?);
    }
    let cells = drop_counts
        .iter()
        .enumerate()
        .map(|(i, &drop_count)| ReductionCell {
            drop_count,
            steps: per_seed_steps.iter().map(|steps| steps[i].clone()).collect(),
        })
        .collect();
    Ok(ReductionResult {
        variant,
        drop_order: order,
        drop_counts: drop_counts.to_vec(),
        train_fraction,
        seeds: seeds.to_vec(),
        hyperparams: hp.clone(),
        cells,
    })
}

impl ReductionResult {
    pub fn to_output(&self) -> ExperimentOutput {
        let mut per_seed = ResultTable::new({
            let mut h = vec![
                "dropped".to_string(),
                "remaining_width".to_string(),
                "seed".to_string(),
            ];
            h.extend(METRIC_NAMES.iter().map(|s| s.to_string()));
            h
        });
        let mut aggregate_table =
            ResultTable::new(aggregate_columns(&["dropped", "remaining_width"]));
        for depth in &self.cells {
            for (i, step) in depth.steps.iter().enumerate() {
                let mut row = vec![
                    step.dropped.to_string(),
                    step.remaining_width.to_string(),
                    self.seeds[i].to_string(),
                ];
                push_metric_cells(&mut row, &step.metrics);
                per_seed.push(row);
            }
            let mut row = vec![
                depth.drop_count.to_string(),
                depth.steps[0].remaining_width.to_string(),
            ];
            for m in 0..METRIC_NAMES.len() {
                let agg = aggregate(depth.steps.iter().map(|s| metric_values(&s.metrics)[m]));
                row.push(cell(agg.map(|a| a.mean)));
                row.push(cell(agg.map(|a| a.std)));
            }
            aggregate_table.push(row);
        }
        // The drop study retrains inside sequential_drop, so per-step
        // timings are not observable here; the table stays empty.
        let timings = ResultTable::new(["dropped", "seed", "train_seconds", "eval_seconds"]);
        ExperimentOutput {
            name: "reduction".into(),
            config: json!({
                "variant": self.variant,
                "drop_order": self.drop_order,
                "drop_counts": self.drop_counts,
                "train_fraction": self.train_fraction,
                "seeds": self.seeds,
                "hyperparams": self.hyperparams,
            }),
            per_seed,
            aggregate: aggregate_table,
            timings,
        }
    }
}
