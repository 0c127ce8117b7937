//! Feature-set ablation: every variant crossed with both model kinds,
//! each cell repeated over the seeds with a fresh random holdout split.

use serde_json::json;

use super::{
    aggregate_columns, check_seeds, fit_eval, per_seed_columns, push_aggregate_cells, push_report,
    run_hp, timing_columns, EvalReport, ExperimentOutput, ResultTable,
};
use crate::catalog::Variant;
use crate::error::Result;
use crate::ingest::Snapshot;
use crate::learner::{Hyperparams, ModelKind};
use crate::pairset::split::random_holdout;
use crate::pipeline::build_pair_dataset;

#[derive(Debug, Clone, PartialEq)]
pub struct AblationCell {
    pub variant: Variant,
    pub kind: ModelKind,
    /// One report per seed, in seed order.
    pub reports: Vec<EvalReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationResult {
    pub train_fraction: f64,
    pub seeds: Vec<u64>,
    pub hyperparams: Hyperparams,
    pub cells: Vec<AblationCell>,
}

const KINDS: [ModelKind; 2] = [ModelKind::Boosted, ModelKind::Forest];

/// Runs the full variant-by-model grid. Each seed draws its own holdout
/// split, shared by every cell so cells differ only in what they test.
pub fn ablation(
    snapshot: &Snapshot,
    train_fraction: f64,
    seeds: &[u64],
    hp: &Hyperparams,
) -> Result<AblationResult> {
    check_seeds(seeds)?;
    let mut cells = Vec::new();
    for variant in Variant::ALL {
        let (dataset, _) = build_pair_dataset(snapshot, variant)?;
        let mut reports: Vec<Vec<EvalReport>> = vec![Vec::new(); KINDS.len()];
        for &seed in seeds {
            let (train, test) = random_holdout(&dataset, train_fraction, seed)?;
            for (k, &kind) in KINDS.iter().enumerate() {
                reports[k].push(fit_eval(&train, &test, kind, &run_hp(hp, seed))?);
            }
        }
        for (k, kind_reports) in reports.into_iter().enumerate() {
            cells.push(AblationCell {
                variant,
                kind: KINDS[k],
                reports: kind_reports,
            });
        }
    }
    Ok(AblationResult {
        train_fraction,
        seeds: seeds.to_vec(),
        hyperparams: hp.clone(),
        cells,
    })
}

impl AblationResult {
    pub fn to_output(&self) -> ExperimentOutput {
        let keys = ["variant", "model", "seed"];
        let mut per_seed = ResultTable::new(per_seed_columns(&keys));
        let mut timings = ResultTable::new(timing_columns(&keys));
        let mut aggregate = ResultTable::new(aggregate_columns(&["variant", "model"]));
        for cell in &self.cells {
            for (i, report) in cell.reports.iter().enumerate() {
                let mut row = vec![
                    cell.variant.to_string(),
                    cell.kind.to_string(),
                    self.seeds[i].to_string(),
                ];
                let mut timing = row.clone();
                push_report(&mut row, &mut timing, report);
                per_seed.push(row);
                timings.push(timing);
            }
            let mut row = vec![cell.variant.to_string(), cell.kind.to_string()];
            push_aggregate_cells(&mut row, &cell.reports);
            aggregate.push(row);
        }
        ExperimentOutput {
            name: "ablation".into(),
            config: json!({
                "train_fraction": self.train_fraction,
                "seeds": self.seeds,
                "hyperparams": self.hyperparams,
            }),
            per_seed,
            aggregate,
            timings,
        }
    }
}
