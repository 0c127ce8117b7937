//! Robustness to incomplete data: blank a growing fraction of every
//! feature column, then train and evaluate on the degraded dataset.

use serde_json::json;

use super::{
    aggregate_columns, check_seeds, fit_eval, per_seed_columns, push_aggregate_cells, push_report,
    run_hp, timing_columns, EvalReport, ExperimentOutput, ResultTable,
};
use crate::catalog::Variant;
use crate::error::{Error, Result};
use crate::ingest::Snapshot;
use crate::learner::{Hyperparams, ModelKind};
use crate::pairset::missing::inject_missing;
use crate::pairset::split::random_holdout;
use crate::pipeline::build_pair_dataset;

#[derive(Debug, Clone, PartialEq)]
pub struct MissingCell {
    pub fraction: f64,
    pub reports: Vec<EvalReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissingResult {
    pub variant: Variant,
    pub kind: ModelKind,
    pub fractions: Vec<f64>,
    pub train_fraction: f64,
    pub seeds: Vec<u64>,
    pub hyperparams: Hyperparams,
    pub cells: Vec<MissingCell>,
}

/// Sweeps the injected-missingness fraction. Degradation happens before
/// the split, so both train and test rows lose values, as they would if
/// the sources themselves were sparser.
pub fn missing_robustness(
    snapshot: &Snapshot,
    variant: Variant,
    kind: ModelKind,
    fractions: &[f64],
    train_fraction: f64,
    seeds: &[u64],
    hp: &Hyperparams,
) -> Result<MissingResult> {
    check_seeds(seeds)?;
    if fractions.is_empty() {
        return Err(Error::InvalidArgument("no missing fractions given".into()));
    }
    let (dataset, _) = build_pair_dataset(snapshot, variant)?;
    let mut cells = Vec::with_capacity(fractions.len());
    for &fraction in fractions {
        let mut reports = Vec::with_capacity(seeds.len());
        for &seed in seeds {
            let degraded = inject_missing(&dataset, fraction, seed)?;
            let (train, test) = random_holdout(&degraded, train_fraction, seed)?;
            reports.push(fit_eval(&train, &test, kind, &run_hp(hp, seed))?);
        }
        cells.push(MissingCell { fraction, reports });
    }
    Ok(MissingResult {
        variant,
        kind,
        fractions: fractions.to_vec(),
        train_fraction,
        seeds: seeds.to_vec(),
        hyperparams: hp.clone(),
        cells,
    })
}

impl MissingResult {
    pub fn to_output(&self) -> ExperimentOutput {
        let keys = ["missing_fraction", "seed"];
        let mut per_seed = ResultTable::new(per_seed_columns(&keys));
        let mut timings = ResultTable::new(timing_columns(&keys));
        let mut aggregate = ResultTable::new(aggregate_columns(&["missing_fraction"]));
        for cell in &self.cells {
            for (i, report) in cell.reports.iter().enumerate() {
                let mut row = vec![cell.fraction.to_string(), self.seeds[i].to_string()];
                let mut timing = row.clone();
                push_report(&mut row, &mut timing, report);
                per_seed.push(row);
                timings.push(timing);
            }
            let mut row = vec![cell.fraction.to_string()];
            push_aggregate_cells(&mut row, &cell.reports);
            aggregate.push(row);
        }
        ExperimentOutput {
            name: "missing".into(),
            config: json!({
                "variant": self.variant,
                "model": self.kind,
                "fractions": self.fractions,
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
