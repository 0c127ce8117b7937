//! Learning curve: accuracy as a function of the training fraction.

use serde_json::json;

use super::{
    aggregate_columns, check_seeds, fit_eval, per_seed_columns, push_aggregate_cells, push_report,
    run_hp, timing_columns, EvalReport, ExperimentOutput, ResultTable,
};
use crate::catalog::Variant;
use crate::error::{Error, Result};
use crate::ingest::Snapshot;
use crate::learner::{Hyperparams, ModelKind};
use crate::pairset::split::random_holdout;
use crate::pipeline::build_pair_dataset;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainSizeCell {
    pub train_fraction: f64,
    pub reports: Vec<EvalReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainSizeResult {
    pub variant: Variant,
    pub kind: ModelKind,
    pub fractions: Vec<f64>,
    pub seeds: Vec<u64>,
    pub hyperparams: Hyperparams,
    pub cells: Vec<TrainSizeCell>,
}

/// Sweeps the holdout fraction: each cell trains on `fraction` of the
/// pairs and tests on the rest, repeated per seed.
pub fn train_size(
    snapshot: &Snapshot,
    variant: Variant,
    kind: ModelKind,
    fractions: &[f64],
    seeds: &[u64],
    hp: &Hyperparams,
) -> Result<TrainSizeResult> {
    check_seeds(seeds)?;
    if fractions.is_empty() {
        return Err(Error::InvalidArgument("no train fractions given".into()));
    }
    let (dataset, _) = build_pair_dataset(snapshot, variant)?;
    let mut cells = Vec::with_capacity(fractions.len());
    for &fraction in fractions {
        let mut reports = Vec::with_capacity(seeds.len());
        for &seed in seeds {
            let (train, test) = random_holdout(&dataset, fraction, seed)?;
            reports.push(fit_eval(&train, &test, kind, &run_hp(hp, seed))?);
        }
        cells.push(TrainSizeCell {
            train_fraction: fraction,
            reports,
        });
    }
    Ok(TrainSizeResult {
        variant,
        kind,
        fractions: fractions.to_vec(),
        seeds: seeds.to_vec(),
        hyperparams: hp.clone(),
        cells,
    })
}

impl TrainSizeResult {
    pub fn to_output(&self) -> ExperimentOutput {
        let keys = ["train_fraction", "seed"];
        let mut per_seed = ResultTable::new(per_seed_columns(&keys));
        let mut timings = ResultTable::new(timing_columns(&keys));
        let mut aggregate = ResultTable::new(aggregate_columns(&["train_fraction"]));
        for cell in &self.cells {
            for (i, report) in cell.reports.iter().enumerate() {
                let mut row = vec![cell.train_fraction.to_string(), self.seeds[i].to_string()];
                let mut timing = row.clone();
                push_report(&mut row, &mut timing, report);
                per_seed.push(row);
                timings.push(timing);
            }
            let mut row = vec![cell.train_fraction.to_string()];
            push_aggregate_cells(&mut row, &cell.reports);
            aggregate.push(row);
        }
        ExperimentOutput {
            name: "train_size".into(),
            config: json!({
                "variant": self.variant,
                "model": self.kind,
                "fractions": self.fractions,
                "seeds": self.seeds,
                "hyperparams": self.hyperparams,
            }),
            per_seed,
            aggregate,
            timings,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::synth::{synth_snapshot, SynthParams};

    #[test]
    fn train_counts_scale_with_fraction() {
        let snap = synth_snapshot(70, 6, &SynthParams::default()).unwrap();
        let hp = Hyperparams {
            n_trees: 10,
            ..Hyperparams::default()
        };
        let result = train_size(
            &snap,
            Variant::Filtered,
            ModelKind::Boosted,
            &[0.2, 0.5, 0.8],
            &[1, 2],
            &hp,
        )
        .unwrap();
        let n = result.cells[0].reports[0].n_train + result.cells[0].reports[0].n_test;
        for (cell, &fraction) in result.cells.iter().zip(&[0.2, 0.5, 0.8]) {
            for report in &cell.reports {
                assert_eq!(report.n_train, (n as f64 * fraction).floor() as usize);
                assert_eq!(report.n_train + report.n_test, n);
            }
        }
    }

    #[test]
    fn output_orders_cells_by_given_fractions() {
        let snap = synth_snapshot(70, 6, &SynthParams::default()).unwrap();
        let hp = Hyperparams {
            n_trees: 10,
            ..Hyperparams::default()
        };
        let result = train_size(
            &snap,
            Variant::Filtered,
            ModelKind::Boosted,
            &[0.7, 0.3],
            &[1],
            &hp,
        )
        .unwrap();
        let out = result.to_output();
        assert_eq!(out.aggregate.rows[0][0], "0.7");
        assert_eq!(out.aggregate.rows[1][0], "0.3");
    }
}
