//! The experiment subcommand: resolve shared knobs, run one driver from
//! the suite, save its results directory, optionally melt the per-seed
//! table into a plot-ready long format.

use std::path::Path;

use peerlens::error::Result;
use peerlens::experiments::{
    ablation, missing_robustness, reduction, sampling, save_experiment, temporal, train_size,
    transfer, unknown_pairs, ExperimentOutput, Rebalance, ResultTable, METRIC_NAMES,
};
use peerlens::fsio::write_atomic;
use peerlens::ingest::load_snapshot;
use peerlens::learner::Hyperparams;
use serde_json::json;

use crate::args::{ExpCommon, ExperimentCmd};
use crate::commands::display;
use crate::config::{
    expand_seeds, parse_anchors, parse_counts, parse_fractions, parse_names, parse_strategies,
    resolve, resolve_hyperparams, resolve_kind, resolve_variant, FileConfig,
};
use crate::run::write_run_manifest;

pub fn experiment(file: &FileConfig, cmd: &ExperimentCmd) -> Result<()> {
    match cmd {
        ExperimentCmd::Ablation(args) => {
            let (runs, cli) = setup(file, &args.common)?;
            let snapshot = load_snapshot(&args.common.snapshot)?;
            let fraction = resolve(args.train_fraction, file.train_fraction, 0.5);
            let result = ablation(&snapshot, fraction, &runs.seeds, &runs.hp)?;
            finish(&args.common.out, args.common.long, cli, &result.to_output())
        }
        ExperimentCmd::Sampling(args) => {
            let (runs, cli) = setup(file, &args.common)?;
            let snapshot = load_snapshot(&args.common.snapshot)?;
            let variant = resolve_variant(&args.arm.variant, &file.variant)?;
            let kind = resolve_kind(&args.arm.model, &file.model)?;
            let fraction = resolve(args.train_fraction, file.train_fraction, 0.5);
            let strategies = match (&args.strategies, &file.experiment.strategies) {
                (Some(list), _) => {
                    let names = parse_names(list);
                    parse_strategies(names.iter().map(String::as_str))?
                }
                (None, Some(names)) => parse_strategies(names.iter().map(String::as_str))?,
                (None, None) => Rebalance::standard(),
            };
            let result = sampling(
                &snapshot, variant, kind, fraction, &strategies, &runs.seeds, &runs.hp,
            )?;
            finish(&args.common.out, args.common.long, cli, &result.to_output())
        }
        ExperimentCmd::TrainSize(args) => {
            let (runs, cli) = setup(file, &args.common)?;
            let snapshot = load_snapshot(&args.common.snapshot)?;
            let variant = resolve_variant(&args.arm.variant, &file.variant)?;
            let kind = resolve_kind(&args.arm.model, &file.model)?;
            let fractions = match (&args.fractions, &file.experiment.train_size_fractions) {
                (Some(list), _) => parse_fractions(list)?,
                (None, Some(list)) => list.clone(),
                (None, None) => vec![0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7],
            };
            let result =
                train_size(&snapshot, variant, kind, &fractions, &runs.seeds, &runs.hp)?;
            finish(&args.common.out, args.common.long, cli, &result.to_output())
        }
        ExperimentCmd::Transfer(args) => {
            let (runs, cli) = setup(file, &args.common)?;
            let snapshot = load_snapshot(&args.common.snapshot)?;
            let variant = resolve_variant(&args.arm.variant, &file.variant)?;
            let kind = resolve_kind(&args.arm.model, &file.model)?;
            let result = transfer(&snapshot, variant, kind, &runs.seeds, &runs.hp)?;
            finish(&args.common.out, args.common.long, cli, &result.to_output())
        }
        ExperimentCmd::Temporal(args) => {
            let (runs, mut cli) = setup(file, &args.common)?;
            let current = load_snapshot(&args.common.snapshot)?;
            let older = load_snapshot(&args.older_snapshot)?;
            cli["older_snapshot"] = json!(display(&args.older_snapshot));
            let variant = resolve_variant(&args.arm.variant, &file.variant)?;
            let kind = resolve_kind(&args.arm.model, &file.model)?;
            let result = temporal(&current, &older, variant, kind, &runs.seeds, &runs.hp)?;
            finish(&args.common.out, args.common.long, cli, &result.to_output())
        }
        ExperimentCmd::Missing(args) => {
            let (runs, cli) = setup(file, &args.common)?;
            let snapshot = load_snapshot(&args.common.snapshot)?;
            let variant = resolve_variant(&args.arm.variant, &file.variant)?;
            let kind = resolve_kind(&args.arm.model, &file.model)?;
            let fraction = resolve(args.train_fraction, file.train_fraction, 0.5);
            let fractions = match (&args.fractions, &file.experiment.missing_fractions) {
                (Some(list), _) => parse_fractions(list)?,
                (None, Some(list)) => list.clone(),
                (None, None) => vec![0.1, 0.2, 0.3, 0.4, 0.5],
            };
            let result = missing_robustness(
                &snapshot, variant, kind, &fractions, fraction, &runs.seeds, &runs.hp,
            )?;
            finish(&args.common.out, args.common.long, cli, &result.to_output())
        }
        ExperimentCmd::Unknown(args) => {
            let snapshot = load_snapshot(&args.snapshot)?;
            let variant = resolve_variant(&args.arm.variant, &file.variant)?;
            let kind = resolve_kind(&args.arm.model, &file.model)?;
            let master = resolve(args.seed, file.seed, 0);
            let hp = resolve_hyperparams(&args.hp, &file.hyperparams, master)?;
            let anchors = match &args.anchors {
                Some(list) => Some(parse_anchors(list)?),
                None => None,
            };
            let count = resolve(args.anchor_count, file.experiment.anchor_count, 20);
            let result =
                unknown_pairs(&snapshot, variant, kind, anchors.as_deref(), count, &hp)?;
            let cli = json!({
                "snapshot": display(&args.snapshot),
                "seed": master,
                "anchors": anchors.map(|list| {
                    list.iter().map(|asn| asn.get()).collect::<Vec<_>>()
                }),
                "anchor_count": count,
                "out": display(&args.out),
            });
            finish(&args.out, false, cli, &result.to_output())
        }
        ExperimentCmd::Reduction(args) => {
            let (runs, cli) = setup(file, &args.common)?;
            let snapshot = load_snapshot(&args.common.snapshot)?;
            let fraction = resolve(args.train_fraction, file.train_fraction, 0.5);
            let order = match (&args.drop_order, &file.experiment.drop_order) {
                (Some(list), _) => Some(parse_names(list)),
                (None, Some(list)) => Some(list.clone()),
                (None, None) => None,
            };
            let counts = match (&args.drop_counts, &file.experiment.drop_counts) {
                (Some(list), _) => parse_counts(list)?,
                (None, Some(list)) => list.clone(),
                (None, None) => vec![0, 8, 16, 24, 32, 40],
            };
            let result = reduction(
                &snapshot, order.as_deref(), &counts, fraction, &runs.seeds, &runs.hp,
            )?;
            finish(&args.common.out, args.common.long, cli, &result.to_output())
        }
    }
}

struct Runs {
    seeds: Vec<u64>,
    hp: Hyperparams,
}

/// Shared resolution for repeated experiments: master seed, derived run
/// seeds, hyperparameters, and the CLI-level config echo.
fn setup(file: &FileConfig, common: &ExpCommon) -> Result<(Runs, serde_json::Value)> {
    let master = resolve(common.seed, file.seed, 0);
    let count = resolve(common.seeds, file.seeds, 5);
    let seeds = expand_seeds(master, count);
    let hp = resolve_hyperparams(&common.hp, &file.hyperparams, master)?;
    let cli = json!({
        "snapshot": display(&common.snapshot),
        "seed": master,
        "seeds": count,
        "long": common.long,
        "out": display(&common.out),
    });
    Ok((Runs { seeds, hp }, cli))
}

fn finish(
    out: &Path,
    long: bool,
    cli: serde_json::Value,
    output: &ExperimentOutput,
) -> Result<()> {
    save_experiment(out, output)?;
    if long {
        write_atomic(out.join("long.csv"), &melt(&output.per_seed).to_csv()?)?;
    }
    let config = json!({
        "experiment": output.name,
        "cli": cli,
        "config": output.config,
    });
    write_run_manifest(out, "experiment", &config, None)
}

/// Melts a per-seed table: metric columns become (metric, value) rows
/// under the remaining key columns; empty cells are dropped.
fn melt(table: &ResultTable) -> ResultTable {
    let (metric_cols, key_cols): (Vec<usize>, Vec<usize>) =
        (0..table.header.len()).partition(|&i| METRIC_NAMES.contains(&table.header[i].as_str()));
    let mut header: Vec<String> = key_cols.iter().map(|&i| table.header[i].clone()).collect();
    header.extend(["metric".to_string(), "value".to_string()]);
    let mut long = ResultTable::new(header);
    for row in &table.rows {
        for &m in &metric_cols {
            if row[m].is_empty() {
                continue;
            }
            let mut out_row: Vec<String> = key_cols.iter().map(|&i| row[i].clone()).collect();
            out_row.extend([table.header[m].clone(), row[m].clone()]);
            long.push(out_row);
        }
    }
    long
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn melt_moves_metrics_into_rows_and_drops_empty_cells() {
        let mut table = ResultTable::new(["variant", "seed", "overall", "balanced"]);
        table.push(vec!["optimum".into(), "1".into(), "0.9".into(), String::new()]);
        table.push(vec!["optimum".into(), "2".into(), "0.8".into(), "0.7".into()]);
        let long = melt(&table);
        assert_eq!(long.header, ["variant", "seed", "metric", "value"]);
        assert_eq!(
            long.rows,
            vec![
                vec!["optimum", "1", "overall", "0.9"],
                vec!["optimum", "2", "overall", "0.8"],
                vec!["optimum", "2", "balanced", "0.7"],
            ]
            .into_iter()
            .map(|row| row.into_iter().map(String::from).collect::<Vec<_>>())
            .collect::<Vec<_>>()
        );
    }
}
