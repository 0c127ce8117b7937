//! Model-side subcommands: train, eval, predict, explain.

use std::path::Path;
use std::str::FromStr;

use peerlens::error::{Error, Result};
use peerlens::explain::{gain_importance, shapley};
use peerlens::features::build_feature_table;
use peerlens::fsio::{read_to_string, write_atomic};
use peerlens::ingest::load_snapshot;
use peerlens::learner::{load_model, save_model, train_boosted, train_forest, ModelKind};
use peerlens::metrics::evaluate;
use peerlens::pairset::{load_dataset, PairDataset};
use peerlens::pipeline::build_unlabeled_dataset;
use peerlens::seed;
use peerlens::types::AsnId;
use serde_json::json;

use crate::args::{EvalArgs, ExplainArgs, PredictArgs, TrainArgs};
use crate::commands::display;
use crate::config::{resolve, resolve_hyperparams, resolve_kind, FileConfig};
use crate::run::write_run_manifest;

pub fn train(file: &FileConfig, args: &TrainArgs) -> Result<()> {
    let dataset = load_dataset(&args.dataset)?;
    let kind = resolve_kind(&args.model, &file.model)?;
    let seed = resolve(args.seed, file.seed, 0);
    let hp = resolve_hyperparams(&args.hp, &file.hyperparams, seed)?;
    let model = match kind {
        ModelKind::Boosted => train_boosted(&dataset, &hp)?,
        ModelKind::Forest => train_forest(&dataset, &hp)?,
    };
    save_model(args.out.join("model.json"), &model)?;

    let config = json!({
        "dataset": display(&args.dataset),
        "model": kind.to_string(),
        "hyperparams": hp,
        "out": display(&args.out),
    });
    let report = json!({
        "rows": dataset.len(),
        "width": dataset.width(),
        "variant": dataset.variant.as_str(),
    });
    write_run_manifest(&args.out, "train", &config, Some(&report))
}

pub fn eval(args: &EvalArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let dataset = load_dataset(&args.dataset)?;
    let y_true = dataset
        .y
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("the dataset has no labels to evaluate".into()))?;
    let y_pred = model.predict_labels(&dataset)?;
    let metrics = evaluate(y_true, &y_pred)?;

    let mut bytes = serde_json::to_vec_pretty(&metrics)?;
    bytes.push(b'\n');
    write_atomic(args.out.join("metrics.json"), &bytes)?;

    let config = json!({
        "model": display(&args.model),
        "dataset": display(&args.dataset),
        "out": display(&args.out),
    });
    let report = json!({"rows": dataset.len(), "overall": metrics.overall});
    write_run_manifest(&args.out, "eval", &config, Some(&report))
}

pub fn predict(args: &PredictArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let snapshot = load_snapshot(&args.snapshot)?;
    let pairs = parse_pairs_file(&args.pairs)?;
    if pairs.is_empty() {
        return Err(Error::EmptyInput(format!(
            "no pairs in {}",
            args.pairs.display()
        )));
    }
    let (features, _) = build_feature_table(&snapshot, model.variant)?;
    let dataset = build_unlabeled_dataset(&snapshot, &features, &pairs)?;
    let probabilities = model.predict_proba(&dataset)?;

    let mut csv = String::from("asn_a,asn_b,probability,label\n");
    for ((a, b), p) in dataset.pairs.iter().zip(&probabilities) {
        csv.push_str(&format!("{a},{b},{p},{}\n", u8::from(*p >= 0.5)));
    }
    match &args.out {
        None => {
            print!("{csv}");
            Ok(())
        }
        Some(out) => {
            write_atomic(out.join("predictions.csv"), csv.as_bytes())?;
            let config = json!({
                "model": display(&args.model),
                "snapshot": display(&args.snapshot),
                "pairs": display(&args.pairs),
                "out": display(out),
            });
            let report = json!({
                "pairs": dataset.len(),
                "predicted_peering":
                    probabilities.iter().filter(|&&p| p >= 0.5).count(),
            });
            write_run_manifest(out, "predict", &config, Some(&report))
        }
    }
}

/// One `ASN_A,ASN_B` pair per line; blank lines and # comments skipped.
fn parse_pairs_file(path: &Path) -> Result<Vec<(AsnId, AsnId)>> {
    let text = read_to_string(path)?;
    let mut pairs = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |msg: String| Error::Parse {
            file: path.display().to_string(),
            line: index + 1,
            msg,
        };
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| parse_err(format!("expected ASN_A,ASN_B, got {line:?}")))?;
        let a = AsnId::from_str(a).map_err(|e| parse_err(e.to_string()))?;
        let b = AsnId::from_str(b).map_err(|e| parse_err(e.to_string()))?;
        pairs.push((a, b));
    }
    Ok(pairs)
}

pub fn explain(file: &FileConfig, args: &ExplainArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let dataset = load_dataset(&args.dataset)?;
    if dataset.is_empty() {
        return Err(Error::EmptyInput("the dataset has no rows to explain".into()));
    }
    let n_rows = args.rows.min(dataset.len());
    let n_background = args.background.min(dataset.len());
    let background = background_slice(&dataset, n_background);
    let seed_value = resolve(args.seed, file.seed, 0);

    let mut attributions = String::from("row,asn_a,asn_b,baseline,prediction,column,value\n");
    for row in 0..n_rows {
        let attribution = shapley(
            &model,
            &dataset.x[row],
            &background,
            args.permutations,
            seed::derive(seed_value, "explain/row", row as u64),
        )?;
        let (a, b) = dataset.pairs[row];
        for (column, value) in model.columns.iter().zip(&attribution.values) {
            attributions.push_str(&format!(
                "{row},{a},{b},{},{},{},{value}\n",
                attribution.baseline, attribution.prediction, column.name
            ));
        }
    }
    write_atomic(args.out.join("attributions.csv"), attributions.as_bytes())?;

    let mut importance = String::from("column,gain\n");
    for (column, gain) in model.columns.iter().zip(gain_importance(&model)) {
        importance.push_str(&format!("{},{gain}\n", column.name));
    }
    write_atomic(args.out.join("importance.csv"), importance.as_bytes())?;

    let config = json!({
        "model": display(&args.model),
        "dataset": display(&args.dataset),
        "rows": n_rows,
        "background": n_background,
        "permutations": args.permutations,
        "seed": seed_value,
        "out": display(&args.out),
    });
    write_run_manifest(&args.out, "explain", &config, None)
}

/// The first `n` rows as an unlabeled background dataset.
fn background_slice(dataset: &PairDataset, n: usize) -> PairDataset {
    let indices: Vec<usize> = (0..n).collect();
    let mut background = dataset.take(&indices);
    background.y = None;
    background
}
