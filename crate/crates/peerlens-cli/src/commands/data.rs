//! Data-side subcommands: synth, ingest, features, cones, dataset.

use peerlens::error::Result;
use peerlens::features::{build_feature_table, correlate::correlation_matrix, save_feature_table};
use peerlens::fsio::{read_to_string, write_atomic};
use peerlens::ingest::{
    back_date, build_snapshot, load_snapshot, parse_as_rank, parse_as_rel, parse_peeringdb,
    pops_from_csv, save_snapshot, synth_snapshot, SynthParams,
};
use peerlens::pairset::{save_dataset, split::random_holdout};
use peerlens::pipeline::{build_pair_dataset, PairContext};
use serde_json::json;

use crate::args::{ConesArgs, DatasetArgs, FeaturesArgs, IngestArgs, SynthArgs};
use crate::commands::display;
use crate::config::{resolve, resolve_date, resolve_required, resolve_variant, FileConfig};
use crate::run::write_run_manifest;

pub fn synth(file: &FileConfig, args: &SynthArgs) -> Result<()> {
    let cfg = &file.synth;
    let n = resolve_required(args.n, cfg.n, "--n (config: synth.n)")?;
    let seed = resolve(args.seed, file.seed, 0);
    let defaults = SynthParams::default();
    let params = SynthParams {
        date: resolve_date(args.date, &cfg.date)?.unwrap_or(defaults.date),
        peer_ratio: resolve(args.peer_ratio, cfg.peer_ratio, defaults.peer_ratio),
        multi_home_prob: resolve(
            args.multi_home_prob,
            cfg.multi_home_prob,
            defaults.multi_home_prob,
        ),
        coverage: resolve(args.coverage, cfg.coverage, defaults.coverage),
        affinity_floor: resolve(args.affinity_floor, cfg.affinity_floor, defaults.affinity_floor),
        missing_scale: resolve(args.missing_scale, cfg.missing_scale, defaults.missing_scale),
    };
    let snapshot = synth_snapshot(n, seed, &params)?;

    let config = json!({
        "n": n,
        "seed": seed,
        "date": params.date.to_string(),
        "peer_ratio": params.peer_ratio,
        "multi_home_prob": params.multi_home_prob,
        "coverage": params.coverage,
        "affinity_floor": params.affinity_floor,
        "missing_scale": params.missing_scale,
        "out": display(&args.out),
        "older_out": args.older_out.as_deref().map(display),
    });
    if let Some(older_out) = &args.older_out {
        let older = back_date(&snapshot, seed)?;
        save_snapshot(older_out, &older)?;
        let report = json!({"counts": older.counts(), "date": older.date.to_string()});
        write_run_manifest(older_out, "synth", &config, Some(&report))?;
    }
    save_snapshot(&args.out, &snapshot)?;
    let report = json!({"counts": snapshot.counts()});
    write_run_manifest(&args.out, "synth", &config, Some(&report))
}

pub fn ingest(args: &IngestArgs) -> Result<()> {
    let (as_rank, rank_warnings) = parse_as_rank(&read_to_string(&args.as_rank)?)?;
    let (peeringdb, pdb_warnings) = parse_peeringdb(&read_to_string(&args.peeringdb)?)?;
    let parsed = parse_as_rel(&read_to_string(&args.relationships)?)?;
    let pops = match &args.pops {
        Some(path) => Some(pops_from_csv(&read_to_string(path)?)?),
        None => None,
    };
    let build = build_snapshot(args.date, as_rank, peeringdb, parsed.records, pops)?;
    save_snapshot(&args.out, &build.snapshot)?;

    let config = json!({
        "as_rank": display(&args.as_rank),
        "peeringdb": display(&args.peeringdb),
        "relationships": display(&args.relationships),
        "pops": args.pops.as_deref().map(display),
        "date": args.date.to_string(),
        "out": display(&args.out),
    });
    let report = json!({
        "input_counts": build.input_counts,
        "counts": build.snapshot.counts(),
        "as_rank_warnings": rank_warnings.len(),
        "peeringdb_warnings": pdb_warnings.len(),
        "rejected_relationship_lines": parsed.rejected.len(),
        "warnings": build.warnings,
    });
    write_run_manifest(&args.out, "ingest", &config, Some(&report))
}

pub fn features(file: &FileConfig, args: &FeaturesArgs) -> Result<()> {
    let variant = resolve_variant(&args.variant, &file.variant)?;
    let snapshot = load_snapshot(&args.snapshot)?;
    let (table, warnings) = build_feature_table(&snapshot, variant)?;
    save_feature_table(&args.out, &table)?;
    if args.correlation {
        let matrix = correlation_matrix(&table);
        write_atomic(args.out.join("correlation.csv"), &matrix.to_csv())?;
    }

    let config = json!({
        "snapshot": display(&args.snapshot),
        "variant": variant.as_str(),
        "correlation": args.correlation,
        "out": display(&args.out),
    });
    let report = json!({"ases": table.len(), "width": table.width(), "warnings": warnings.len()});
    write_run_manifest(&args.out, "features", &config, Some(&report))
}

pub fn cones(args: &ConesArgs) -> Result<()> {
    let snapshot = load_snapshot(&args.snapshot)?;
    let context = PairContext::build(&snapshot)?;

    let mut csv = String::from("asn,cone_size\n");
    for &asn in &snapshot.common_asns {
        csv.push_str(&format!("{},{}\n", asn, context.cones.cone(asn)?.len()));
    }
    write_atomic(args.out.join("cones.csv"), csv.as_bytes())?;

    // Provider links cut to break cycles; empty on well-formed data.
    let mut broken = String::from("provider,customer\n");
    for (provider, customer) in &context.cones.broken_edges {
        broken.push_str(&format!("{provider},{customer}\n"));
    }
    write_atomic(args.out.join("broken_edges.csv"), broken.as_bytes())?;

    let config = json!({"snapshot": display(&args.snapshot), "out": display(&args.out)});
    let report = json!({
        "ases": snapshot.common_asns.len(),
        "broken_edges": context.cones.broken_edges.len(),
    });
    write_run_manifest(&args.out, "cones", &config, Some(&report))
}

pub fn dataset(file: &FileConfig, args: &DatasetArgs) -> Result<()> {
    let variant = resolve_variant(&args.variant, &file.variant)?;
    let snapshot = load_snapshot(&args.snapshot)?;
    let (dataset, warnings) = build_pair_dataset(&snapshot, variant)?;

    let seed = resolve(args.seed, file.seed, 0);
    let mut report = json!({
        "rows": dataset.len(),
        "width": dataset.width(),
        "positives": dataset.y.as_ref().map(|y| y.iter().filter(|&&l| l == 1).count()),
        "warnings": warnings.len(),
    });
    match args.split {
        None => save_dataset(&args.out, &dataset)?,
        Some(fraction) => {
            let (train, test) = random_holdout(&dataset, fraction, seed)?;
            save_dataset(args.out.join("train"), &train)?;
            save_dataset(args.out.join("test"), &test)?;
            report["train_rows"] = json!(train.len());
            report["test_rows"] = json!(test.len());
        }
    }

    let config = json!({
        "snapshot": display(&args.snapshot),
        "variant": variant.as_str(),
        "split": args.split,
        "seed": seed,
        "out": display(&args.out),
    });
    write_run_manifest(&args.out, "dataset", &config, Some(&report))
}

