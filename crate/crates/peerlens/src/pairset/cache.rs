//! On-disk form of a pair dataset: `dataset.csv` plus a `manifest.json`
//! recording the column structure, fingerprint, and a content hash.
//! Saves are byte-identical for equal datasets; loads verify the hash and
//! the fingerprint before returning anything.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::catalog::Variant;
use crate::error::{Error, Result};
use crate::features::SchemaColumn;
use crate::fsio::{read_to_string, sha256_hex, write_atomic};
use crate::pairset::PairDataset;
use crate::types::AsnId;

const FORMAT: &str = "peerlens/dataset/v1";

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    format: String,
    variant: Variant,
    date: NaiveDate,
    rows: usize,
    labeled: bool,
    fingerprint: String,
    columns: Vec<SchemaColumn>,
    files: BTreeMap<String, String>,
}

pub fn save_dataset(dir: impl AsRef<Path>, dataset: &PairDataset) -> Result<()> {
    let dir = dir.as_ref();
    let labeled = dataset.y.is_some();

    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["asn_a".to_string(), "asn_b".to_string()];
    if labeled {
        header.push("label".to_string());
    }
    header.extend(dataset.columns.iter().map(|c| c.name.clone()));
    w.write_record(&header)?;
    for (i, row) in dataset.x.iter().enumerate() {
        let (a, b) = dataset.pairs[i];
        let mut record = Vec::with_capacity(row.len() + 3);
        record.push(a.to_string());
        record.push(b.to_string());
        if let Some(y) = &dataset.y {
            record.push(y[i].to_string());
        }
        record.extend(row.iter().map(|cell| match cell {
            None => String::new(),
            Some(v) => format!("{v}"),
        }));
        w.write_record(&record)?;
    }
    let csv_bytes = w.into_inner().expect("writing to Vec cannot fail");

    let manifest = Manifest {
        format: FORMAT.into(),
        variant: dataset.variant,
        date: dataset.date,
        rows: dataset.len(),
        labeled,
        fingerprint: dataset.fingerprint().to_string(),
        columns: dataset.columns.clone(),
        files: BTreeMap::from([("dataset.csv".to_string(), sha256_hex(&csv_bytes))]),
    };
    write_atomic(dir.join("dataset.csv"), &csv_bytes)?;
    let mut manifest_bytes = serde_json::to_vec_pretty(&manifest)?;
    manifest_bytes.push(b'\n');
    write_atomic(dir.join("manifest.json"), &manifest_bytes)
}

pub fn load_dataset(dir: impl AsRef<Path>) -> Result<PairDataset> {
    let dir = dir.as_ref();
    let manifest: Manifest = serde_json::from_str(&read_to_string(dir.join("manifest.json"))?)?;
    if manifest.format != FORMAT {
        return Err(Error::SchemaMismatch(format!(
            "unsupported dataset cache format {:?}",
            manifest.format
        )));
    }
    let csv_text = read_to_string(dir.join("dataset.csv"))?;
    if sha256_hex(csv_text.as_bytes()) != manifest.files["dataset.csv"] {
        return Err(Error::SchemaMismatch(
            "dataset.csv does not match the hash recorded in manifest.json".into(),
        ));
    }

    let meta_fields = if manifest.labeled { 3 } else { 2 };
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let mut pairs = Vec::with_capacity(manifest.rows);
    let mut x = Vec::with_capacity(manifest.rows);
    let mut y = manifest.labeled.then(Vec::new);
    for (idx, record) in reader.records().enumerate() {
        let record = record?;
        let parse_err = |msg: String| Error::Parse {
            file: "dataset.csv".into(),
            line: idx + 2,
            msg,
        };
        if record.len() != manifest.columns.len() + meta_fields {
            return Err(parse_err(format!(
                "expected {} fields, got {}",
                manifest.columns.len() + meta_fields,
                record.len()
            )));
        }
        let asn = |pos: usize| -> Result<AsnId> {
            record
                .get(pos)
                .unwrap_or_default()
                .parse()
                .map_err(|e: Error| parse_err(e.to_string()))
        };
        pairs.push((asn(0)?, asn(1)?));
        if let Some(y) = &mut y {
            let label: u8 = record
                .get(2)
                .unwrap_or_default()
                .parse()
                .map_err(|_| parse_err("label is not 0 or 1".into()))?;
            if label > 1 {
                return Err(parse_err(format!("label is {label}, not 0 or 1")));
            }
            y.push(label);
        }
        let mut row = Vec::with_capacity(manifest.columns.len());
        for field in record.iter().skip(meta_fields) {
            row.push(if field.is_empty() {
                None
            } else {
                Some(
                    field
                        .parse::<f64>()
                        .map_err(|_| parse_err(format!("{field:?} is not a number")))?,
                )
            });
        }
        x.push(row);
    }
    if x.len() != manifest.rows {
        return Err(Error::SchemaMismatch(format!(
            "manifest says {} rows, dataset.csv has {}",
            manifest.rows,
            x.len()
        )));
    }

    let dataset = PairDataset {
        variant: manifest.variant,
        date: manifest.date,
        columns: manifest.columns,
        pairs,
        x,
        y,
    };
    if dataset.fingerprint().as_hex() != manifest.fingerprint {
        return Err(Error::SchemaMismatch(
            "manifest fingerprint does not match the column structure".into(),
        ));
    }
    Ok(dataset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::build_feature_table;
    use crate::ingest::synth::{synth_snapshot, SynthParams};
    use crate::pairset::{assemble, assemble_pairs};

    #[test]
    fn labeled_dataset_round_trips() {
        let snap = synth_snapshot(50, 13, &SynthParams::default()).unwrap();
        let (features, _) = build_feature_table(&snap, Variant::Filtered).unwrap();
        let ds = assemble(&features, None, &snap.relationships).unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_dataset(dir.path(), &ds).unwrap();
        assert_eq!(load_dataset(dir.path()).unwrap(), ds);
    }

    #[test]
    fn unlabeled_dataset_round_trips() {
        let snap = synth_snapshot(50, 13, &SynthParams::default()).unwrap();
        let (features, _) = build_feature_table(&snap, Variant::Filtered).unwrap();
        let pairs: Vec<_> = snap.relationships.iter().map(|r| r.pair_key()).take(5).collect();
        let ds = assemble_pairs(&features, None, &pairs, None).unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_dataset(dir.path(), &ds).unwrap();
        let loaded = load_dataset(dir.path()).unwrap();
        assert_eq!(loaded, ds);
        assert!(loaded.y.is_none());
    }

    #[test]
    fn repeated_saves_are_byte_identical() {
        let snap = synth_snapshot(50, 13, &SynthParams::default()).unwrap();
        let (features, _) = build_feature_table(&snap, Variant::Filtered).unwrap();
        let ds = assemble(&features, None, &snap.relationships).unwrap();
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        save_dataset(a.path(), &ds).unwrap();
        save_dataset(b.path(), &ds).unwrap();
        for name in ["manifest.json", "dataset.csv"] {
            assert_eq!(
                std::fs::read(a.path().join(name)).unwrap(),
                std::fs::read(b.path().join(name)).unwrap(),
                "{name}"
            );
        }
    }

    #[test]
    fn tampered_csv_is_rejected() {
        let snap = synth_snapshot(40, 13, &SynthParams::default()).unwrap();
        let (features, _) = build_feature_table(&snap, Variant::Filtered).unwrap();
        let ds = assemble(&features, None, &snap.relationships).unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_dataset(dir.path(), &ds).unwrap();
        let path = dir.path().join("dataset.csv");
        let mut text = std::fs::read_to_string(&path).unwrap();
        text.push('\n');
        std::fs::write(&path, text).unwrap();
        assert!(matches!(
            load_dataset(dir.path()),
            Err(Error::SchemaMismatch(_))
        ));
    }
}
