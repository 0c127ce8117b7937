//! Feature table cache: one directory holding `manifest.json` (format tag,
//! snapshot date, the full schema, file hashes) and `table.csv` (asn column
//! plus one column per schema entry; missing cells are empty fields).

use std::collections::BTreeMap;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureSchema, FeatureTable};
use crate::fsio::{read_to_string, sha256_hex, write_atomic};
use crate::types::AsnId;

const FORMAT: &str = "peerlens/features/v1";

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    format: String,
    date: NaiveDate,
    rows: usize,
    schema: FeatureSchema,
    files: BTreeMap<String, String>,
}

pub fn save_feature_table(dir: impl AsRef<Path>, table: &FeatureTable) -> Result<()> {
    let dir = dir.as_ref();
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<&str> = std::iter::once("asn")
        .chain(table.schema.columns.iter().map(|c| c.name.as_str()))
        .collect();
    w.write_record(&header)?;
    for (asn, row) in table.rows() {
        let mut record = Vec::with_capacity(row.len() + 1);
        record.push(asn.to_string());
        record.extend(row.iter().map(|cell| match cell {
            None => String::new(),
            Some(v) => format!("{v}"),
        }));
        w.write_record(&record)?;
    }
    let csv_bytes = w.into_inner().expect("writing to Vec cannot fail");

    let manifest = Manifest {
        format: FORMAT.into(),
        date: table.date,
        rows: table.len(),
        schema: table.schema.clone(),
        files: BTreeMap::from([("table.csv".to_string(), sha256_hex(&csv_bytes))]),
    };
    write_atomic(dir.join("table.csv"), &csv_bytes)?;
    let mut manifest_bytes = serde_json::to_vec_pretty(&manifest)?;
    manifest_bytes.push(b'\n');
    write_atomic(dir.join("manifest.json"), &manifest_bytes)
}

pub fn load_feature_table(dir: impl AsRef<Path>) -> Result<FeatureTable> {
    let dir = dir.as_ref();
    let manifest: Manifest = serde_json::from_str(&read_to_string(dir.join("manifest.json"))?)?;
    if manifest.format != FORMAT {
        return Err(Error::SchemaMismatch(format!(
            "unsupported feature cache format {:?}",
            manifest.format
        )));
    }
    let csv_text = read_to_string(dir.join("table.csv"))?;
    if sha256_hex(csv_text.as_bytes()) != manifest.files["table.csv"] {
        return Err(Error::SchemaMismatch(
            "table.csv does not match the hash recorded in manifest.json".into(),
        ));
    }

    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let mut rows = BTreeMap::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record?;
        let parse_err = |msg: String| Error::Parse {
            file: "table.csv".into(),
            line: idx + 2,
            msg,
        };
        if record.len() != manifest.schema.columns.len() + 1 {
            return Err(parse_err(format!(
                "expected {} fields, got {}",
                manifest.schema.columns.len() + 1,
                record.len()
            )));
        }
        let asn: AsnId = record
            .get(0)
            .unwrap_or_default()
            .parse()
            .map_err(|e: Error| parse_err(e.to_string()))?;
        let mut row = Vec::with_capacity(record.len() - 1);
        for field in record.iter().skip(1) {
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
        rows.insert(asn, row);
    }
    if rows.len() != manifest.rows {
        return Err(Error::SchemaMismatch(format!(
            "manifest says {} rows, table.csv has {}",
            manifest.rows,
            rows.len()
        )));
    }
    Ok(FeatureTable {
        schema: manifest.schema,
        date: manifest.date,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Variant;
    use crate::features::build_feature_table;
    use crate::ingest::synth::{synth_snapshot, SynthParams};

    #[test]
    fn feature_table_round_trips() {
        let snap = synth_snapshot(50, 13, &SynthParams::default()).unwrap();
        for variant in Variant::ALL {
            let (table, _) = build_feature_table(&snap, variant).unwrap();
            let dir = tempfile::tempdir().unwrap();
            save_feature_table(dir.path(), &table).unwrap();
            let loaded = load_feature_table(dir.path()).unwrap();
            assert_eq!(table, loaded, "{variant}");
        }
    }

    #[test]
    fn repeated_saves_are_byte_identical() {
        let snap = synth_snapshot(50, 13, &SynthParams::default()).unwrap();
        let (table, _) = build_feature_table(&snap, Variant::Filtered).unwrap();
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        save_feature_table(a.path(), &table).unwrap();
        save_feature_table(b.path(), &table).unwrap();
        for name in ["manifest.json", "table.csv"] {
            assert_eq!(
                std::fs::read(a.path().join(name)).unwrap(),
                std::fs::read(b.path().join(name)).unwrap(),
                "{name}"
            );
        }
    }
}
