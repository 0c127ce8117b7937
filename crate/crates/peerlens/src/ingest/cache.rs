//! On-disk snapshot cache.
//!
//! Layout of a snapshot directory:
//!
//! ```text
//! manifest.json        format tag, date, counts, per-file sha256
//! as_rank.csv          per-AS table, catalog column order
//! peeringdb_net.csv    per-AS table, catalog column order
//! relationships.csv    asn_a,asn_b,kind
//! pops.csv             asn,pop          (only with explicit memberships)
//! ```
//!
//! Cells are rendered by column kind: missing is the empty field, reals use
//! the shortest round-tripping decimal form, timestamps are RFC 3339 UTC.
//! Because snapshots are canonical (sorted) in memory, saving the same
//! snapshot twice produces byte-identical files.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::catalog::{ColumnDef, AS_RANK_COLUMNS, PEERINGDB_COLUMNS};
use crate::error::{Error, Result};
use crate::fsio::{read_to_string, sha256_hex, write_atomic};
use crate::ingest::snapshot::{build_snapshot, Snapshot, SnapshotCounts};
use crate::ingest::table::{SourceRecord, SourceTable};
use crate::types::{
    format_timestamp, parse_timestamp, AsnId, ColumnKind, PopId, PopMemberships, RelKind,
    RelationshipRecord, Value,
};

const FORMAT: &str = "peerlens/snapshot/v1";

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    format: String,
    date: NaiveDate,
    counts: SnapshotCounts,
    /// file name -> sha256 of its bytes, for corruption detection
    files: BTreeMap<String, String>,
}

pub fn save_snapshot(dir: impl AsRef<Path>, snapshot: &Snapshot) -> Result<()> {
    let dir = dir.as_ref();
    let mut files = BTreeMap::new();

    let mut emit = |name: &str, bytes: Vec<u8>| -> Result<()> {
        files.insert(name.to_string(), sha256_hex(&bytes));
        write_atomic(dir.join(name), &bytes)
    };

    emit("as_rank.csv", table_to_csv(&snapshot.as_rank)?)?;
    emit("peeringdb_net.csv", table_to_csv(&snapshot.peeringdb)?)?;
    emit(
        "relationships.csv",
        relationships_to_csv(&snapshot.relationships)?,
    )?;
    if let Some(pops) = &snapshot.pops {
        emit("pops.csv", pops_to_csv(pops)?)?;
    }

    let manifest = Manifest {
        format: FORMAT.into(),
        date: snapshot.date,
        counts: snapshot.counts(),
        files,
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest)?;
    bytes.push(b'\n');
    write_atomic(dir.join("manifest.json"), &bytes)
}

pub fn load_snapshot(dir: impl AsRef<Path>) -> Result<Snapshot> {
    let dir = dir.as_ref();
    let manifest: Manifest = serde_json::from_str(&read_to_string(dir.join("manifest.json"))?)?;
    if manifest.format != FORMAT {
        return Err(Error::SnapshotMismatch(format!(
            "unsupported snapshot format {:?} in {}",
            manifest.format,
            dir.display()
        )));
    }

    let mut contents: BTreeMap<&str, String> = BTreeMap::new();
    for (name, expected_hash) in &manifest.files {
        let text = read_to_string(dir.join(name))?;
        if sha256_hex(text.as_bytes()) != *expected_hash {
            return Err(Error::SnapshotMismatch(format!(
                "{name} does not match the hash recorded in manifest.json"
            )));
        }
        let key = match name.as_str() {
            "as_rank.csv" => "as_rank",
            "peeringdb_net.csv" => "peeringdb",
            "relationships.csv" => "relationships",
            "pops.csv" => "pops",
            other => {
                return Err(Error::SnapshotMismatch(format!(
                    "unexpected file {other} in manifest"
                )))
            }
        };
        contents.insert(key, text);
    }

    let missing = |what: &str| Error::SnapshotMismatch(format!("{what} missing from manifest"));
    let as_rank = table_from_csv(
        contents.get("as_rank").ok_or_else(|| missing("as_rank.csv"))?,
        &AS_RANK_COLUMNS,
        "as_rank.csv",
    )?;
    let peeringdb = table_from_csv(
        contents
            .get("peeringdb")
            .ok_or_else(|| missing("peeringdb_net.csv"))?,
        &PEERINGDB_COLUMNS,
        "peeringdb_net.csv",
    )?;
    let relationships = relationships_from_csv(
        contents
            .get("relationships")
            .ok_or_else(|| missing("relationships.csv"))?,
    )?;
    let pops = contents.get("pops").map(|text| pops_from_csv(text)).transpose()?;

    // Rebuilding through the canonical constructor revalidates every
    // snapshot invariant; cached files are already canonical, so this is
    // warning-free and order-preserving.
    let build = build_snapshot(manifest.date, as_rank, peeringdb, relationships, pops)?;
    let counts = build.snapshot.counts();
    if counts != manifest.counts {
        return Err(Error::SnapshotMismatch(format!(
            "counts in manifest.json ({:?}) do not match the files ({counts:?})",
            manifest.counts
        )));
    }
    Ok(build.snapshot)
}

fn cell_to_csv(value: &Value) -> String {
    match value {
        Value::Missing => String::new(),
        Value::Int(v) => v.to_string(),
        Value::Real(v) => {
            debug_assert!(v.is_finite());
            format!("{v}")
        }
        Value::Bool(v) => v.to_string(),
        Value::Text(v) => v.clone(),
        Value::Timestamp(secs) => format_timestamp(*secs),
    }
}

fn cell_from_csv(field: &str, kind: ColumnKind) -> std::result::Result<Value, String> {
    if field.is_empty() {
        return Ok(Value::Missing);
    }
    match kind {
        ColumnKind::Numeric => {
            if let Ok(i) = field.parse::<i64>() {
                Ok(Value::Int(i))
            } else {
                field
                    .parse::<f64>()
                    .map(Value::Real)
                    .map_err(|_| format!("{field:?} is not numeric"))
            }
        }
        ColumnKind::Boolean => match field {
            "true" => Ok(Value::Bool(true)),
            "false" => Ok(Value::Bool(false)),
            _ => Err(format!("{field:?} is not a boolean")),
        },
        ColumnKind::Categorical => Ok(Value::Text(field.to_string())),
        ColumnKind::Datetime => parse_timestamp(field)
            .map(Value::Timestamp)
            .ok_or_else(|| format!("{field:?} is not a timestamp")),
    }
}

fn table_to_csv(table: &SourceTable) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(table.columns().iter().map(|c| c.name))?;
    for record in table.records() {
        w.write_record(record.values.iter().map(cell_to_csv))?;
    }
    Ok(w.into_inner().expect("writing to Vec cannot fail"))
}

fn table_from_csv(
    text: &str,
    columns: &'static [ColumnDef],
    file: &str,
) -> Result<SourceTable> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    let expected: Vec<&str> = columns.iter().map(|c| c.name).collect();
    if header.iter().collect::<Vec<_>>() != expected {
        return Err(Error::SnapshotMismatch(format!(
            "{file}: header does not match the column catalog"
        )));
    }

    let mut table = SourceTable::new(columns);
    for (idx, row) in reader.records().enumerate() {
        let row = row?;
        let parse_err = |msg: String| Error::Parse {
            file: file.to_string(),
            line: idx + 2,
            msg,
        };
        if row.len() != columns.len() {
            return Err(parse_err(format!(
                "expected {} fields, got {}",
                columns.len(),
                row.len()
            )));
        }
        let mut values = Vec::with_capacity(columns.len());
        for (field, def) in row.iter().zip(columns) {
            values.push(cell_from_csv(field, def.kind).map_err(&parse_err)?);
        }
        let asn = match values[0] {
            Value::Int(i) => u32::try_from(i)
                .ok()
                .and_then(|raw| AsnId::new(raw).ok())
                .ok_or_else(|| parse_err(format!("bad ASN {i}")))?,
            ref other => return Err(parse_err(format!("bad ASN cell {other:?}"))),
        };
        if !table.push(SourceRecord { asn, values }) {
            return Err(parse_err(format!("duplicate ASN {asn} in cached table")));
        }
    }
    Ok(table)
}

fn relationships_to_csv(relationships: &[RelationshipRecord]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["asn_a", "asn_b", "kind"])?;
    for rel in relationships {
        let kind = match rel.kind {
            RelKind::Peer => "peer",
            RelKind::ProviderCustomer => "provider_customer",
        };
        w.write_record([rel.asn_a.to_string(), rel.asn_b.to_string(), kind.into()])?;
    }
    Ok(w.into_inner().expect("writing to Vec cannot fail"))
}

fn relationships_from_csv(text: &str) -> Result<Vec<RelationshipRecord>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let row = row?;
        let parse_err = |msg: String| Error::Parse {
            file: "relationships.csv".into(),
            line: idx + 2,
            msg,
        };
        let asn_a: AsnId = row
            .get(0)
            .unwrap_or_default()
            .parse()
            .map_err(|e: Error| parse_err(e.to_string()))?;
        let asn_b: AsnId = row
            .get(1)
            .unwrap_or_default()
            .parse()
            .map_err(|e: Error| parse_err(e.to_string()))?;
        let kind = match row.get(2).unwrap_or_default() {
            "peer" => RelKind::Peer,
            "provider_customer" => RelKind::ProviderCustomer,
            other => return Err(parse_err(format!("unknown kind {other:?}"))),
        };
        out.push(RelationshipRecord::new(asn_a, asn_b, kind).map_err(|e| parse_err(e.to_string()))?);
    }
    Ok(out)
}

/// Renders memberships as the two-column `asn,pop` exchange format.
pub fn pops_to_csv(pops: &PopMemberships) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["asn", "pop"])?;
    for (asn, set) in pops.sets() {
        for pop in set {
            w.write_record([asn.to_string(), pop.to_string()])?;
        }
    }
    Ok(w.into_inner().expect("writing to Vec cannot fail"))
}

/// Parses the two-column `asn,pop` membership format (F<id> facilities,
/// X<id> exchange points).
pub fn pops_from_csv(text: &str) -> Result<PopMemberships> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut pops = PopMemberships::default();
    for (idx, row) in reader.records().enumerate() {
        let row = row?;
        let parse_err = |msg: String| Error::Parse {
            file: "pops.csv".into(),
            line: idx + 2,
            msg,
        };
        let asn: AsnId = row
            .get(0)
            .unwrap_or_default()
            .parse()
            .map_err(|e: Error| parse_err(e.to_string()))?;
        let pop: PopId = row
            .get(1)
            .unwrap_or_default()
            .parse()
            .map_err(|e: Error| parse_err(e.to_string()))?;
        pops.0.entry(asn).or_default().insert(pop);
    }
    Ok(pops)
}
