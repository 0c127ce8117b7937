//! Per-AS feature tables.
//!
//! A [`FeatureSchema`] is fitted on a snapshot (variant column list plus
//! one sorted vocabulary per categorical column) and then encodes that
//! snapshot, or a later one, into numeric rows. Cells are `Option<f64>`:
//! `None` is a missing value, and every `Some` is finite.
//!
//! Encoding rules per column kind: numerics pass through, booleans map to
//! 0/1, timestamps become epoch seconds, and categorical text maps to the
//! index of the value in the fitted vocabulary. A category the schema has
//! never seen encodes as missing and is reported, which is what makes a
//! schema safely reusable across snapshots.

pub mod correlate;

mod cache;

pub use cache::{load_feature_table, save_feature_table};

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::catalog::{per_as_columns, Variant};
use crate::error::{Error, Result};
use crate::ingest::Snapshot;
use crate::types::{AsnId, ColumnKind, Value};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaColumn {
    pub name: String,
    pub kind: ColumnKind,
}

/// A fitted encoding: which columns, in what order, with which categorical
/// vocabularies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub variant: Variant,
    pub columns: Vec<SchemaColumn>,
    /// Sorted distinct values per categorical column; a value's code is
    /// its index here.
    pub vocabularies: BTreeMap<String, Vec<String>>,
}

/// One problem encountered while encoding; the cell in question is missing
/// in the output.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodeWarning {
    pub asn: AsnId,
    pub column: String,
    pub message: String,
}

/// Encoded per-AS rows for one snapshot under one schema.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub schema: FeatureSchema,
    pub date: NaiveDate,
    rows: BTreeMap<AsnId, Vec<Option<f64>>>,
}

impl FeatureTable {
    pub fn row(&self, asn: AsnId) -> Result<&[Option<f64>]> {
        self.rows
            .get(&asn)
            .map(Vec::as_slice)
            .ok_or(Error::UnknownAsn(asn))
    }

    pub fn rows(&self) -> impl Iterator<Item = (AsnId, &[Option<f64>])> {
        self.rows.iter().map(|(&asn, row)| (asn, row.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn width(&self) -> usize {
        self.schema.columns.len()
    }
}

/// Source-table cell for a schema column: AS-Rank columns read from the
/// rank table, everything else from PeeringDB.
fn source_value<'s>(snapshot: &'s Snapshot, asn: AsnId, column: &str) -> &'s Value {
    snapshot
        .as_rank
        .value(asn, column)
        .or_else(|| snapshot.peeringdb.value(asn, column))
        .unwrap_or(&Value::Missing)
}

impl FeatureSchema {
    /// Fits a schema on a snapshot: fixes the variant's column list and
    /// collects one sorted vocabulary per categorical column.
    pub fn fit(snapshot: &Snapshot, variant: Variant) -> Result<FeatureSchema> {
        if snapshot.common_asns.is_empty() {
            return Err(Error::EmptyInput("snapshot has no common ASes".into()));
        }
        let columns: Vec<SchemaColumn> = per_as_columns(variant)
            .iter()
            .map(|def| SchemaColumn {
                name: def.name.to_string(),
                kind: def.kind,
            })
            .collect();

        let mut vocabularies = BTreeMap::new();
        for column in columns.iter().filter(|c| c.kind == ColumnKind::Categorical) {
            let mut distinct: BTreeSet<String> = BTreeSet::new();
            for &asn in &snapshot.common_asns {
                if let Some(text) = source_value(snapshot, asn, &column.name).text_form() {
                    distinct.insert(text);
                }
            }
            vocabularies.insert(column.name.clone(), distinct.into_iter().collect());
        }
        Ok(FeatureSchema {
            variant,
            columns,
            vocabularies,
        })
    }

    /// Encodes a snapshot under this schema, one row per common AS.
    pub fn encode(&self, snapshot: &Snapshot) -> Result<(FeatureTable, Vec<EncodeWarning>)> {
        if snapshot.common_asns.is_empty() {
            return Err(Error::EmptyInput("snapshot has no common ASes".into()));
        }
        let mut rows = BTreeMap::new();
        let mut warnings = Vec::new();
        for &asn in &snapshot.common_asns {
            let mut row = Vec::with_capacity(self.columns.len());
            for column in &self.columns {
                let value = source_value(snapshot, asn, &column.name);
                row.push(self.encode_cell(asn, column, value, &mut warnings));
            }
            rows.insert(asn, row);
        }
        Ok((
            FeatureTable {
                schema: self.clone(),
                date: snapshot.date,
                rows,
            },
            warnings,
        ))
    }

    fn encode_cell(
        &self,
        asn: AsnId,
        column: &SchemaColumn,
        value: &Value,
        warnings: &mut Vec<EncodeWarning>,
    ) -> Option<f64> {
        let mut warn = |message: String| {
            warnings.push(EncodeWarning {
                asn,
                column: column.name.clone(),
                message,
            });
            None
        };
        match (column.kind, value) {
            (_, Value::Missing) => None,
            (ColumnKind::Numeric, Value::Int(v)) => Some(*v as f64),
            (ColumnKind::Numeric, Value::Real(v)) if v.is_finite() => Some(*v),
            (ColumnKind::Numeric, Value::Real(v)) => {
                warn(format!("non-finite numeric value {v}"))
            }
            (ColumnKind::Boolean, Value::Bool(v)) => Some(if *v { 1.0 } else { 0.0 }),
            (ColumnKind::Datetime, Value::Timestamp(secs)) => Some(*secs as f64),
            (ColumnKind::Datetime, Value::Int(secs)) => Some(*secs as f64),
            (ColumnKind::Categorical, v) => {
                let text = v.text_form().expect("missing handled above");
                let vocabulary = self.vocabularies.get(&column.name);
                match vocabulary.and_then(|vocab| vocab.binary_search(&text).ok()) {
                    Some(code) => Some(code as f64),
                    None => warn(format!("category {text:?} not in the fitted vocabulary")),
                }
            }
            (kind, other) => warn(format!("{other:?} cannot encode as {kind:?}")),
        }
    }
}

/// Fit-then-encode on the same snapshot, the common case.
pub fn build_feature_table(
    snapshot: &Snapshot,
    variant: Variant,
) -> Result<(FeatureTable, Vec<EncodeWarning>)> {
    FeatureSchema::fit(snapshot, variant)?.encode(snapshot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::synth::{back_date, synth_snapshot, SynthParams};

    fn snapshot() -> Snapshot {
        synth_snapshot(60, 21, &SynthParams::default()).unwrap()
    }

    #[test]
    fn fit_and_encode_all_variants() {
        let snap = snapshot();
        for (variant, width) in [
            (Variant::Default, 41),
            (Variant::Filtered, 16),
            (Variant::Optimum, 16),
        ] {
            let (table, warnings) = build_feature_table(&snap, variant).unwrap();
            assert_eq!(table.width(), width, "{variant}");
            assert_eq!(table.len(), snap.common_asns.len());
            // encoding the fitting snapshot never hits unseen categories
            assert!(warnings.is_empty(), "{variant}: {warnings:?}");
            for (_, row) in table.rows() {
                for cell in row {
                    if let Some(v) = cell {
                        assert!(v.is_finite());
                    }
                }
            }
        }
    }

    #[test]
    fn filtered_needs_no_vocabulary() {
        let snap = snapshot();
        let schema = FeatureSchema::fit(&snap, Variant::Filtered).unwrap();
        assert!(schema.vocabularies.is_empty());
        let default = FeatureSchema::fit(&snap, Variant::Default).unwrap();
        assert!(!default.vocabularies.is_empty());
    }

    #[test]
    fn encoding_is_deterministic() {
        let snap = snapshot();
        let schema = FeatureSchema::fit(&snap, Variant::Default).unwrap();
        let (a, _) = schema.encode(&snap).unwrap();
        let (b, _) = schema.encode(&snap).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn categorical_codes_follow_sorted_vocabulary() {
        let snap = snapshot();
        let schema = FeatureSchema::fit(&snap, Variant::Default).unwrap();
        let (table, _) = schema.encode(&snap).unwrap();
        let source_idx = schema
            .columns
            .iter()
            .position(|c| c.name == "Source")
            .unwrap();
        let vocab = &schema.vocabularies["Source"];
        for (asn, row) in table.rows() {
            let text = match source_value(&snap, asn, "Source") {
                Value::Text(t) => t.clone(),
                _ => continue,
            };
            let code = row[source_idx].unwrap() as usize;
            assert_eq!(vocab[code], text);
        }
    }

    #[test]
    fn old_schema_encodes_new_snapshot_and_reports_unseen() {
        // fit on the back-dated snapshot, encode the current one: numeric
        // drift is fine, genuinely new categories become missing cells
        let new = snapshot();
        let old = back_date(&new, 21).unwrap();
        let schema = FeatureSchema::fit(&old, Variant::Filtered).unwrap();
        let (table, warnings) = schema.encode(&new).unwrap();
        assert_eq!(table.len(), new.common_asns.len());
        assert!(warnings.is_empty(), "filtered columns cannot have unseen categories");
    }
}
