//! Labeled and unlabeled AS-pair datasets.
//!
//! A pair row is the concatenation of both endpoints' per-AS feature rows
//! (lower ASN first), plus the two pair-level columns for the `optimum`
//! variant. The dataset remembers its column structure and exposes a
//! fingerprint over it; models refuse to run against a different
//! fingerprint, which catches variant and schema drift at the door.

pub mod missing;
pub mod sample;
pub mod split;

mod cache;

pub use cache::{load_dataset, save_dataset};

use std::collections::BTreeSet;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::catalog::{Variant, PAIR_EXTRA_COLUMNS};
use crate::cone::PairFeature;
use crate::error::{Error, Result};
use crate::features::{FeatureTable, SchemaColumn};
use crate::fsio::sha256_hex;
use crate::types::{AsnId, RelKind, RelationshipRecord};

/// Identity of a pair-dataset's column structure: variant plus the ordered
/// (name, kind) list. Data values do not participate, so two snapshots
/// encoded under equivalent schemas produce interchangeable datasets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SchemaFingerprint(String);

impl SchemaFingerprint {
    pub(crate) fn compute(variant: Variant, columns: &[SchemaColumn]) -> Self {
        let mut text = format!("{variant}\n");
        for c in columns {
            text.push_str(&format!("{}\x00{:?}\n", c.name, c.kind));
        }
        SchemaFingerprint(sha256_hex(text.as_bytes()))
    }

    pub fn as_hex(&self) -> &str {
        &self.0
    }
}

impl std::fmt::Display for SchemaFingerprint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_hex())
    }
}

/// A dataset of AS pairs: features, canonical pair identities, and labels
/// when the pairs come from observed relationships (1 = peering).
#[derive(Debug, Clone, PartialEq)]
pub struct PairDataset {
    pub variant: Variant,
    pub date: NaiveDate,
    pub columns: Vec<SchemaColumn>,
    pub pairs: Vec<(AsnId, AsnId)>,
    pub x: Vec<Vec<Option<f64>>>,
    pub y: Option<Vec<u8>>,
}

impl PairDataset {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn fingerprint(&self) -> SchemaFingerprint {
        SchemaFingerprint::compute(self.variant, &self.columns)
    }

    pub fn labels(&self) -> Result<&[u8]> {
        self.y
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument("dataset is unlabeled".into()))
    }

    /// Count of (positive, negative) labels.
    pub fn class_counts(&self) -> Result<(usize, usize)> {
        let y = self.labels()?;
        let pos = y.iter().filter(|&&v| v == 1).count();
        Ok((pos, y.len() - pos))
    }

    /// New dataset without the named columns. A name strips the pair
    /// columns derived from that per-AS column (both the `_a` and `_b`
    /// side); pair-level columns match by their exact name. Unknown names
    /// are ignored, and the fingerprint changes with the structure.
    pub fn without_columns<S: AsRef<str>>(&self, names: &[S]) -> PairDataset {
        let dropped: BTreeSet<&str> = names.iter().map(AsRef::as_ref).collect();
        let keep: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .filter(|(_, c)| {
                let base = c
                    .name
                    .strip_suffix("_a")
                    .or_else(|| c.name.strip_suffix("_b"))
                    .unwrap_or(&c.name);
                !dropped.contains(base) && !dropped.contains(c.name.as_str())
            })
            .map(|(i, _)| i)
            .collect();
        PairDataset {
            variant: self.variant,
            date: self.date,
            columns: keep.iter().map(|&i| self.columns[i].clone()).collect(),
            pairs: self.pairs.clone(),
            x: self
                .x
                .iter()
                .map(|row| keep.iter().map(|&i| row[i]).collect())
                .collect(),
            y: self.y.clone(),
        }
    }

    /// New dataset holding the given rows, in the given order. Indices may
    /// repeat (resampling uses that).
    pub fn take(&self, indices: &[usize]) -> PairDataset {
        PairDataset {
            variant: self.variant,
            date: self.date,
            columns: self.columns.clone(),
            pairs: indices.iter().map(|&i| self.pairs[i]).collect(),
            x: indices.iter().map(|&i| self.x[i].clone()).collect(),
            y: self
                .y
                .as_ref()
                .map(|y| indices.iter().map(|&i| y[i]).collect()),
        }
    }
}

fn pair_columns(variant: Variant, per_as: &[SchemaColumn]) -> Vec<SchemaColumn> {
    let mut columns = Vec::with_capacity(2 * per_as.len() + 2);
    for suffix in ["_a", "_b"] {
        columns.extend(per_as.iter().map(|c| SchemaColumn {
            name: format!("{}{suffix}", c.name),
            kind: c.kind,
        }));
    }
    if variant == Variant::Optimum {
        columns.extend(PAIR_EXTRA_COLUMNS.iter().map(|def| SchemaColumn {
            name: def.name.to_string(),
            kind: def.kind,
        }));
    }
    columns
}

/// Builds rows for explicit pairs. `extras` must be given for the
/// `optimum` variant, aligned with `pairs`; other variants ignore it.
/// Endpoints are canonicalized to lower-ASN-first, self pairs are
/// rejected, and every endpoint must have a feature row.
pub fn assemble_pairs(
    features: &FeatureTable,
    extras: Option<&[PairFeature]>,
    pairs: &[(AsnId, AsnId)],
    labels: Option<Vec<u8>>,
) -> Result<PairDataset> {
    let variant = features.schema.variant;
    let extras = match (variant, extras) {
        (Variant::Optimum, None) => {
            return Err(Error::InvalidArgument(
                "the optimum variant needs pair-level features".into(),
            ))
        }
        (Variant::Optimum, Some(e)) if e.len() != pairs.len() => {
            return Err(Error::InvalidArgument(format!(
                "{} pairs but {} pair-feature entries",
                pairs.len(),
                e.len()
            )));
        }
        (Variant::Optimum, Some(e)) => Some(e),
        _ => None,
    };
    if let Some(y) = &labels {
        if y.len() != pairs.len() {
            return Err(Error::InvalidArgument(format!(
                "{} pairs but {} labels",
                pairs.len(),
                y.len()
            )));
        }
        if let Some(bad) = y.iter().find(|&&v| v > 1) {
            return Err(Error::InvalidArgument(format!(
                "labels must be 0 or 1, found {bad}"
            )));
        }
    }

    let mut canonical = Vec::with_capacity(pairs.len());
    let mut x = Vec::with_capacity(pairs.len());
    for (idx, &(a, b)) in pairs.iter().enumerate() {
        if a == b {
            return Err(Error::SelfPair(a));
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let mut row = Vec::with_capacity(2 * features.width() + 2);
        row.extend_from_slice(features.row(lo)?);
        row.extend_from_slice(features.row(hi)?);
        if let Some(extras) = extras {
            let pf = extras[idx];
            row.push(Some(pf.cone_overlap as f64));
            row.push(Some(pf.affinity_score));
        }
        canonical.push((lo, hi));
        x.push(row);
    }

    Ok(PairDataset {
        variant,
        date: features.date,
        columns: pair_columns(variant, &features.schema.columns),
        pairs: canonical,
        x,
        y: labels,
    })
}

/// Labeled dataset from relationship records, one row per record in record
/// order: peers are the positive class, provider-customer edges the
/// negative one.
pub fn assemble(
    features: &FeatureTable,
    extras: Option<&[PairFeature]>,
    relationships: &[RelationshipRecord],
) -> Result<PairDataset> {
    if relationships.is_empty() {
        return Err(Error::EmptyInput("no relationships to assemble".into()));
    }
    let pairs: Vec<(AsnId, AsnId)> = relationships.iter().map(|r| r.pair_key()).collect();
    let labels = relationships
        .iter()
        .map(|r| u8::from(r.kind == RelKind::Peer))
        .collect();
    assemble_pairs(features, extras, &pairs, Some(labels))
}

/// Candidate pairs whose peering status is unobserved: every
/// anchor-universe combination that is not a self pair and has no
/// relationship record. Canonical order, no duplicates.
pub fn candidate_pairs(
    anchors: &[AsnId],
    universe: &BTreeSet<AsnId>,
    relationships: &[RelationshipRecord],
) -> Vec<(AsnId, AsnId)> {
    let known: BTreeSet<(AsnId, AsnId)> = relationships.iter().map(|r| r.pair_key()).collect();
    let mut out: BTreeSet<(AsnId, AsnId)> = BTreeSet::new();
    for &anchor in anchors {
        for &other in universe {
            if other == anchor {
                continue;
            }
            let pair = (anchor.min(other), anchor.max(other));
            if !known.contains(&pair) {
                out.insert(pair);
            }
        }
    }
    out.into_iter().collect()
}
