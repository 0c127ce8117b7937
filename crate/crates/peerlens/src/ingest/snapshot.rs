//! Snapshot assembly: intersect the two per-AS sources, restrict the
//! relationship list to the intersection, and canonicalize everything so
//! that equal inputs always produce byte-equal snapshots.

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::table::SourceTable;
use crate::types::{AsnId, PopMemberships, RelKind, RelationshipRecord};

/// One dated view of the peering world: both per-AS tables restricted to
/// their common ASNs, the relationship edges among those ASNs, and
/// optionally explicit point-of-presence sets.
///
/// Canonical layout invariants, relied on by caching and dataset assembly:
/// table records ascend by ASN, relationships ascend by (asn_a, asn_b,
/// kind), every relationship endpoint is in `common_asns`, and no two
/// relationships share an unordered endpoint pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub date: NaiveDate,
    pub as_rank: SourceTable,
    pub peeringdb: SourceTable,
    pub relationships: Vec<RelationshipRecord>,
    pub common_asns: BTreeSet<AsnId>,
    pub pops: Option<PopMemberships>,
}

impl Snapshot {
    pub fn counts(&self) -> SnapshotCounts {
        let peer_pairs = self
            .relationships
            .iter()
            .filter(|r| r.kind == RelKind::Peer)
            .count();
        SnapshotCounts {
            as_rank_asns: self.as_rank.len(),
            peeringdb_asns: self.peeringdb.len(),
            common_asns: self.common_asns.len(),
            peer_pairs,
            provider_customer_pairs: self.relationships.len() - peer_pairs,
        }
    }
}

/// Sizes of a built snapshot. `as_rank_asns` and `peeringdb_asns` count the
/// rows *retained*, i.e. the intersection, which makes the three AS counts
/// equal by construction; the pre-intersection sizes are reported in
/// [`SnapshotBuild::input_counts`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotCounts {
    pub as_rank_asns: usize,
    pub peeringdb_asns: usize,
    pub common_asns: usize,
    pub peer_pairs: usize,
    pub provider_customer_pairs: usize,
}

/// Pre-restriction input sizes, for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputCounts {
    pub as_rank_asns: usize,
    pub peeringdb_asns: usize,
    pub relationships: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotBuild {
    pub snapshot: Snapshot,
    pub input_counts: InputCounts,
    pub warnings: Vec<String>,
}

/// Merges the sources into a canonical snapshot.
///
/// * ASes outside the AS-Rank/PeeringDB intersection are dropped from both
///   tables; an empty intersection is an error.
/// * Relationships with an endpoint outside the intersection are dropped
///   silently (that is the common case, not a data problem).
/// * Two relationships on the same unordered AS pair keep the first and
///   warn; the relationship list is then sorted.
/// * Explicit PoP memberships, when given, are restricted the same way.
pub fn build_snapshot(
    date: NaiveDate,
    mut as_rank: SourceTable,
    mut peeringdb: SourceTable,
    relationships: Vec<RelationshipRecord>,
    pops: Option<PopMemberships>,
) -> Result<SnapshotBuild> {
    let input_counts = InputCounts {
        as_rank_asns: as_rank.len(),
        peeringdb_asns: peeringdb.len(),
        relationships: relationships.len(),
    };

    let rank_asns: BTreeSet<AsnId> = as_rank.asns().collect();
    let pdb_asns: BTreeSet<AsnId> = peeringdb.asns().collect();
    let common_asns: BTreeSet<AsnId> = rank_asns.intersection(&pdb_asns).copied().collect();
    if common_asns.is_empty() {
        return Err(Error::EmptyInput(
            "the AS-Rank and PeeringDB tables have no ASN in common".into(),
        ));
    }

    as_rank.restrict_and_sort(&common_asns);
    peeringdb.restrict_and_sort(&common_asns);

    let mut warnings = Vec::new();
    let mut by_pair: BTreeMap<(AsnId, AsnId), RelationshipRecord> = BTreeMap::new();
    let mut conflicts = 0usize;
    for rel in relationships {
        if !(common_asns.contains(&rel.asn_a) && common_asns.contains(&rel.asn_b)) {
            continue;
        }
        match by_pair.entry(rel.pair_key()) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(rel);
            }
            std::collections::btree_map::Entry::Occupied(existing) => {
                if *existing.get() != rel {
                    conflicts += 1;
                    if conflicts <= 5 {
                        warnings.push(format!(
                            "conflicting relationships for pair ({}, {}); keeping {:?}",
                            rel.pair_key().0,
                            rel.pair_key().1,
                            existing.get().kind
                        ));
                    }
                }
            }
        }
    }
    if conflicts > 5 {
        warnings.push(format!(
            "{} more conflicting duplicate relationships suppressed",
            conflicts - 5
        ));
    }

    let mut relationships: Vec<RelationshipRecord> = by_pair.into_values().collect();
    relationships.sort();

    // an empty membership set carries no information beyond absence, so
    // empties are normalized away; lookups treat absent as empty anyway
    let pops = pops.map(|p| {
        PopMemberships(
            p.0.into_iter()
                .filter(|(asn, set)| common_asns.contains(asn) && !set.is_empty())
                .collect(),
        )
    });

    Ok(SnapshotBuild {
        snapshot: Snapshot {
            date,
            as_rank,
            peeringdb,
            relationships,
            common_asns,
            pops,
        },
        input_counts,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{AS_RANK_COLUMNS, PEERINGDB_COLUMNS};
    use crate::ingest::table::SourceRecord;
    use crate::types::Value;

    fn table(columns: &'static [crate::catalog::ColumnDef], asns: &[u32]) -> SourceTable {
        let mut t = SourceTable::new(columns);
        for &a in asns {
            let asn = AsnId::new(a).unwrap();
            let mut values = vec![Value::Missing; columns.len()];
            values[0] = Value::Int(a as i64);
            t.push(SourceRecord { asn, values });
        }
        t
    }

    fn rel(a: u32, b: u32, kind: RelKind) -> RelationshipRecord {
        RelationshipRecord::new(AsnId::new(a).unwrap(), AsnId::new(b).unwrap(), kind).unwrap()
    }

    fn date() -> NaiveDate {
        NaiveDate::from_ymd_opt(2024, 6, 1).unwrap()
    }

    #[test]
    fn intersects_and_filters() {
        let rank = table(&AS_RANK_COLUMNS, &[1, 2, 3, 4]);
        let pdb = table(&PEERINGDB_COLUMNS, &[2, 3, 4, 5]);
        let rels = vec![
            rel(2, 3, RelKind::Peer),
            rel(1, 2, RelKind::Peer),          // 1 not common: dropped
            rel(4, 3, RelKind::ProviderCustomer),
        ];
        let build = build_snapshot(date(), rank, pdb, rels, None).unwrap();
        let snap = &build.snapshot;
        let counts = snap.counts();
        assert_eq!(counts.common_asns, 3);
        assert_eq!(counts.as_rank_asns, 3);
        assert_eq!(counts.peer_pairs, 1);
        assert_eq!(counts.provider_customer_pairs, 1);
        assert_eq!(build.input_counts.as_rank_asns, 4);
        // sorted by endpoints; the provider edge keeps its direction
        assert_eq!(snap.relationships[0], rel(2, 3, RelKind::Peer));
        assert_eq!(snap.relationships[1], rel(4, 3, RelKind::ProviderCustomer));
    }

    #[test]
    fn duplicate_pairs_keep_first_and_warn() {
        let rank = table(&AS_RANK_COLUMNS, &[1, 2]);
        let pdb = table(&PEERINGDB_COLUMNS, &[1, 2]);
        let rels = vec![
            rel(1, 2, RelKind::ProviderCustomer),
            rel(2, 1, RelKind::Peer),              // same pair, different kind
            rel(1, 2, RelKind::ProviderCustomer),  // exact repeat: silent
        ];
        let build = build_snapshot(date(), rank, pdb, rels, None).unwrap();
        assert_eq!(build.snapshot.relationships.len(), 1);
        assert_eq!(build.snapshot.relationships[0].kind, RelKind::ProviderCustomer);
        assert_eq!(build.warnings.len(), 1);
        assert!(build.warnings[0].contains("conflicting"));
    }

    #[test]
    fn empty_intersection_is_an_error() {
        let rank = table(&AS_RANK_COLUMNS, &[1, 2]);
        let pdb = table(&PEERINGDB_COLUMNS, &[3, 4]);
        assert!(matches!(
            build_snapshot(date(), rank, pdb, vec![], None),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn build_is_insensitive_to_input_order() {
        let rels_fwd = vec![rel(2, 3, RelKind::Peer), rel(4, 3, RelKind::ProviderCustomer)];
        let mut rels_rev = rels_fwd.clone();
        rels_rev.reverse();
        let a = build_snapshot(
            date(),
            table(&AS_RANK_COLUMNS, &[2, 3, 4]),
            table(&PEERINGDB_COLUMNS, &[4, 3, 2]),
            rels_fwd,
            None,
        )
        .unwrap();
        let b = build_snapshot(
            date(),
            table(&AS_RANK_COLUMNS, &[4, 3, 2]),
            table(&PEERINGDB_COLUMNS, &[2, 3, 4]),
            rels_rev,
            None,
        )
        .unwrap();
        assert_eq!(a.snapshot, b.snapshot);
    }
}
