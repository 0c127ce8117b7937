//! Point-of-presence lookup for pair arithmetic.
//!
//! Preferred source: explicit per-AS membership sets carried by the
//! snapshot, which give exact common-site counts. Fallback: the per-AS
//! facility and exchange counts from the PeeringDB table, where the common
//! count is unknowable and a configured constant (zero unless stated
//! otherwise) stands in for it.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ingest::snapshot::Snapshot;
use crate::types::{AsnId, PopMemberships, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PopIndex {
    Memberships(PopMemberships),
    CountOnly {
        counts: BTreeMap<AsnId, u64>,
        /// Stand-in for the unobservable common-site count of any pair.
        common_fallback: u64,
    },
}

impl PopIndex {
    /// Set sizes `(p1, p2, p0)` for a pair. An AS without any membership
    /// row simply has an empty set.
    pub fn pair_counts(&self, a: AsnId, b: AsnId) -> Result<(u64, u64, u64)> {
        match self {
            PopIndex::Memberships(memberships) => {
                let sa = memberships.sets().get(&a);
                let sb = memberships.sets().get(&b);
                let p1 = sa.map_or(0, |s| s.len() as u64);
                let p2 = sb.map_or(0, |s| s.len() as u64);
                let p0 = match (sa, sb) {
                    (Some(sa), Some(sb)) => sa.intersection(sb).count() as u64,
                    _ => 0,
                };
                Ok((p1, p2, p0))
            }
            PopIndex::CountOnly {
                counts,
                common_fallback,
            } => {
                let p1 = counts.get(&a).copied().unwrap_or(0);
                let p2 = counts.get(&b).copied().unwrap_or(0);
                let p0 = (*common_fallback).min(p1).min(p2);
                Ok(p0).map(|p0| (p1, p2, p0))
            }
        }
    }

    pub fn is_count_only(&self) -> bool {
        matches!(self, PopIndex::CountOnly { .. })
    }
}

/// Builds the PoP index for a snapshot: explicit memberships when present,
/// otherwise `fac_count + ix_count` per AS. Errors when neither source has
/// any signal at all.
pub fn pop_sets(snapshot: &Snapshot) -> Result<PopIndex> {
    if let Some(memberships) = &snapshot.pops {
        if !memberships.sets().is_empty() {
            return Ok(PopIndex::Memberships(memberships.clone()));
        }
    }

    let mut counts = BTreeMap::new();
    let mut any_present = false;
    for record in snapshot.peeringdb.records() {
        let mut total = 0u64;
        for column in ["fac_count", "ix_count"] {
            match snapshot.peeringdb.value(record.asn, column) {
                Some(Value::Int(v)) if *v >= 0 => {
                    total += *v as u64;
                    any_present = true;
                }
                Some(Value::Real(v)) if *v >= 0.0 => {
                    total += *v as u64;
                    any_present = true;
                }
                _ => {}
            }
        }
        counts.insert(record.asn, total);
    }
    if !any_present {
        return Err(Error::NoPopSource(
            "snapshot has no membership table and no usable fac_count/ix_count columns".into(),
        ));
    }
    Ok(PopIndex::CountOnly {
        counts,
        common_fallback: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::synth::{synth_snapshot, SynthParams};
    use crate::types::PopId;

    fn asn(raw: u32) -> AsnId {
        AsnId::new(raw).unwrap()
    }

    #[test]
    fn membership_counts() {
        let mut memberships = PopMemberships::default();
        memberships.0.insert(
            asn(1),
            [PopId::Facility(1), PopId::Facility(2), PopId::Ixp(1)].into(),
        );
        memberships
            .0
            .insert(asn(2), [PopId::Facility(2), PopId::Ixp(1), PopId::Ixp(2)].into());
        let index = PopIndex::Memberships(memberships);
        assert_eq!(index.pair_counts(asn(1), asn(2)).unwrap(), (3, 3, 2));
        // unknown AS behaves as an empty set
        assert_eq!(index.pair_counts(asn(1), asn(9)).unwrap(), (3, 0, 0));
    }

    #[test]
    fn count_only_uses_fallback_clamped_to_sizes() {
        let index = PopIndex::CountOnly {
            counts: [(asn(1), 5u64), (asn(2), 1u64)].into(),
            common_fallback: 2,
        };
        assert_eq!(index.pair_counts(asn(1), asn(2)).unwrap(), (5, 1, 1));
        assert_eq!(index.pair_counts(asn(1), asn(7)).unwrap(), (5, 0, 0));
    }

    #[test]
    fn snapshot_prefers_memberships_and_falls_back_to_counts() {
        let snapshot = synth_snapshot(40, 1, &SynthParams::default()).unwrap();
        assert!(!pop_sets(&snapshot).unwrap().is_count_only());

        let mut stripped = snapshot.clone();
        stripped.pops = None;
        let index = pop_sets(&stripped).unwrap();
        assert!(index.is_count_only());
        // counts agree with the membership sets they replaced
        let any = *snapshot.common_asns.iter().next().unwrap();
        let expected = snapshot.pops.as_ref().unwrap().sets()[&any].len() as u64;
        let (p1, _, _) = index.pair_counts(any, *snapshot.common_asns.iter().last().unwrap()).unwrap();
        assert_eq!(p1, expected);
    }
}
