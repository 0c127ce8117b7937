//! End-to-end composition: snapshot in, labeled pair dataset out.
//!
//! These helpers wire the stages together in the one correct order
//! (graph, cones, point-of-presence sets, feature table, pair assembly)
//! so that callers such as the CLI and the experiment drivers cannot
//! disagree about how a dataset is built.

use crate::catalog::Variant;
use crate::cone::{customer_cones, pair_features, pop_sets, AsGraph, ConeIndex, PopIndex};
use crate::error::{Error, Result};
use crate::features::{build_feature_table, EncodeWarning, FeatureTable};
use crate::ingest::Snapshot;
use crate::pairset::{assemble, assemble_pairs, candidate_pairs, PairDataset};
use crate::types::AsnId;

/// Cone and point-of-presence indexes for a snapshot, the inputs every
/// pair-level feature needs.
pub struct PairContext {
    pub cones: ConeIndex,
    pub pops: PopIndex,
}

impl PairContext {
    pub fn build(snapshot: &Snapshot) -> Result<PairContext> {
        let mut graph = AsGraph::from_relationships(&snapshot.relationships);
        // ASes without any relationship still need a cone (just
        // themselves) so that candidate pairs can reach them.
        for &asn in &snapshot.common_asns {
            graph.add_node(asn);
        }
        let cones = customer_cones(&graph, true);
        let pops = pop_sets(snapshot)?;
        Ok(PairContext { cones, pops })
    }
}

/// Builds the labeled pair dataset for a snapshot under a variant,
/// returning encoding warnings alongside.
pub fn build_pair_dataset(
    snapshot: &Snapshot,
    variant: Variant,
) -> Result<(PairDataset, Vec<EncodeWarning>)> {
    let (features, warnings) = build_feature_table(snapshot, variant)?;
    let dataset = assemble_with_context(snapshot, &features)?;
    Ok((dataset, warnings))
}

/// Assembles the labeled dataset against an existing feature table,
/// computing pair-level features only when the variant needs them.
pub fn assemble_with_context(snapshot: &Snapshot, features: &FeatureTable) -> Result<PairDataset> {
    let extras = if features.schema.variant == Variant::Optimum {
        let context = PairContext::build(snapshot)?;
        let pairs: Vec<_> = snapshot.relationships.iter().map(|r| r.pair_key()).collect();
        Some(pair_features(&context.cones, &context.pops, &pairs)?)
    } else {
        None
    };
    assemble(features, extras.as_deref(), &snapshot.relationships)
}

/// Unlabeled dataset for explicit pairs, e.g. from a prediction request.
/// Pairs are canonicalized to (lower ASN, higher ASN); a pair of equal
/// endpoints is rejected.
pub fn build_unlabeled_dataset(
    snapshot: &Snapshot,
    features: &FeatureTable,
    pairs: &[(AsnId, AsnId)],
) -> Result<PairDataset> {
    let pairs: Vec<(AsnId, AsnId)> = pairs
        .iter()
        .map(|&(a, b)| {
            if a == b {
                Err(Error::SelfPair(a))
            } else {
                Ok((a.min(b), a.max(b)))
            }
        })
        .collect::<Result<_>>()?;
    let extras = if features.schema.variant == Variant::Optimum {
        let context = PairContext::build(snapshot)?;
        Some(pair_features(&context.cones, &context.pops, &pairs)?)
    } else {
        None
    };
    assemble_pairs(features, extras.as_deref(), &pairs, None)
}

/// Unlabeled dataset of candidate pairs around the anchors: every
/// anchor-to-universe pair with no observed relationship.
pub fn build_candidate_dataset(
    snapshot: &Snapshot,
    features: &FeatureTable,
    anchors: &[AsnId],
) -> Result<PairDataset> {
    let pairs = candidate_pairs(anchors, &snapshot.common_asns, &snapshot.relationships);
    build_unlabeled_dataset(snapshot, features, &pairs)
}

/// The `count` best-ranked ASes of the snapshot (rank 1 is best), the
/// default anchor set for candidate scoring.
pub fn top_ranked(snapshot: &Snapshot, count: usize) -> Vec<AsnId> {
    let mut ranked: Vec<(i64, AsnId)> = snapshot
        .common_asns
        .iter()
        .filter_map(|&asn| {
            match snapshot.as_rank.value(asn, "Rank") {
                Some(crate::types::Value::Int(rank)) => Some((*rank, asn)),
                _ => None,
            }
        })
        .collect();
    ranked.sort();
    ranked.into_iter().take(count).map(|(_, asn)| asn).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::synth::{synth_snapshot, SynthParams};

    #[test]
    fn dataset_building_matches_manual_assembly() {
        let snap = synth_snapshot(60, 5, &SynthParams::default()).unwrap();
        for variant in Variant::ALL {
            let (ds, warnings) = build_pair_dataset(&snap, variant).unwrap();
            assert_eq!(ds.width(), variant.pair_width(), "{variant}");
            assert_eq!(ds.len(), snap.relationships.len());
            assert!(warnings.is_empty(), "{warnings:?}");
        }
    }

    #[test]
    fn candidate_dataset_is_unlabeled_and_disjoint_from_known_pairs() {
        let snap = synth_snapshot(60, 5, &SynthParams::default()).unwrap();
        let (features, _) = build_feature_table(&snap, Variant::Optimum).unwrap();
        let anchors = top_ranked(&snap, 5);
        assert_eq!(anchors.len(), 5);
        let ds = build_candidate_dataset(&snap, &features, &anchors).unwrap();
        assert!(ds.y.is_none());
        assert!(!ds.is_empty());
        let known: std::collections::BTreeSet<_> =
            snap.relationships.iter().map(|r| r.pair_key()).collect();
        assert!(ds.pairs.iter().all(|p| !known.contains(p)));
    }

    #[test]
    fn unlabeled_dataset_canonicalizes_pairs_and_rejects_self_pairs() {
        let snap = synth_snapshot(60, 5, &SynthParams::default()).unwrap();
        let (features, _) = build_feature_table(&snap, Variant::Optimum).unwrap();
        let ases: Vec<AsnId> = snap.common_asns.iter().copied().take(3).collect();
        let ds =
            build_unlabeled_dataset(&snap, &features, &[(ases[2], ases[0]), (ases[1], ases[2])])
                .unwrap();
        assert_eq!(ds.pairs, vec![(ases[0], ases[2]), (ases[1], ases[2])]);
        assert!(ds.y.is_none());
        let err = build_unlabeled_dataset(&snap, &features, &[(ases[0], ases[0])]).unwrap_err();
        assert!(matches!(err, Error::SelfPair(a) if a == ases[0]));
    }

    #[test]
    fn top_ranked_is_sorted_by_rank() {
        let snap = synth_snapshot(60, 5, &SynthParams::default()).unwrap();
        let top = top_ranked(&snap, 10);
        let ranks: Vec<i64> = top
            .iter()
            .map(|&asn| match snap.as_rank.value(asn, "Rank") {
                Some(crate::types::Value::Int(rank)) => *rank,
                other => panic!("rank missing: {other:?}"),
            })
            .collect();
        let mut sorted = ranks.clone();
        sorted.sort();
        assert_eq!(ranks, sorted);
        assert_eq!(ranks[0], 1);
    }
}
