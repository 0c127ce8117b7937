//! Scoring unobserved pairs: train on every labeled relationship, then
//! rank anchor-to-universe candidate pairs by predicted peering
//! probability.

use std::time::Instant;

use serde_json::json;

use super::{cell, ExperimentOutput, ResultTable};
use crate::catalog::Variant;
use crate::error::{Error, Result};
use crate::ingest::Snapshot;
use crate::learner::{train_boosted, train_forest, Hyperparams, ModelKind};
use crate::pipeline::{build_candidate_dataset, build_pair_dataset, top_ranked};
use crate::types::AsnId;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateScore {
    pub asn_a: AsnId,
    pub asn_b: AsnId,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnknownResult {
    pub variant: Variant,
    pub kind: ModelKind,
    pub anchors: Vec<AsnId>,
    pub n_train: usize,
    pub hyperparams: Hyperparams,
    /// Candidates in descending probability, pair order breaking ties.
    pub scores: Vec<CandidateScore>,
    pub train_seconds: f64,
    pub predict_seconds: f64,
}

/// Trains on all labeled pairs and scores every candidate around the
/// anchors. Without explicit anchors, the `anchor_count` best-ranked ASes
/// are used.
pub fn unknown_pairs(
    snapshot: &Snapshot,
    variant: Variant,
    kind: ModelKind,
    anchors: Option<&[AsnId]>,
    anchor_count: usize,
    hp: &Hyperparams,
) -> Result<UnknownResult> {
    let anchors: Vec<AsnId> = match anchors {
        Some(list) if list.is_empty() => {
            return Err(Error::InvalidArgument("empty anchor list".into()))
        }
        Some(list) => list.to_vec(),
        None => top_ranked(snapshot, anchor_count),
    };
    if anchors.is_empty() {
        return Err(Error::InvalidArgument(
            "no anchors available (snapshot has no ranked ASes)".into(),
        ));
    }
    for &anchor in &anchors {
        if !snapshot.common_asns.contains(&anchor) {
            return Err(Error::UnknownAsn(anchor));
        }
    }

    let (labeled, _) = build_pair_dataset(snapshot, variant)?;
    let started = Instant::now();
    let model = match kind {
        ModelKind::Boosted => train_boosted(&labeled, hp)?,
        ModelKind::Forest => train_forest(&labeled, hp)?,
    };
    let train_seconds = started.elapsed().as_secs_f64();

    let (features, _) = crate::features::build_feature_table(snapshot, variant)?;
    let candidates = build_candidate_dataset(snapshot, &features, &anchors)?;
    let started = Instant::now();
    let probabilities = model.predict_proba(&candidates)?;
    let predict_seconds = started.elapsed().as_secs_f64();

    let mut scores: Vec<CandidateScore> = candidates
        .pairs
        .iter()
        .zip(&probabilities)
        .map(|(&(asn_a, asn_b), &probability)| CandidateScore {
            asn_a,
            asn_b,
            probability,
        })
        .collect();
    scores.sort_by(|a, b| {
        b.probability
            .total_cmp(&a.probability)
            .then(a.asn_a.cmp(&b.asn_a))
            .then(a.asn_b.cmp(&b.asn_b))
    });

    Ok(UnknownResult {
        variant,
        kind,
        anchors,
        n_train: labeled.len(),
        hyperparams: hp.clone(),
        scores,
        train_seconds,
        predict_seconds,
    })
}

impl UnknownResult {
    /// Candidates predicted to peer (probability at least one half).
    pub fn predicted_peering(&self) -> usize {
        self.scores.iter().filter(|s| s.probability >= 0.5).count()
    }

    pub fn to_output(&self) -> ExperimentOutput {
        let mut per_seed = ResultTable::new(["rank", "asn_a", "asn_b", "probability"]);
        for (i, score) in self.scores.iter().enumerate() {
            per_seed.push(vec![
                (i + 1).to_string(),
                score.asn_a.to_string(),
                score.asn_b.to_string(),
                cell(Some(score.probability)),
            ]);
        }
        let mut aggregate = ResultTable::new([
            "n_train",
            "n_candidates",
            "predicted_peering",
            "mean_probability",
        ]);
        let mean = self.scores.iter().map(|s| s.probability).sum::<f64>()
            / self.scores.len().max(1) as f64;
        aggregate.push(vec![
            self.n_train.to_string(),
            self.scores.len().to_string(),
            self.predicted_peering().to_string(),
            cell(Some(mean)),
        ]);
        let mut timings = ResultTable::new(["train_seconds", "predict_seconds"]);
        timings.push(vec![
            cell(Some(self.train_seconds)),
            cell(Some(self.predict_seconds)),
        ]);
        ExperimentOutput {
            name: "unknown".into(),
            config: json!({
                "variant": self.variant,
                "model": self.kind,
                "anchors": self.anchors,
                "hyperparams": self.hyperparams,
            }),
            per_seed,
            aggregate,
            timings,
        }
    }
}
