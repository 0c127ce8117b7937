//! Train/test partitions of a pair dataset.
//!
//! Three regimes, from easiest to hardest for a model: a random holdout
//! over pairs, an AS-universe split that controls how many endpoints of a
//! test pair were seen in training, and a temporal restriction that
//! evaluates on an older snapshot's rows for pairs that still exist.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::pairset::PairDataset;
use crate::seed;
use crate::types::AsnId;

/// Uniform shuffle split over rows. The training side receives
/// `floor(n * train_fraction)` rows, the test side the rest; both must end
/// up non-empty. Row order within each side follows the shuffle.
pub fn random_holdout(
    dataset: &PairDataset,
    train_fraction: f64,
    master_seed: u64,
) -> Result<(PairDataset, PairDataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "train fraction must be in (0, 1), got {train_fraction}"
        )));
    }
    let n = dataset.len();
    let n_train = (n as f64 * train_fraction).floor() as usize;
    if n_train == 0 || n_train == n {
        return Err(Error::InvalidArgument(format!(
            "holdout of {n} rows at fraction {train_fraction} leaves an empty side"
        )));
    }
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(&mut seed::rng(master_seed, "split/holdout", 0));
    Ok((
        dataset.take(&indices[..n_train]),
        dataset.take(&indices[n_train..]),
    ))
}

/// An AS-universe split: endpoints are partitioned into two sets and each
/// pair lands in a group by how its endpoints fall.
#[derive(Debug, Clone)]
pub struct UniverseSplit {
    pub set1: BTreeSet<AsnId>,
    pub set2: BTreeSet<AsnId>,
    /// Both endpoints in set 1: the training world.
    pub group_a: PairDataset,
    /// One endpoint in each set: partially unseen pairs.
    pub group_b: PairDataset,
    /// Both endpoints in set 2: fully unseen pairs.
    pub group_c: PairDataset,
}

/// Splits the distinct endpoint ASes of `dataset` uniformly in half
/// (set 1 gets the extra AS when the count is odd) and groups every pair
/// by endpoint membership. Training on group A and evaluating on B and C
/// measures how performance degrades as endpoints leave the training
/// universe.
pub fn disjoint_universe(dataset: &PairDataset, master_seed: u64) -> Result<UniverseSplit> {
    let universe: BTreeSet<AsnId> = dataset.pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    if universe.len() < 2 {
        return Err(Error::InvalidArgument(
            "universe split needs at least two distinct ASes".into(),
        ));
    }
    let mut shuffled: Vec<AsnId> = universe.into_iter().collect();
    shuffled.shuffle(&mut seed::rng(master_seed, "split/universe", 0));
    let n_set1 = shuffled.len().div_ceil(2);
    let set1: BTreeSet<AsnId> = shuffled[..n_set1].iter().copied().collect();
    let set2: BTreeSet<AsnId> = shuffled[n_set1..].iter().copied().collect();

    let (mut a, mut b, mut c) = (Vec::new(), Vec::new(), Vec::new());
    for (idx, &(x, y)) in dataset.pairs.iter().enumerate() {
        match (set1.contains(&x), set1.contains(&y)) {
            (true, true) => a.push(idx),
            (false, false) => c.push(idx),
            _ => b.push(idx),
        }
    }
    Ok(UniverseSplit {
        set1,
        set2,
        group_a: dataset.take(&a),
        group_b: dataset.take(&b),
        group_c: dataset.take(&c),
    })
}

/// Rows of `older` whose pair also appears in `reference`, in `older`'s
/// row order. Evaluating a model trained on the newer snapshot against
/// this subset asks whether it would have predicted the past correctly
/// for the pairs both snapshots know about. Schemas must match.
pub fn temporal_pairs(older: &PairDataset, reference: &PairDataset) -> Result<PairDataset> {
    if older.fingerprint() != reference.fingerprint() {
        return Err(Error::SchemaMismatch(format!(
            "expected fingerprint {}, found {}",
            reference.fingerprint(),
            older.fingerprint()
        )));
    }
    let keep: BTreeSet<(AsnId, AsnId)> = reference.pairs.iter().copied().collect();
    let indices: Vec<usize> = older
        .pairs
        .iter()
        .enumerate()
        .filter(|(_, p)| keep.contains(p))
        .map(|(i, _)| i)
        .collect();
    if indices.is_empty() {
        return Err(Error::EmptyInput(
            "no pair of the older dataset appears in the reference".into(),
        ));
    }
    Ok(older.take(&indices))
}
