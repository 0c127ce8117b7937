//! Class rebalancing for labeled training sets.
//!
//! Peering and non-peering pairs rarely arrive in equal numbers. These
//! transforms equalize the class counts: duplicating minority rows,
//! discarding majority rows, or interpolating new minority rows between
//! nearest neighbors. They are meant for the training side only; applying
//! them to evaluation data would bias every metric.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::pairset::PairDataset;
use crate::seed;
use crate::types::ColumnKind;

fn class_indices(dataset: &PairDataset) -> Result<(Vec<usize>, Vec<usize>)> {
    let y = dataset.labels()?;
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (i, &label) in y.iter().enumerate() {
        if label == 1 {
            pos.push(i);
        } else {
            neg.push(i);
        }
    }
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::TrainingData(
            "rebalancing needs both classes present".into(),
        ));
    }
    Ok((pos, neg))
}

fn minority_majority(pos: Vec<usize>, neg: Vec<usize>) -> (Vec<usize>, Vec<usize>) {
    // exact tie: treat the positive class as the minority so the choice
    // does not depend on anything but the labels
    if pos.len() <= neg.len() {
        (pos, neg)
    } else {
        (neg, pos)
    }
}

/// Duplicates uniformly drawn minority rows (with replacement) until both
/// classes are the same size. Original rows keep their order; duplicates
/// append in draw order.
pub fn oversample(dataset: &PairDataset, master_seed: u64) -> Result<PairDataset> {
    let (pos, neg) = class_indices(dataset)?;
    let (minority, majority) = minority_majority(pos, neg);
    let mut rng = seed::rng(master_seed, "sample/over", 0);
    let mut indices: Vec<usize> = (0..dataset.len()).collect();
    for _ in 0..majority.len() - minority.len() {
        indices.push(minority[rng.random_range(0..minority.len())]);
    }
    Ok(dataset.take(&indices))
}

/// Keeps a uniform without-replacement choice of majority rows, as many
/// as there are minority rows, and drops the rest. Surviving rows keep
/// their original order.
pub fn undersample(dataset: &PairDataset, master_seed: u64) -> Result<PairDataset> {
    let (pos, neg) = class_indices(dataset)?;
    let (minority, mut majority) = minority_majority(pos, neg);
    let mut rng = seed::rng(master_seed, "sample/under", 0);
    majority.shuffle(&mut rng);
    majority.truncate(minority.len());

    let mut keep: Vec<usize> = minority.into_iter().chain(majority).collect();
    keep.sort_unstable();
    Ok(dataset.take(&keep))
}

/// Squared distance over coordinates where both rows are present. Rows
/// that share no present coordinate compare as infinitely far.
fn sq_distance(a: &[Option<f64>], b: &[Option<f64>]) -> f64 {
    let mut sum = 0.0;
    let mut shared = 0usize;
    for (va, vb) in a.iter().zip(b) {
        if let (Some(x), Some(y)) = (va, vb) {
            sum += (x - y) * (x - y);
            shared += 1;
        }
    }
    if shared == 0 {
        f64::INFINITY
    } else {
        sum
    }
}

/// Synthetic minority oversampling: each synthetic row interpolates
/// between a uniformly drawn minority row and one of its `k` nearest
/// minority neighbors at a uniform position. Numeric and datetime
/// coordinates interpolate when both rows have them; everything else
/// (including missing coordinates) copies from the drawn row. Synthesis
/// continues until the classes are equal; synthetic rows append in draw
/// order and reuse the drawn row's pair identity.
pub fn smote(dataset: &PairDataset, k: usize, master_seed: u64) -> Result<PairDataset> {
    if k == 0 {
        return Err(Error::InvalidArgument("smote needs k >= 1".into()));
    }
    let (pos, neg) = class_indices(dataset)?;
    let (minority, majority) = minority_majority(pos, neg);
    if minority.len() <= k {
        return Err(Error::TrainingData(format!(
            "smote with k={k} needs more than {k} minority rows, found {}",
            minority.len()
        )));
    }

    // k nearest minority neighbors per minority row, ties by row order
    let neighbors: Vec<Vec<usize>> = minority
        .iter()
        .map(|&i| {
            let mut by_distance: Vec<(f64, usize)> = minority
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| (sq_distance(&dataset.x[i], &dataset.x[j]), j))
                .collect();
            by_distance
                .sort_by(|a, b| a.0.partial_cmp(&b.0).expect("distances are not NaN").then(a.1.cmp(&b.1)));
            by_distance.into_iter().take(k).map(|(_, j)| j).collect()
        })
        .collect();

    let minority_label = dataset.labels()?[minority[0]];
    let mut rng = seed::rng(master_seed, "sample/smote", 0);
    let mut out = dataset.clone();
    for _ in 0..majority.len() - minority.len() {
        let pick = rng.random_range(0..minority.len());
        let seed_row = minority[pick];
        let neighbor = neighbors[pick][rng.random_range(0..k)];
        let u: f64 = rng.random();

        let row: Vec<Option<f64>> = dataset.columns.iter().enumerate().map(|(c, col)| {
            match (dataset.x[seed_row][c], dataset.x[neighbor][c], col.kind) {
                (Some(a), Some(b), ColumnKind::Numeric | ColumnKind::Datetime) => {
                    Some(a + u * (b - a))
                }
                (cell, _, _) => cell,
            }
        }).collect();

        out.x.push(row);
        out.pairs.push(dataset.pairs[seed_row]);
        out.y.as_mut().expect("labeled checked above").push(minority_label);
    }
    Ok(out)
}
