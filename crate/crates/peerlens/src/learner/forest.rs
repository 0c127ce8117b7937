//! Random forest of Gini-grown classification trees.
//!
//! Each tree trains on a bootstrap resample of the rows (optional) and
//! considers a fresh uniformly drawn feature subset at every node. A
//! split's gain is the decrease in total Gini impurity, `n * gini(node)`
//! summed over the partition, and leaves keep the raw class counts of the
//! training rows that reached them. The forest's probability is the mean
//! over trees of the leaf's positive fraction. Trees grow in parallel
//! from per-tree derived seeds, so the forest is identical however many
//! threads run.

use rayon::prelude::*;

use crate::error::Result;
use crate::learner::tree::{Acc, SplitCriterion, TreeBuilder, TreeNode};
use crate::learner::{column_major, validate_training, Hyperparams, Model, ModelKind};
use crate::pairset::PairDataset;
use crate::seed;

use rand::Rng;

struct Gini<'a> {
    y: &'a [u8],
}

impl SplitCriterion for Gini<'_> {
    fn row_acc(&self, row: usize) -> Acc {
        if self.y[row] == 1 {
            Acc { a: 0.0, b: 1.0 }
        } else {
            Acc { a: 1.0, b: 0.0 }
        }
    }

    fn split_gain(&self, parent: Acc, left: Acc, right: Acc) -> Option<f64> {
        let size = |acc: Acc| acc.a + acc.b;
        if size(left) <= 0.0 || size(right) <= 0.0 {
            return None;
        }
        // n * gini = n - (neg^2 + pos^2) / n
        let weighted = |acc: Acc| {
            let n = size(acc);
            n - (acc.a * acc.a + acc.b * acc.b) / n
        };
        Some(weighted(parent) - weighted(left) - weighted(right))
    }

    fn leaf(&self, acc: Acc) -> TreeNode {
        TreeNode::LeafCounts { neg: acc.a, pos: acc.b }
    }
}

/// Trains a random forest. With `bootstrap` off and `features_per_split`
/// set to [`FeatureSubset::All`](crate::learner::FeatureSubset::All) the
/// forest is fully deterministic in its inputs and every tree is
/// identical, which is occasionally useful as a single-CART baseline.
pub fn train_forest(dataset: &PairDataset, hp: &Hyperparams) -> Result<Model> {
    validate_training(dataset, hp)?;
    let y = dataset.labels()?;
    let columns = column_major(dataset);
    let n = dataset.len();
    let features_per_node = hp.features_per_split.count(dataset.width());

    let grown: Vec<(crate::learner::Tree, Vec<f64>)> = (0..hp.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = seed::rng(hp.seed, "forest/tree", t as u64);
            let rows: Vec<usize> = if hp.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            let criterion = Gini { y };
            TreeBuilder {
                criterion: &criterion,
                columns: &columns,
                max_depth: hp.max_depth,
                features_per_node,
                rng: Some(rng),
                parallel: false,
            }
            .run(rows)
        })
        .collect();

    let mut trees = Vec::with_capacity(hp.n_trees);
    let mut feature_gain = vec![0.0; dataset.width()];
    for (tree, gains) in grown {
        for (total, g) in feature_gain.iter_mut().zip(gains) {
            *total += g;
        }
        trees.push(tree);
    }

    Ok(Model::new(
        ModelKind::Forest,
        dataset,
        hp.clone(),
        0.0,
        trees,
        feature_gain,
    ))
}
