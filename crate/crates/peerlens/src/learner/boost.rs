//! Gradient boosted trees for binary classification.
//!
//! Trees are fit one after another to the logistic loss gradients of the
//! running margin: for row probability `p` and label `y`, the gradient is
//! `p - y` and the hessian `p (1 - p)`. A split's gain is
//!
//! ```text
//! GL^2 / (HL + lambda) + GR^2 / (HR + lambda) - G^2 / (H + lambda)
//! ```
//!
//! over the gradient and hessian sums of the two children and the parent,
//! and a leaf contributes `-G / (H + lambda) * learning_rate` to the
//! margin. There is no row or feature sampling, so training is
//! deterministic with no randomness at all.

use crate::error::Result;
use crate::learner::tree::{Acc, SplitCriterion, TreeBuilder, TreeNode};
use crate::learner::{column_major, sigmoid, validate_training, Hyperparams, Model, ModelKind};
use crate::pairset::PairDataset;

struct GradHess {
    grad: Vec<f64>,
    hess: Vec<f64>,
    lambda: f64,
    min_child_weight: f64,
    learning_rate: f64,
}

impl SplitCriterion for GradHess {
    fn row_acc(&self, row: usize) -> Acc {
        Acc { a: self.grad[row], b: self.hess[row] }
    }

    fn split_gain(&self, parent: Acc, left: Acc, right: Acc) -> Option<f64> {
        if left.b < self.min_child_weight || right.b < self.min_child_weight {
            return None;
        }
        let score = |acc: Acc| acc.a * acc.a / (acc.b + self.lambda);
        Some(score(left) + score(right) - score(parent))
    }

    fn leaf(&self, acc: Acc) -> TreeNode {
        TreeNode::LeafScore {
            value: -acc.a / (acc.b + self.lambda) * self.learning_rate,
        }
    }
}

/// Trains a boosted ensemble. The model starts from a zero base margin
/// (probability one half) and adds `n_trees` trees of at most `max_depth`
/// levels.
pub fn train_boosted(dataset: &PairDataset, hp: &Hyperparams) -> Result<Model> {
    validate_training(dataset, hp)?;
    let y = dataset.labels()?;
    let columns = column_major(dataset);
    let n = dataset.len();

    let base_margin = 0.0;
    let mut margins = vec![base_margin; n];
    let mut trees = Vec::with_capacity(hp.n_trees);
    let mut feature_gain = vec![0.0; dataset.width()];

    for _ in 0..hp.n_trees {
        let mut grad = Vec::with_capacity(n);
        let mut hess = Vec::with_capacity(n);
        for (m, &label) in margins.iter().zip(y) {
            let p = sigmoid(*m);
            grad.push(p - f64::from(label));
            hess.push(p * (1.0 - p));
        }
        let criterion = GradHess {
            grad,
            hess,
            lambda: hp.lambda,
            min_child_weight: hp.min_child_weight,
            learning_rate: hp.learning_rate,
        };
        let builder = TreeBuilder {
            criterion: &criterion,
            columns: &columns,
            max_depth: hp.max_depth,
            features_per_node: dataset.width(),
            rng: None,
            parallel: true,
        };
        let (tree, gains) = builder.run((0..n).collect());
        for (m, row) in margins.iter_mut().zip(&dataset.x) {
            if let TreeNode::LeafScore { value } = tree.leaf_for(row) {
                *m += value;
            }
        }
        for (total, g) in feature_gain.iter_mut().zip(gains) {
            *total += g;
        }
        trees.push(tree);
    }

    Ok(Model::new(
        ModelKind::Boosted,
        dataset,
        hp.clone(),
        base_margin,
        trees,
        feature_gain,
    ))
}
