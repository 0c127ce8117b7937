//! Why did the model say that? Feature importances and per-prediction
//! attributions.
//!
//! Three complementary views: impurity importance (how much Gini a forest
//! feature removed), gain importance (how much loss reduction a feature's
//! splits earned during training), and Shapley values (how much each
//! feature moved one particular prediction away from a baseline). The
//! sequential drop study retrains with progressively fewer columns to
//! measure what accuracy each block of features is actually worth.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learner::{train_boosted, Hyperparams, Model, ModelKind, TreeNode};
use crate::metrics::{evaluate, Metrics};
use crate::pairset::PairDataset;
use crate::seed;

fn normalized(mut values: Vec<f64>) -> Vec<f64> {
    let total: f64 = values.iter().sum();
    if total > 0.0 {
        for v in &mut values {
            *v /= total;
        }
    }
    values
}

/// Mean decrease in impurity per column, normalized to sum to one.
///
/// Recomputed from the forest itself: leaf class counts roll up to every
/// internal node, so each split's weighted Gini decrease (relative to the
/// tree's root size) can be credited to its feature. Boosted trees store
/// margins, not counts, so only forests support this.
pub fn impurity_importance(model: &Model) -> Result<Vec<f64>> {
    if model.kind != ModelKind::Forest {
        return Err(Error::InvalidArgument(
            "impurity importance needs a forest; boosted models report gain importance".into(),
        ));
    }
    let mut totals = vec![0.0; model.width()];
    for tree in &model.trees {
        let nodes = tree.nodes();
        // children sit after their parent, so one reverse sweep fills
        // every node's class counts
        let mut counts = vec![(0.0, 0.0); nodes.len()];
        for (i, node) in nodes.iter().enumerate().rev() {
            counts[i] = match node {
                TreeNode::LeafCounts { neg, pos } => (*neg, *pos),
                TreeNode::Split { left, right, .. } => (
                    counts[*left].0 + counts[*right].0,
                    counts[*left].1 + counts[*right].1,
                ),
                TreeNode::LeafScore { .. } => {
                    return Err(Error::ModelFormat(
                        "forest tree contains a score leaf".into(),
                    ))
                }
            };
        }
        let root_size = counts[0].0 + counts[0].1;
        let weighted_gini = |(neg, pos): (f64, f64)| {
            let n = neg + pos;
            if n > 0.0 { n - (neg * neg + pos * pos) / n } else { 0.0 }
        };
        for (i, node) in nodes.iter().enumerate() {
            if let TreeNode::Split { feature, left, right, .. } = node {
                let decrease = weighted_gini(counts[i])
                    - weighted_gini(counts[*left])
                    - weighted_gini(counts[*right]);
                totals[*feature] += decrease / root_size;
            }
        }
    }
    for t in &mut totals {
        *t /= model.trees.len() as f64;
    }
    Ok(normalized(totals))
}

/// Training split gain per column, normalized to sum to one. Defined for
/// both model kinds.
pub fn gain_importance(model: &Model) -> Vec<f64> {
    normalized(model.feature_gain.clone())
}

/// Sums a per-pair-column importance vector down to per-AS columns: the
/// `_a` and `_b` sides merge, pair-level columns keep their own name.
/// Order follows first appearance.
pub fn fold_pair_columns(model: &Model, values: &[f64]) -> Vec<(String, f64)> {
    let mut order: Vec<String> = Vec::new();
    let mut totals: std::collections::BTreeMap<String, f64> = std::collections::BTreeMap::new();
    for (column, &v) in model.columns.iter().zip(values) {
        let base = column
            .name
            .strip_suffix("_a")
            .or_else(|| column.name.strip_suffix("_b"))
            .unwrap_or(&column.name)
            .to_string();
        if !totals.contains_key(&base) {
            order.push(base.clone());
        }
        *totals.entry(base).or_insert(0.0) += v;
    }
    order.into_iter().map(|name| {
        let v = totals[&name];
        (name, v)
    }).collect()
}

/// Shapley attribution of one prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribution {
    /// Per-column contributions; they sum to `prediction - baseline`.
    pub values: Vec<f64>,
    /// Mean model output over the background rows the estimate consumed.
    pub baseline: f64,
    pub prediction: f64,
}

/// Estimates Shapley values for `row`'s predicted probability by
/// permutation sampling.
///
/// Each round picks the next background row (round-robin) and walks a
/// uniformly random feature order, switching features from the background
/// value to `row`'s value one at a time; the prediction delta of each
/// switch is credited to that feature. Averaged over rounds this
/// converges to the Shapley values of the "replace a coalition's features
/// with the background's" game, and the telescoping sum makes
/// `values.sum() == prediction - baseline` hold exactly at any round
/// count.
pub fn shapley(
    model: &Model,
    row: &[Option<f64>],
    background: &PairDataset,
    n_permutations: usize,
    master_seed: u64,
) -> Result<Attribution> {
    if row.len() != model.width() {
        return Err(Error::InvalidArgument(format!(
            "row has {} cells, model expects {}",
            row.len(),
            model.width()
        )));
    }
    if background.fingerprint() != model.fingerprint {
        return Err(Error::SchemaMismatch(format!(
            "background fingerprint {} does not match the model's {}",
            background.fingerprint(),
            model.fingerprint
        )));
    }
    if background.is_empty() {
        return Err(Error::EmptyInput("background dataset is empty".into()));
    }
    if n_permutations == 0 {
        return Err(Error::InvalidArgument(
            "at least one permutation is needed".into(),
        ));
    }

    let width = model.width();
    let mut rng = seed::rng(master_seed, "shapley/perm", 0);
    let mut values = vec![0.0; width];
    let mut baseline_sum = 0.0;
    let mut order: Vec<usize> = (0..width).collect();
    for round in 0..n_permutations {
        let z = &background.x[round % background.len()];
        order.shuffle(&mut rng);
        let mut current = z.clone();
        let mut previous = model.score_row(&current);
        baseline_sum += previous;
        for &feature in &order {
            current[feature] = row[feature];
            let next = model.score_row(&current);
            values[feature] += next - previous;
            previous = next;
        }
    }
    for v in &mut values {
        *v /= n_permutations as f64;
    }
    Ok(Attribution {
        values,
        baseline: baseline_sum / n_permutations as f64,
        prediction: model.score_row(row),
    })
}

/// One step of the sequential drop study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropStep {
    /// How many names from the drop order were removed.
    pub dropped: usize,
    /// Pair-dataset width that remained.
    pub remaining_width: usize,
    pub metrics: Metrics,
}

/// Retrains a boosted model at each requested drop depth, removing
/// columns in the given order (least useful first), and evaluates on the
/// test side. Train and test must share a fingerprint. A drop count that
/// would remove every column is rejected.
pub fn sequential_drop<S: AsRef<str>>(
    train: &PairDataset,
    test: &PairDataset,
    drop_order: &[S],
    drop_counts: &[usize],
    hp: &Hyperparams,
) -> Result<Vec<DropStep>> {
    if train.fingerprint() != test.fingerprint() {
        return Err(Error::SchemaMismatch(
            "train and test datasets have different column structures".into(),
        ));
    }
    let mut steps = Vec::with_capacity(drop_counts.len());
    for &count in drop_counts {
        if count > drop_order.len() {
            return Err(Error::InvalidArgument(format!(
                "cannot drop {count} of {} names",
                drop_order.len()
            )));
        }
        let names: Vec<&str> = drop_order[..count].iter().map(AsRef::as_ref).collect();
        let train_k = train.without_columns(&names);
        let test_k = test.without_columns(&names);
        if train_k.width() == 0 {
            return Err(Error::InvalidArgument(
                "dropping these columns leaves no features".into(),
            ));
        }
        let model = train_boosted(&train_k, hp)?;
        let predicted = model.predict_labels(&test_k)?;
        steps.push(DropStep {
            dropped: count,
            remaining_width: train_k.width(),
            metrics: evaluate(test_k.labels()?, &predicted)?,
        });
    }
    Ok(steps)
}
