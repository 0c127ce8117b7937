//! Decision tree arena and the exact greedy split search shared by both
//! ensemble kinds.
//!
//! Candidate thresholds are midpoints between consecutive distinct sorted
//! feature values; a row goes left when its value is strictly below the
//! threshold. Rows missing the feature follow a per-split default
//! direction, chosen by evaluating both directions and keeping the better
//! one. A split is accepted only when its gain is strictly positive, and
//! comparisons are strictly-greater throughout, so ties resolve to the
//! lowest feature index, then the lowest threshold, then sending missing
//! rows left.

use std::ops::{Add, Sub};

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// One tree node. `Split.left`/`right` index into the owning tree's arena
/// and always point past the node itself, so routing terminates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        default_left: bool,
        left: usize,
        right: usize,
    },
    /// Additive margin contribution (boosted trees).
    LeafScore { value: f64 },
    /// Training class counts reaching the leaf (forest trees).
    LeafCounts { neg: f64, pos: f64 },
}

/// A decision tree as an arena of nodes; the root is node 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tree {
    pub(crate) nodes: Vec<TreeNode>,
}

impl Tree {
    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    /// Routes a feature row to its leaf.
    pub fn leaf_for(&self, row: &[Option<f64>]) -> &TreeNode {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                TreeNode::Split {
                    feature,
                    threshold,
                    default_left,
                    left,
                    right,
                } => {
                    let go_left = match row.get(*feature).copied().flatten() {
                        Some(v) => v < *threshold,
                        None => *default_left,
                    };
                    idx = if go_left { *left } else { *right };
                }
                leaf => return leaf,
            }
        }
    }
}

/// Additive two-component statistic: gradient/hessian sums for boosting,
/// class counts for the forest.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Acc {
    pub a: f64,
    pub b: f64,
}

impl Add for Acc {
    type Output = Acc;
    fn add(self, rhs: Acc) -> Acc {
        Acc { a: self.a + rhs.a, b: self.b + rhs.b }
    }
}

impl Sub for Acc {
    type Output = Acc;
    fn sub(self, rhs: Acc) -> Acc {
        Acc { a: self.a - rhs.a, b: self.b - rhs.b }
    }
}

/// What a tree optimizes: per-row statistics, the gain of a candidate
/// partition, and the leaf made from a node's statistics.
pub(crate) trait SplitCriterion: Sync {
    fn row_acc(&self, row: usize) -> Acc;
    /// Gain of splitting `parent` into `left` and `right`; `None` when the
    /// partition violates a constraint (for example minimum child weight).
    fn split_gain(&self, parent: Acc, left: Acc, right: Acc) -> Option<f64>;
    fn leaf(&self, acc: Acc) -> TreeNode;
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
    missing_left: bool,
}

pub(crate) struct TreeBuilder<'a, C: SplitCriterion> {
    pub criterion: &'a C,
    /// Column-major feature matrix.
    pub columns: &'a [Vec<Option<f64>>],
    pub max_depth: usize,
    /// Features examined per node; below the full width this samples a
    /// fresh subset at every node from `rng`.
    pub features_per_node: usize,
    pub rng: Option<ChaCha8Rng>,
    /// Scan features in parallel. Only worthwhile when every node looks
    /// at the full feature set.
    pub parallel: bool,
}

impl<C: SplitCriterion> TreeBuilder<'_, C> {
    /// Grows one tree over `rows` (indices into the columns, duplicates
    /// allowed for bootstrap samples). Returns the tree and the gain each
    /// feature contributed through accepted splits.
    pub fn run(mut self, rows: Vec<usize>) -> (Tree, Vec<f64>) {
        assert!(!rows.is_empty(), "a tree needs at least one row");
        let mut nodes = Vec::new();
        let mut gains = vec![0.0; self.columns.len()];
        self.build(rows, 0, &mut nodes, &mut gains);
        (Tree { nodes }, gains)
    }

    fn node_acc(&self, rows: &[usize]) -> Acc {
        rows.iter()
            .fold(Acc::default(), |acc, &r| acc + self.criterion.row_acc(r))
    }

    fn build(
        &mut self,
        rows: Vec<usize>,
        depth: usize,
        nodes: &mut Vec<TreeNode>,
        gains: &mut Vec<f64>,
    ) -> usize {
        let parent = self.node_acc(&rows);
        let idx = nodes.len();
        nodes.push(self.criterion.leaf(parent));
        if depth >= self.max_depth || rows.len() < 2 {
            return idx;
        }

        let features: Vec<usize> = match &mut self.rng {
            Some(rng) if self.features_per_node < self.columns.len() => {
                let mut sampled =
                    rand::seq::index::sample(rng, self.columns.len(), self.features_per_node)
                        .into_vec();
                sampled.sort_unstable();
                sampled
            }
            _ => (0..self.columns.len()).collect(),
        };

        let this: &Self = self;
        let per_feature: Vec<Option<Candidate>> = if this.parallel {
            features
                .par_iter()
                .map(|&f| this.scan_feature(f, &rows, parent))
                .collect()
        } else {
            features
                .iter()
                .map(|&f| this.scan_feature(f, &rows, parent))
                .collect()
        };
        // sequential fold in ascending feature order keeps ties canonical
        let best = per_feature
            .into_iter()
            .flatten()
            .fold(None, |best: Option<Candidate>, c| match best {
                Some(b) if c.gain <= b.gain => Some(b),
                _ => Some(c),
            });
        let Some(best) = best else { return idx };

        gains[best.feature] += best.gain;
        let col = &self.columns[best.feature];
        let (mut left_rows, mut right_rows) = (Vec::new(), Vec::new());
        for &r in &rows {
            let go_left = match col[r] {
                Some(v) => v < best.threshold,
                None => best.missing_left,
            };
            if go_left {
                left_rows.push(r);
            } else {
                right_rows.push(r);
            }
        }
        drop(rows);
        let left = self.build(left_rows, depth + 1, nodes, gains);
        let right = self.build(right_rows, depth + 1, nodes, gains);
        nodes[idx] = TreeNode::Split {
            feature: best.feature,
            threshold: best.threshold,
            default_left: best.missing_left,
            left,
            right,
        };
        idx
    }

    /// Best strictly-positive-gain candidate on one feature, or `None`.
    fn scan_feature(&self, feature: usize, rows: &[usize], parent: Acc) -> Option<Candidate> {
        let col = &self.columns[feature];
        let mut present: Vec<(f64, usize)> = Vec::with_capacity(rows.len());
        let mut missing = Acc::default();
        for &r in rows {
            match col[r] {
                Some(v) => present.push((v, r)),
                None => missing = missing + self.criterion.row_acc(r),
            }
        }
        if present.len() < 2 {
            return None;
        }
        present.sort_unstable_by(|x, y| x.partial_cmp(y).expect("finite feature values"));

        let mut best: Option<Candidate> = None;
        let mut prefix = Acc::default();
        for window in 0..present.len() - 1 {
            let (value, row) = present[window];
            prefix = prefix + self.criterion.row_acc(row);
            let next = present[window + 1].0;
            if next == value {
                continue;
            }
            let threshold = (value + next) / 2.0;
            // adjacent floats can collapse the midpoint onto the lower
            // value, which would route nothing left
            if threshold <= value {
                continue;
            }
            for missing_left in [true, false] {
                let left = if missing_left { prefix + missing } else { prefix };
                let right = parent - left;
                if let Some(gain) = self.criterion.split_gain(parent, left, right) {
                    if gain > 0.0 && best.is_none_or(|b| gain > b.gain) {
                        best = Some(Candidate { gain, feature, threshold, missing_left });
                    }
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split(feature: usize, threshold: f64, default_left: bool, left: usize, right: usize) -> TreeNode {
        TreeNode::Split { feature, threshold, default_left, left, right }
    }

    #[test]
    fn routing_follows_thresholds_and_default_direction() {
        let tree = Tree {
            nodes: vec![
                split(0, 2.5, false, 1, 2),
                TreeNode::LeafScore { value: -1.0 },
                split(1, 0.5, true, 3, 4),
                TreeNode::LeafScore { value: 2.0 },
                TreeNode::LeafScore { value: 3.0 },
            ],
        };
        let leaf = |row: &[Option<f64>]| match tree.leaf_for(row) {
            TreeNode::LeafScore { value } => *value,
            _ => panic!("expected a score leaf"),
        };
        assert_eq!(leaf(&[Some(1.0), Some(9.0)]), -1.0);
        assert_eq!(leaf(&[Some(2.5), Some(0.0)]), 2.0); // boundary value goes right
        assert_eq!(leaf(&[Some(3.0), Some(0.7)]), 3.0);
        assert_eq!(leaf(&[None, Some(0.0)]), 2.0); // default right at root, left below
        assert_eq!(leaf(&[Some(4.0), None]), 2.0);
    }

    #[test]
    fn node_serialization_is_tagged() {
        let node = split(3, 1.5, true, 1, 2);
        let json = serde_json::to_string(&node).unwrap();
        assert!(json.contains("\"op\":\"split\""), "{json}");
        let back: TreeNode = serde_json::from_str(&json).unwrap();
        assert_eq!(back, node);

        let leaf = TreeNode::LeafCounts { neg: 2.0, pos: 5.0 };
        let json = serde_json::to_string(&leaf).unwrap();
        assert!(json.contains("\"op\":\"leaf_counts\""), "{json}");
    }
}
