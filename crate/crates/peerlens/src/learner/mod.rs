//! Tree-ensemble classifiers over pair datasets.
//!
//! Two kinds share the same tree machinery: gradient boosted trees fit to
//! logistic gradients, and a random forest of Gini-grown trees. Both
//! handle missing values natively through learned per-split default
//! directions, so no imputation happens anywhere. Training is
//! deterministic given the dataset and hyperparameters; a saved model
//! records the dataset fingerprint it was fit to and refuses to score
//! datasets with a different column structure.

mod boost;
mod forest;
mod tree;

pub use boost::train_boosted;
pub use forest::train_forest;
pub use tree::{Tree, TreeNode};

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::catalog::Variant;
use crate::error::{Error, Result};
use crate::features::SchemaColumn;
use crate::fsio::{read_to_string, write_atomic};
use crate::pairset::{PairDataset, SchemaFingerprint};

const FORMAT: &str = "peerlens/model/v1";

/// How many features a forest node considers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSubset {
    /// `floor(sqrt(width))`, the usual forest default.
    Sqrt,
    All,
    Fixed(usize),
}

impl FeatureSubset {
    fn count(self, width: usize) -> usize {
        match self {
            FeatureSubset::Sqrt => ((width as f64).sqrt().floor() as usize).max(1),
            FeatureSubset::All => width,
            FeatureSubset::Fixed(m) => m,
        }
    }
}

/// Knobs for both ensemble kinds. The boosting-only fields
/// (`learning_rate`, `lambda`, `min_child_weight`) are ignored by the
/// forest; `bootstrap` and `features_per_split` are ignored by boosting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    /// L2 penalty on leaf values.
    pub lambda: f64,
    /// Minimum hessian sum per child for a boosted split.
    pub min_child_weight: f64,
    pub bootstrap: bool,
    pub features_per_split: FeatureSubset,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            n_trees: 100,
            max_depth: 6,
            learning_rate: 0.3,
            lambda: 1.0,
            min_child_weight: 1.0,
            bootstrap: true,
            features_per_split: FeatureSubset::Sqrt,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Boosted,
    Forest,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Boosted => "boosted",
            ModelKind::Forest => "forest",
        })
    }
}

/// A trained ensemble plus everything needed to apply and audit it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    format: String,
    pub kind: ModelKind,
    pub variant: Variant,
    pub fingerprint: SchemaFingerprint,
    pub columns: Vec<SchemaColumn>,
    pub hyperparams: Hyperparams,
    /// Margin every boosted prediction starts from; unused by the forest.
    pub base_margin: f64,
    pub trees: Vec<Tree>,
    /// Total split gain credited to each column during training.
    pub feature_gain: Vec<f64>,
}

impl Model {
    pub(crate) fn new(
        kind: ModelKind,
        dataset: &PairDataset,
        hyperparams: Hyperparams,
        base_margin: f64,
        trees: Vec<Tree>,
        feature_gain: Vec<f64>,
    ) -> Model {
        Model {
            format: FORMAT.into(),
            kind,
            variant: dataset.variant,
            fingerprint: dataset.fingerprint(),
            columns: dataset.columns.clone(),
            hyperparams,
            base_margin,
            trees,
            feature_gain,
        }
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    /// Peering probability for one feature row.
    ///
    /// The row must have the model's width; shorter rows read as missing,
    /// which is almost never what a caller wants, so batch entry points
    /// check the fingerprint instead.
    pub fn score_row(&self, row: &[Option<f64>]) -> f64 {
        match self.kind {
            ModelKind::Boosted => {
                let margin: f64 = self.base_margin
                    + self
                        .trees
                        .iter()
                        .map(|t| match t.leaf_for(row) {
                            TreeNode::LeafScore { value } => *value,
                            _ => 0.0,
                        })
                        .sum::<f64>();
                sigmoid(margin)
            }
            ModelKind::Forest => {
                let sum: f64 = self
                    .trees
                    .iter()
                    .map(|t| match t.leaf_for(row) {
                        TreeNode::LeafCounts { neg, pos } => pos / (neg + pos),
                        _ => 0.5,
                    })
                    .sum();
                sum / self.trees.len() as f64
            }
        }
    }

    /// Peering probabilities for every row of a dataset with the same
    /// column structure the model was trained on.
    pub fn predict_proba(&self, dataset: &PairDataset) -> Result<Vec<f64>> {
        if dataset.fingerprint() != self.fingerprint {
            return Err(Error::SchemaMismatch(format!(
                "model was trained on fingerprint {}, dataset has {}",
                self.fingerprint,
                dataset.fingerprint()
            )));
        }
        Ok(dataset.x.iter().map(|row| self.score_row(row)).collect())
    }

    /// Hard labels at the 0.5 threshold.
    pub fn predict_labels(&self, dataset: &PairDataset) -> Result<Vec<u8>> {
        Ok(self
            .predict_proba(dataset)?
            .into_iter()
            .map(|p| u8::from(p >= 0.5))
            .collect())
    }
}

pub(crate) fn sigmoid(margin: f64) -> f64 {
    1.0 / (1.0 + (-margin).exp())
}

/// Shared training-input checks: labels exist, both classes are present,
/// every present value is finite, and the hyperparameters make sense.
pub(crate) fn validate_training(dataset: &PairDataset, hp: &Hyperparams) -> Result<()> {
    let (pos, neg) = dataset.class_counts()?;
    if pos == 0 || neg == 0 {
        return Err(Error::TrainingData(format!(
            "both classes must be present, got {pos} peering and {neg} non-peering rows"
        )));
    }
    for (i, row) in dataset.x.iter().enumerate() {
        if row.len() != dataset.width() {
            return Err(Error::TrainingData(format!(
                "row {i} has {} cells, expected {}",
                row.len(),
                dataset.width()
            )));
        }
        for (c, cell) in row.iter().enumerate() {
            if let Some(v) = cell {
                if !v.is_finite() {
                    return Err(Error::TrainingData(format!(
                        "non-finite value {v} at row {i}, column {}",
                        dataset.columns[c].name
                    )));
                }
            }
        }
    }
    if hp.n_trees == 0 {
        return Err(Error::InvalidArgument("n_trees must be at least 1".into()));
    }
    if hp.max_depth == 0 {
        return Err(Error::InvalidArgument("max_depth must be at least 1".into()));
    }
    if !(hp.learning_rate > 0.0 && hp.learning_rate.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "learning_rate must be positive, got {}",
            hp.learning_rate
        )));
    }
    if !(hp.lambda >= 0.0 && hp.lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "lambda must be non-negative, got {}",
            hp.lambda
        )));
    }
    if !(hp.min_child_weight >= 0.0 && hp.min_child_weight.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "min_child_weight must be non-negative, got {}",
            hp.min_child_weight
        )));
    }
    if let FeatureSubset::Fixed(m) = hp.features_per_split {
        if m == 0 || m > dataset.width() {
            return Err(Error::InvalidArgument(format!(
                "features_per_split must be in 1..={}, got {m}",
                dataset.width()
            )));
        }
    }
    Ok(())
}

/// Transposes the row-major dataset into per-column vectors for the split
/// search.
pub(crate) fn column_major(dataset: &PairDataset) -> Vec<Vec<Option<f64>>> {
    (0..dataset.width())
        .map(|c| dataset.x.iter().map(|row| row[c]).collect())
        .collect()
}

pub fn save_model(path: impl AsRef<Path>, model: &Model) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(model)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Model> {
    let model: Model = serde_json::from_str(&read_to_string(path)?)?;
    if model.format != FORMAT {
        return Err(Error::ModelFormat(format!(
            "unsupported model format {:?}",
            model.format
        )));
    }
    if model.fingerprint != SchemaFingerprint::compute(model.variant, &model.columns) {
        return Err(Error::ModelFormat(
            "fingerprint does not match the stored column structure".into(),
        ));
    }
    if model.feature_gain.len() != model.columns.len() {
        return Err(Error::ModelFormat(format!(
            "{} gain entries for {} columns",
            model.feature_gain.len(),
            model.columns.len()
        )));
    }
    if model.trees.is_empty() {
        return Err(Error::ModelFormat("model has no trees".into()));
    }
    for (t, tree) in model.trees.iter().enumerate() {
        for (i, node) in tree.nodes().iter().enumerate() {
            match node {
                TreeNode::Split { feature, threshold, left, right, .. } => {
                    let bounds_ok = *left > i
                        && *right > i
                        && *left < tree.nodes().len()
                        && *right < tree.nodes().len();
                    if !bounds_ok || *feature >= model.columns.len() || !threshold.is_finite() {
                        return Err(Error::ModelFormat(format!(
                            "tree {t} node {i} is malformed"
                        )));
                    }
                }
                TreeNode::LeafScore { value } => {
                    if model.kind != ModelKind::Boosted || !value.is_finite() {
                        return Err(Error::ModelFormat(format!(
                            "tree {t} node {i}: score leaf in a {} model",
                            model.kind
                        )));
                    }
                }
                TreeNode::LeafCounts { neg, pos } => {
                    if model.kind != ModelKind::Forest || neg + pos <= 0.0 {
                        return Err(Error::ModelFormat(format!(
                            "tree {t} node {i}: count leaf in a {} model",
                            model.kind
                        )));
                    }
                }
            }
        }
    }
    Ok(model)
}
