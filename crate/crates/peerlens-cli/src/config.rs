//! Config-file layer and flag resolution.
//!
//! A config file is optional TOML whose keys mirror the flags; resolution
//! order everywhere is flag, then config file, then built-in default. The
//! resolved values, defaults included, end up in the run manifest.

use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use peerlens::catalog::Variant;
use peerlens::error::{Error, Result};
use peerlens::experiments::Rebalance;
use peerlens::fsio;
use peerlens::learner::{FeatureSubset, Hyperparams, ModelKind};
use peerlens::types::AsnId;
use serde::Deserialize;

use crate::args::HpArgs;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub variant: Option<String>,
    pub model: Option<String>,
    pub train_fraction: Option<f64>,
    pub seeds: Option<u64>,
    #[serde(default)]
    pub synth: SynthConfig,
    #[serde(default)]
    pub hyperparams: HpConfig,
    #[serde(default)]
    pub experiment: ExperimentConfig,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub n: Option<usize>,
    pub date: Option<String>,
    pub peer_ratio: Option<f64>,
    pub multi_home_prob: Option<f64>,
    pub coverage: Option<f64>,
    pub affinity_floor: Option<f64>,
    pub missing_scale: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HpConfig {
    pub n_trees: Option<usize>,
    pub max_depth: Option<usize>,
    pub learning_rate: Option<f64>,
    pub lambda: Option<f64>,
    pub min_child_weight: Option<f64>,
    pub bootstrap: Option<bool>,
    pub features_per_split: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub train_size_fractions: Option<Vec<f64>>,
    pub missing_fractions: Option<Vec<f64>>,
    pub strategies: Option<Vec<String>>,
    pub anchor_count: Option<usize>,
    pub drop_order: Option<Vec<String>>,
    pub drop_counts: Option<Vec<usize>>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<FileConfig> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = fsio::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| {
            let line = e
                .span()
                .map(|span| text[..span.start.min(text.len())].matches('\n').count() + 1)
                .unwrap_or(1);
            Error::Parse {
                file: path.display().to_string(),
                line,
                msg: e.message().to_string(),
            }
        })
    }
}

pub fn resolve<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Like [`resolve`] but with no sensible default; `what` names the flag
/// and config key for the error message.
pub fn resolve_required<T>(flag: Option<T>, file: Option<T>, what: &str) -> Result<T> {
    flag.or(file)
        .ok_or_else(|| Error::InvalidArgument(format!("{what} is required")))
}

pub fn resolve_variant(flag: &Option<String>, file: &Option<String>) -> Result<Variant> {
    match flag.as_deref().or(file.as_deref()) {
        Some(s) => s.parse(),
        None => Ok(Variant::Optimum),
    }
}

pub fn resolve_kind(flag: &Option<String>, file: &Option<String>) -> Result<ModelKind> {
    match flag.as_deref().or(file.as_deref()) {
        None | Some("boosted") => Ok(ModelKind::Boosted),
        Some("forest") => Ok(ModelKind::Forest),
        Some(other) => Err(Error::InvalidArgument(format!(
            "unknown model kind {other:?}, expected boosted or forest"
        ))),
    }
}

pub fn resolve_date(flag: Option<NaiveDate>, file: &Option<String>) -> Result<Option<NaiveDate>> {
    match (flag, file) {
        (Some(date), _) => Ok(Some(date)),
        (None, Some(s)) => s
            .parse()
            .map(Some)
            .map_err(|_| Error::InvalidArgument(format!("not a YYYY-MM-DD date: {s:?}"))),
        (None, None) => Ok(None),
    }
}

fn parse_feature_subset(s: &str) -> Result<FeatureSubset> {
    match s {
        "sqrt" => Ok(FeatureSubset::Sqrt),
        "all" => Ok(FeatureSubset::All),
        other => match other.parse::<usize>() {
            Ok(n) if n > 0 => Ok(FeatureSubset::Fixed(n)),
            _ => Err(Error::InvalidArgument(format!(
                "features per split must be sqrt, all, or a positive count, got {other:?}"
            ))),
        },
    }
}

pub fn resolve_hyperparams(flags: &HpArgs, file: &HpConfig, seed: u64) -> Result<Hyperparams> {
    let d = Hyperparams::default();
    let subset = match flags.features_per_split.as_deref().or(file.features_per_split.as_deref()) {
        Some(s) => parse_feature_subset(s)?,
        None => d.features_per_split,
    };
    Ok(Hyperparams {
        n_trees: resolve(flags.trees, file.n_trees, d.n_trees),
        max_depth: resolve(flags.depth, file.max_depth, d.max_depth),
        learning_rate: resolve(flags.learning_rate, file.learning_rate, d.learning_rate),
        lambda: resolve(flags.lambda, file.lambda, d.lambda),
        min_child_weight: resolve(
            flags.min_child_weight,
            file.min_child_weight,
            d.min_child_weight,
        ),
        bootstrap: resolve(flags.bootstrap, file.bootstrap, d.bootstrap),
        features_per_split: subset,
        seed,
    })
}

/// The documented seed expansion: repetition i of an experiment runs with
/// `seed::derive(master, "run", i)`.
pub fn expand_seeds(master: u64, count: u64) -> Vec<u64> {
    (0..count).map(|i| peerlens::seed::derive(master, "run", i)).collect()
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty())
}

pub fn parse_fractions(s: &str) -> Result<Vec<f64>> {
    split_list(s)
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("not a fraction: {t:?}")))
        })
        .collect()
}

pub fn parse_counts(s: &str) -> Result<Vec<usize>> {
    split_list(s)
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("not a count: {t:?}")))
        })
        .collect()
}

pub fn parse_names(s: &str) -> Vec<String> {
    split_list(s).map(String::from).collect()
}

pub fn parse_anchors(s: &str) -> Result<Vec<AsnId>> {
    split_list(s).map(AsnId::from_str).collect()
}

pub fn parse_strategies<'a>(names: impl Iterator<Item = &'a str>) -> Result<Vec<Rebalance>> {
    names.map(Rebalance::from_str).collect()
}
