//! Peering partner prediction for autonomous systems.
//!
//! `peerlens` turns three public views of the Internet (the AS-Rank
//! ranking, the PeeringDB `net` table, and an AS-relationship inference)
//! into a labeled dataset of AS pairs, trains tree-ensemble classifiers on
//! it, and predicts how likely two networks are to maintain a
//! settlement-free peering. The crate is organized as the pipeline runs:
//!
//! * [`ingest`]: parse the sources, intersect them into a [`ingest::Snapshot`],
//!   cache it, or generate a synthetic one;
//! * [`features`]: encode per-AS feature tables in one of three variants;
//! * [`cone`]: customer cones, point-of-presence sets, and pair affinity;
//! * [`pairset`]: assemble labeled pair datasets, split, resample, and
//!   perturb them;
//! * [`learner`]: gradient-boosted trees and random forests with native
//!   missing-value routing;
//! * [`metrics`], [`experiments`]: evaluation reports and the experiment
//!   suite;
//! * [`explain`]: feature importances and Shapley attributions;
//! * [`pipeline`]: one-call composition of the stages above.
//!
//! Everything randomized draws from a single master seed (see [`seed`]),
//! and every artifact writer produces byte-identical output on repeat runs.

pub mod catalog;
pub mod cone;
pub mod error;
pub mod experiments;
pub mod explain;
pub mod features;
pub mod fsio;
pub mod ingest;
pub mod learner;
pub mod metrics;
pub mod pairset;
pub mod pipeline;
pub mod seed;
pub mod types;

pub use error::{Error, Result};
