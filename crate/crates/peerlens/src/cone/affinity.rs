//! Point-of-presence affinity.
//!
//! For a pair of ASes with PoP sets of sizes `p1` and `p2` sharing `p0`
//! sites, the directed attraction of the second AS from the first's point
//! of view is the share of the pair's combined footprint that is new to
//! the first AS:
//!
//! ```text
//! a_12 = (p2 - p0) / ((p1 - p0) + (p2 - p0) + p0)
//! ```
//!
//! The denominator is the size of the union, so each direction lies in
//! [0, 1]. The symmetric affinity score is the geometric mean
//! `sqrt(a_12 * a_21)`, which lands in [0, 0.5]: it is zero as soon as one
//! set contains the other (nothing to gain for one side) and peaks at 0.5
//! for equal-size disjoint sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Affinity {
    /// Attraction of the second AS as seen by the first.
    pub ab: f64,
    /// Attraction of the first AS as seen by the second.
    pub ba: f64,
    /// Geometric mean of the two directions.
    pub score: f64,
}

/// Computes affinity from set sizes. `p0` is the common site count and may
/// not exceed either set size. Two empty sets have affinity zero by
/// definition.
pub fn affinity_from_counts(p1: u64, p2: u64, p0: u64) -> Result<Affinity> {
    if p0 > p1.min(p2) {
        return Err(Error::CommonPopsExceedSets { p1, p2, common: p0 });
    }
    if p1 == 0 && p2 == 0 {
        return Ok(Affinity {
            ab: 0.0,
            ba: 0.0,
            score: 0.0,
        });
    }
    let union = (p1 + p2 - p0) as f64;
    let ab = (p2 - p0) as f64 / union;
    let ba = (p1 - p0) as f64 / union;
    Ok(Affinity {
        ab,
        ba,
        score: (ab * ba).sqrt(),
    })
}
