//! Controlled missing-value injection for robustness experiments.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::pairset::PairDataset;
use crate::seed;

/// Blanks `floor(fraction * n_rows)` cells in every column, choosing rows
/// uniformly without replacement and independently per column. Labels and
/// pair identities are untouched. On fully present data this leaves each
/// column with exactly that many missing entries; cells that were already
/// missing stay missing whether or not they are drawn.
pub fn inject_missing(
    dataset: &PairDataset,
    fraction: f64,
    master_seed: u64,
) -> Result<PairDataset> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidArgument(format!(
            "missing fraction must be in [0, 1], got {fraction}"
        )));
    }
    let n = dataset.len();
    let per_column = (n as f64 * fraction).floor() as usize;
    let mut out = dataset.clone();
    for col in 0..dataset.width() {
        let mut rows: Vec<usize> = (0..n).collect();
        rows.shuffle(&mut seed::rng(master_seed, "missing/column", col as u64));
        for &row in &rows[..per_column] {
            out.x[row][col] = None;
        }
    }
    Ok(out)
}
