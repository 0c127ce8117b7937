//! Classification metrics over predicted peering labels.
//!
//! The positive class is "peers". Alongside overall accuracy the
//! per-class accuracies matter here because peering labels are heavily
//! imbalanced: a constant "peers" guess scores high overall while being
//! useless on the minority class. Any ratio whose denominator is empty is
//! reported as `None` rather than a made-up number.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Raw confusion counts; "positive" means a peering label.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub true_pos: usize,
    pub false_pos: usize,
    pub true_neg: usize,
    pub false_neg: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.true_neg + self.false_neg
    }
}

/// Confusion counts of a prediction against the truth. Labels must be 0
/// or 1 and the slices must be the same non-zero length.
pub fn confusion(y_true: &[u8], y_pred: &[u8]) -> Result<Confusion> {
    if y_true.is_empty() {
        return Err(Error::EmptyInput("no labels to evaluate".into()));
    }
    if y_true.len() != y_pred.len() {
        return Err(Error::InvalidArgument(format!(
            "{} true labels but {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    let mut c = Confusion::default();
    for (&truth, &pred) in y_true.iter().zip(y_pred) {
        if truth > 1 || pred > 1 {
            return Err(Error::InvalidArgument(format!(
                "labels must be 0 or 1, found truth {truth}, prediction {pred}"
            )));
        }
        match (truth, pred) {
            (1, 1) => c.true_pos += 1,
            (0, 1) => c.false_pos += 1,
            (0, 0) => c.true_neg += 1,
            _ => c.false_neg += 1,
        }
    }
    Ok(c)
}

/// Accuracy-style summary of a confusion table. `peering` and
/// `non_peering` are the per-class accuracies (recall on each class).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub confusion: Confusion,
    pub overall: f64,
    pub peering: Option<f64>,
    pub non_peering: Option<f64>,
    /// Mean of the two per-class accuracies, when both exist.
    pub balanced: Option<f64>,
    pub f1: Option<f64>,
}

impl Metrics {
    pub fn from_confusion(c: Confusion) -> Metrics {
        let ratio = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
        let peering = ratio(c.true_pos, c.true_pos + c.false_neg);
        let non_peering = ratio(c.true_neg, c.true_neg + c.false_pos);
        Metrics {
            confusion: c,
            overall: (c.true_pos + c.true_neg) as f64 / c.total() as f64,
            peering,
            non_peering,
            balanced: peering.zip(non_peering).map(|(p, n)| (p + n) / 2.0),
            f1: ratio(2 * c.true_pos, 2 * c.true_pos + c.false_pos + c.false_neg),
        }
    }
}

/// Evaluates hard predictions against true labels.
pub fn evaluate(y_true: &[u8], y_pred: &[u8]) -> Result<Metrics> {
    Ok(Metrics::from_confusion(confusion(y_true, y_pred)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Worked example: truth [1,1,1,0], prediction [1,1,0,0].
    /// tp=2, fn=1, tn=1, fp=0: overall 3/4, peering 2/3, non-peering 1,
    /// balanced 5/6, F1 = 4/(4+0+1) = 0.8.
    #[test]
    fn worked_example() {
        let m = evaluate(&[1, 1, 1, 0], &[1, 1, 0, 0]).unwrap();
        assert_eq!(
            m.confusion,
            Confusion { true_pos: 2, false_pos: 0, true_neg: 1, false_neg: 1 }
        );
        assert_eq!(m.overall, 0.75);
        assert_eq!(m.peering, Some(2.0 / 3.0));
        assert_eq!(m.non_peering, Some(1.0));
        assert!((m.balanced.unwrap() - 5.0 / 6.0).abs() < 1e-15);
        assert_eq!(m.f1, Some(0.8));
    }

    #[test]
    fn perfect_and_inverted_predictions() {
        let truth = [1, 0, 1, 0, 1];
        let perfect = evaluate(&truth, &truth).unwrap();
        assert_eq!(perfect.overall, 1.0);
        assert_eq!(perfect.balanced, Some(1.0));
        assert_eq!(perfect.f1, Some(1.0));

        let inverted: Vec<u8> = truth.iter().map(|&y| 1 - y).collect();
        let worst = evaluate(&truth, &inverted).unwrap();
        assert_eq!(worst.overall, 0.0);
        assert_eq!(worst.balanced, Some(0.0));
        assert_eq!(worst.f1, Some(0.0));
    }

    #[test]
    fn single_class_truth_degrades_gracefully() {
        // no negatives in the truth: non-peering accuracy is undefined
        let m = evaluate(&[1, 1, 1], &[1, 0, 1]).unwrap();
        assert_eq!(m.peering, Some(2.0 / 3.0));
        assert_eq!(m.non_peering, None);
        assert_eq!(m.balanced, None);
        assert_eq!(m.f1, Some(4.0 / 5.0));

        // all-negative truth and prediction: F1's denominator is empty too
        let m = evaluate(&[0, 0], &[0, 0]).unwrap();
        assert_eq!(m.overall, 1.0);
        assert_eq!(m.peering, None);
        assert_eq!(m.non_peering, Some(1.0));
        assert_eq!(m.f1, None);
    }

    #[test]
    fn identities_hold_on_exhaustive_small_cases() {
        // every (truth, prediction) pair of length 6: check the metric
        // identities against first-principles recomputation
        for mask in 0..(1u32 << 12) {
            let truth: Vec<u8> = (0..6).map(|i| ((mask >> i) & 1) as u8).collect();
            let pred: Vec<u8> = (6..12).map(|i| ((mask >> i) & 1) as u8).collect();
            let m = evaluate(&truth, &pred).unwrap();
            let c = m.confusion;
            assert_eq!(c.total(), 6);

            let correct = truth.iter().zip(&pred).filter(|(t, p)| t == p).count();
            assert_eq!(m.overall, correct as f64 / 6.0);

            let pos = truth.iter().filter(|&&t| t == 1).count();
            assert_eq!(c.true_pos + c.false_neg, pos);
            assert_eq!(m.peering.is_some(), pos > 0);
            assert_eq!(m.non_peering.is_some(), pos < 6);
            assert_eq!(m.balanced.is_some(), pos > 0 && pos < 6);
            if let (Some(p), Some(n), Some(b)) = (m.peering, m.non_peering, m.balanced) {
                assert!((b - (p + n) / 2.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn bad_inputs_are_rejected() {
        assert!(matches!(evaluate(&[], &[]), Err(Error::EmptyInput(_))));
        assert!(matches!(
            evaluate(&[1, 0], &[1]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            evaluate(&[1, 2], &[1, 0]),
            Err(Error::InvalidArgument(_))
        ));
    }
}
