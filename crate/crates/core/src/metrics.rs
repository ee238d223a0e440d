//! Confusion counts, F1, G-mean and ROC AUC for binary classifiers.
//!
//! Ratios whose denominator is zero count as 0 (precision, recall, TPR, TNR
//! and F1 alike).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    /// Recall, also the true positive rate.
    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn specificity(&self) -> f64 {
        ratio(self.tn, self.tn + self.fp)
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Tallies predictions against truth with `positive` as the positive class.
pub fn confusion<T: PartialEq>(y_true: &[T], y_pred: &[T], positive: &T) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch {
            left: y_true.len(),
            right: y_pred.len(),
        });
    }
    let mut cm = ConfusionMatrix::default();
    for (t, p) in y_true.iter().zip(y_pred) {
        match (t == positive, p == positive) {
            (true, true) => cm.tp += 1,
            (false, true) => cm.fp += 1,
            (false, false) => cm.tn += 1,
            (true, false) => cm.fn_ += 1,
        }
    }
    Ok(cm)
}

pub fn f1_score(cm: &ConfusionMatrix) -> f64 {
    let (p, r) = (cm.precision(), cm.recall());
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

pub fn g_mean(cm: &ConfusionMatrix) -> f64 {
    (cm.recall() * cm.specificity()).sqrt()
}

/// Area under the ROC curve as the normalized Mann-Whitney statistic: the
/// share of (positive, negative) pairs where the positive scores higher, with
/// tied pairs counting one half.
///
/// Scores are sorted once and equal-score groups are collapsed, so the cost
/// is `O(n log n)`. Pair counts are accumulated as integers (twice the
/// statistic) so the only rounding is the final division.
pub fn roc_auc<T: PartialEq>(y_true: &[T], scores: &[f64], positive: &T) -> Result<f64> {
    if y_true.len() != scores.len() {
        return Err(Error::LengthMismatch {
            left: y_true.len(),
            right: scores.len(),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidConfig("scores contain NaN".into()));
    }
    let mut order: Vec<(f64, bool)> = scores
        .iter()
        .zip(y_true)
        .map(|(s, t)| (*s, t == positive))
        .collect();
    let n_pos = order.iter().filter(|(_, p)| *p).count() as u128;
    let n_neg = order.len() as u128 - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::NotBinary {
            found: usize::from(n_pos > 0) + usize::from(n_neg > 0),
        });
    }
    order.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut twice_u: u128 = 0;
    let mut neg_below: u128 = 0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end < order.len() && order[end].0 == order[start].0 {
            end += 1;
        }
        let group = &order[start..end];
        let pos = group.iter().filter(|(_, p)| *p).count() as u128;
        let neg = group.len() as u128 - pos;
        twice_u += 2 * pos * neg_below + pos * neg;
        neg_below += neg;
        start = end;
    }
    Ok(twice_u as f64 / (2 * n_pos * n_neg) as f64)
}

/// Scores for one (dataset, method, classifier, seed) evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub dataset: String,
    pub method: String,
    pub classifier: String,
    pub seed: u64,
    pub f1: f64,
    pub g_mean: f64,
    pub auc: f64,
    pub confusion: ConfusionMatrix,
}

impl EvalReport {
    /// Computes all scores from predictions and continuous scores.
    #[allow(clippy::too_many_arguments)]
    pub fn evaluate<T: PartialEq>(
        dataset: &str,
        method: &str,
        classifier: &str,
        seed: u64,
        y_true: &[T],
        y_pred: &[T],
        scores: &[f64],
        positive: &T,
    ) -> Result<Self> {
        let cm = confusion(y_true, y_pred, positive)?;
        Ok(EvalReport {
            dataset: dataset.to_string(),
            method: method.to_string(),
            classifier: classifier.to_string(),
            seed,
            f1: f1_score(&cm),
            g_mean: g_mean(&cm),
            auc: roc_auc(y_true, scores, positive)?,
            confusion: cm,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn cm(tp: u64, fp: u64, tn: u64, fn_: u64) -> ConfusionMatrix {
        ConfusionMatrix { tp, fp, tn, fn_ }
    }

    #[test]
    fn confusion_identity_and_degenerate() {
        let y = [1, 0, 1, 1, 0];
        let c = confusion(&y, &y, &1).unwrap();
        assert_eq!((c.fp, c.fn_), (0, 0));
        assert_eq!((c.tp, c.tn), (3, 2));

        let truth = [1, 1, 0, 0];
        let all_pos = [1, 1, 1, 1];
        let c = confusion(&truth, &all_pos, &1).unwrap();
        assert_eq!(c, cm(2, 2, 0, 0));
        assert!(confusion(&[1, 0], &[1], &1).is_err());
    }

    #[test]
    fn confusion_matches_tally() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(50);
        let t: Vec<u8> = (0..50).map(|_| rng.random_range(0..2)).collect();
        let p: Vec<u8> = (0..50).map(|_| rng.random_range(0..2)).collect();
        let c = confusion(&t, &p, &1).unwrap();
        let mut counts = [0u64; 4];
        for i in 0..50 {
            counts[(t[i] * 2 + p[i]) as usize] += 1;
        }
        // index = truth*2 + pred: 0 tn, 1 fp, 2 fn, 3 tp
        assert_eq!(c, cm(counts[3], counts[1], counts[0], counts[2]));
        assert_eq!(c.total(), 50);
    }

    #[test]
    fn f1_values() {
        assert!((f1_score(&cm(1, 1, 0, 1)) - 0.5).abs() < 1e-15);
        assert_eq!(f1_score(&cm(0, 5, 5, 5)), 0.0);
        assert_eq!(f1_score(&cm(0, 0, 9, 0)), 0.0);
        assert!((f1_score(&cm(50, 10, 0, 50)) - 0.625).abs() < 1e-15);
    }

    #[test]
    fn g_mean_values() {
        assert_eq!(g_mean(&cm(10, 0, 10, 0)), 1.0);
        assert!((g_mean(&cm(50, 10, 90, 50)) - (0.45f64).sqrt()).abs() < 1e-15);
        assert!((g_mean(&cm(50, 10, 90, 50)) - 0.6708).abs() < 1e-4);
        assert_eq!(g_mean(&cm(5, 5, 0, 0)), 0.0);
    }

    #[test]
    fn auc_basic_cases() {
        let y = [1, 1, 0, 0, 0];
        assert_eq!(roc_auc(&y, &[0.9, 0.8, 0.1, 0.2, 0.3], &1).unwrap(), 1.0);
        assert_eq!(roc_auc(&y, &[0.4; 5], &1).unwrap(), 0.5);
        assert_eq!(roc_auc(&y, &[0.0, 0.1, 0.5, 0.6, 0.7], &1).unwrap(), 0.0);
        assert!(roc_auc(&[1, 1], &[0.1, 0.2], &1).is_err());
        assert!(roc_auc(&[1, 0], &[0.1], &1).is_err());
        assert!(roc_auc(&[1, 0], &[f64::NAN, 0.1], &1).is_err());
    }

    fn pair_count_auc(y: &[bool], s: &[f64]) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..y.len() {
            for j in 0..y.len() {
                if y[i] && !y[j] {
                    den += 1.0;
                    if s[i] > s[j] {
                        num += 1.0;
                    } else if s[i] == s[j] {
                        num += 0.5;
                    }
                }
            }
        }
        num / den
    }

    proptest! {
        #[test]
        fn auc_matches_pair_counting(
            data in prop::collection::vec((any::<bool>(), 0u8..12), 2..100),
        ) {
            let y: Vec<bool> = data.iter().map(|d| d.0).collect();
            prop_assume!(y.iter().any(|v| *v) && y.iter().any(|v| !*v));
            let s: Vec<f64> = data.iter().map(|d| d.1 as f64 / 4.0).collect();
            let auc = roc_auc(&y, &s, &true).unwrap();
            prop_assert!((auc - pair_count_auc(&y, &s)).abs() <= 1e-12);
            prop_assert!((0.0..=1.0).contains(&auc));
            // strictly increasing transform
            let t: Vec<f64> = s.iter().map(|v| (v * 3.0).exp() - 7.0).collect();
            prop_assert!((roc_auc(&y, &t, &true).unwrap() - auc).abs() <= 1e-12);
        }

        #[test]
        fn auc_complement_without_ties(
            labels in prop::collection::vec(any::<bool>(), 2..60),
            seed in any::<u64>(),
        ) {
            prop_assume!(labels.iter().any(|v| *v) && labels.iter().any(|v| !*v));
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let s: Vec<f64> = (0..labels.len()).map(|_| rng.random::<f64>()).collect();
            let neg: Vec<f64> = s.iter().map(|v| -v).collect();
            let sum = roc_auc(&labels, &s, &true).unwrap() + roc_auc(&labels, &neg, &true).unwrap();
            prop_assert!((sum - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn scores_scale_invariant(tp in 0u64..50, fp in 0u64..50, tn in 0u64..50, fn_ in 0u64..50, m in 1u64..20) {
            let a = cm(tp, fp, tn, fn_);
            let b = cm(tp * m, fp * m, tn * m, fn_ * m);
            prop_assert!((f1_score(&a) - f1_score(&b)).abs() <= 1e-12);
            prop_assert!((g_mean(&a) - g_mean(&b)).abs() <= 1e-12);
            prop_assert!((0.0..=1.0).contains(&f1_score(&a)));
            prop_assert!((0.0..=1.0).contains(&g_mean(&a)));
        }
    }
}
