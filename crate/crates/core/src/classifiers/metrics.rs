//! Confusion matrix and class-frequency-weighted evaluation metrics.

use serde::{Deserialize, Serialize};

use super::{ClassifierError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub class_universe: Vec<String>,
    /// `counts[truth][predicted]`
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn true_positives(&self, c: usize) -> usize {
        self.counts[c][c]
    }

    pub fn support(&self, c: usize) -> usize {
        self.counts[c].iter().sum()
    }

    pub fn predicted(&self, c: usize) -> usize {
        self.counts.iter().map(|row| row[c]).sum()
    }
}

/// Averages over classes weighted by true-class frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluationSummary {
    pub tp_rate: f64,
    pub fp_rate: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn evaluate<T: AsRef<str>, P: AsRef<str>>(
    truth: &[T],
    predicted: &[P],
    universe: &[String],
) -> Result<(ConfusionMatrix, EvaluationSummary)> {
    if truth.len() != predicted.len() {
        return Err(ClassifierError::LengthMismatch(
            truth.len(),
            predicted.len(),
        ));
    }
    if truth.is_empty() {
        return Err(ClassifierError::EmptyEvaluation);
    }
    let position = |label: &str| {
        universe
            .iter()
            .position(|u| u == label)
            .ok_or_else(|| ClassifierError::LabelOutsideUniverse(label.to_string()))
    };
    let c = universe.len();
    let mut counts = vec![vec![0usize; c]; c];
    for (t, p) in truth.iter().zip(predicted) {
        counts[position(t.as_ref())?][position(p.as_ref())?] += 1;
    }
    let cm = ConfusionMatrix {
        class_universe: universe.to_vec(),
        counts,
    };

    let n = cm.total();
    let mut correct = 0;
    let (mut fp_rate, mut precision, mut f1) = (0.0, 0.0, 0.0);
    for k in 0..c {
        let support = cm.support(k);
        let tp = cm.true_positives(k);
        let fp = cm.predicted(k) - tp;
        let tn = n - support - fp;
        correct += tp;
        let p = ratio(tp, tp + fp);
        let r = ratio(tp, support);
        let f = if p + r > 0.0 {
            2.0 * p * r / (p + r)
        } else {
            0.0
        };
        let weight = support as f64;
        fp_rate += weight * ratio(fp, fp + tn);
        precision += weight * p;
        f1 += weight * f;
    }
    let n_f = n as f64;
    // Weighted recall sum_k (n_k/n)(tp_k/n_k) collapses to sum_k tp_k / n.
    let recall = ratio(correct, n);
    let summary = EvaluationSummary {
        tp_rate: recall,
        fp_rate: (fp_rate / n_f).clamp(0.0, 1.0),
        precision: (precision / n_f).clamp(0.0, 1.0),
        recall,
        f1: (f1 / n_f).clamp(0.0, 1.0),
    };
    Ok((cm, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(labels: &[&str]) -> Vec<String> {
        labels.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn perfect() {
        let truth = ["a", "b", "b", "c"];
        let (cm, s) = evaluate(&truth, &truth, &u(&["a", "b", "c"])).unwrap();
        assert_eq!(cm.total(), 4);
        assert_eq!(
            s,
            EvaluationSummary {
                tp_rate: 1.0,
                fp_rate: 0.0,
                precision: 1.0,
                recall: 1.0,
                f1: 1.0
            }
        );
    }

    #[test]
    fn all_wrong() {
        let (_, s) = evaluate(&["1", "2", "1"], &["2", "1", "2"], &u(&["1", "2"])).unwrap();
        assert_eq!(s.tp_rate, 0.0);
        assert_eq!(s.fp_rate, 1.0);
        assert_eq!(s.f1, 0.0);
    }

    #[test]
    fn hand_computed_binary() {
        // truth: 6 x "p", 4 x "n"; 5 of the p and 2 of the n are right.
        let truth = u(&["p", "p", "p", "p", "p", "p", "n", "n", "n", "n"]);
        let pred = u(&["p", "p", "p", "p", "p", "n", "n", "n", "p", "p"]);
        let (cm, s) = evaluate(&truth, &pred, &u(&["n", "p"])).unwrap();
        assert_eq!(cm.counts, vec![vec![2, 2], vec![1, 5]]);
        // p: P=5/7 R=5/6 FPR=2/4; n: P=2/3 R=2/4 FPR=1/6.
        let (pp, rp) = (5.0 / 7.0, 5.0 / 6.0);
        let (pn, rn) = (2.0 / 3.0, 0.5);
        let f = |p: f64, r: f64| 2.0 * p * r / (p + r);
        assert!((s.tp_rate - 0.7).abs() < 1e-15);
        assert!((s.precision - (0.6 * pp + 0.4 * pn)).abs() < 1e-12);
        assert!((s.fp_rate - (0.6 * 0.5 + 0.4 / 6.0)).abs() < 1e-12);
        assert!((s.f1 - (0.6 * f(pp, rp) + 0.4 * f(pn, rn))).abs() < 1e-12);
    }

    #[test]
    fn absent_class_has_zero_weight() {
        let (_, s) = evaluate(&["a", "a"], &["a", "z"], &u(&["a", "z"])).unwrap();
        assert_eq!(s.tp_rate, 0.5);
        assert_eq!(s.precision, 1.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            evaluate(&["a"], &["a", "b"], &u(&["a"])),
            Err(ClassifierError::LengthMismatch(1, 2))
        ));
        assert!(matches!(
            evaluate(&["a"], &["q"], &u(&["a"])),
            Err(ClassifierError::LabelOutsideUniverse(_))
        ));
    }
}
