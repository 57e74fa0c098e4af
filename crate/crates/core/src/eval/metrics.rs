use serde::{Deserialize, Serialize};

use super::{EvalError, Result};

/// Counts with "server wins" (label 1) as the positive class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
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

    /// The same counts with label 0 as the positive class.
    pub fn flipped(&self) -> Self {
        Self {
            tp: self.tn,
            fp: self.fn_,
            tn: self.tp,
            fn_: self.fp,
        }
    }
}

pub fn confusion(y_true: &[u8], y_pred: &[u8]) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(EvalError::LengthMismatch {
            left: y_true.len(),
            right: y_pred.len(),
        });
    }
    let mut cm = ConfusionMatrix::default();
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t, p) {
            (1, 1) => cm.tp += 1,
            (0, 1) => cm.fp += 1,
            (0, 0) => cm.tn += 1,
            (1, 0) => cm.fn_ += 1,
            _ => return Err(EvalError::NonBinary),
        }
    }
    Ok(cm)
}

/// Threshold metrics. A ratio with a zero denominator is reported as 0 and
/// its name is listed in `zero_division`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub zero_division: Vec<String>,
}

fn ratio(num: f64, den: f64, name: &str, flags: &mut Vec<String>) -> f64 {
    if den == 0.0 {
        flags.push(name.to_string());
        0.0
    } else {
        num / den
    }
}

pub fn metrics(cm: &ConfusionMatrix) -> Result<Metrics> {
    let total = cm.total();
    if total == 0 {
        return Err(EvalError::EmptyMatrix);
    }
    let (tp, fp, tn, fn_) = (cm.tp as f64, cm.fp as f64, cm.tn as f64, cm.fn_ as f64);
    let mut flags = Vec::new();
    let precision = ratio(tp, tp + fp, "precision", &mut flags);
    let recall = ratio(tp, tp + fn_, "recall", &mut flags);
    let f1 = ratio(2.0 * precision * recall, precision + recall, "f1", &mut flags);
    Ok(Metrics {
        accuracy: (tp + tn) / total as f64,
        precision,
        recall,
        f1,
        zero_division: flags,
    })
}

/// Probability that a random positive outscores a random negative, ties
/// counting one half. Computed from midranks:
/// `(Σ ranks of positives − n₊(n₊+1)/2) / (n₊ n₋)`.
pub fn roc_auc(y_true: &[u8], scores: &[f64]) -> Result<f64> {
    if y_true.len() != scores.len() {
        return Err(EvalError::LengthMismatch {
            left: y_true.len(),
            right: scores.len(),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(EvalError::NonFinite);
    }
    let n_pos = y_true.iter().filter(|&&l| l == 1).count();
    let n_neg = y_true.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(EvalError::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // Ranks i+1 ..= j+1 share their mean.
        let midrank = (i + j + 2) as f64 / 2.0;
        let pos_in_run = order[i..=j].iter().filter(|&&k| y_true[k] == 1).count();
        rank_sum_pos += midrank * pos_in_run as f64;
        i = j + 1;
    }
    let (p, n) = (n_pos as f64, n_neg as f64);
    Ok((rank_sum_pos - p * (p + 1.0) / 2.0) / (p * n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn confusion_by_definition() {
        let cm = confusion(&[1, 1, 0, 0], &[1, 0, 0, 1]).unwrap();
        assert_eq!(cm, ConfusionMatrix { tp: 1, fp: 1, tn: 1, fn_: 1 });
        let m = metrics(&cm).unwrap();
        assert_eq!((m.accuracy, m.precision, m.recall, m.f1), (0.5, 0.5, 0.5, 0.5));
        assert!(confusion(&[1], &[1, 0]).is_err());
    }

    #[test]
    fn never_predicting_the_returner() {
        let cm = confusion(&[1, 1, 1, 0], &[1, 1, 1, 1]).unwrap();
        let returner = metrics(&cm.flipped()).unwrap();
        assert_eq!(returner.recall, 0.0);
        assert_eq!(returner.precision, 0.0);
        assert_eq!(returner.zero_division, vec!["precision".to_string(), "f1".to_string()]);
    }

    #[test]
    fn empty_matrix() {
        assert!(matches!(metrics(&ConfusionMatrix::default()), Err(EvalError::EmptyMatrix)));
    }

    #[test]
    fn auc_examples() {
        assert_eq!(roc_auc(&[0, 0, 1, 1], &[0.1, 0.2, 0.8, 0.9]).unwrap(), 1.0);
        // Pairs (pos, neg): (0.9, 0.8) win, (0.1, 0.8) loss → 1/2.
        assert_eq!(roc_auc(&[1, 0, 1], &[0.9, 0.8, 0.1]).unwrap(), 0.5);
        assert_eq!(roc_auc(&[1, 0, 1, 0], &[0.5; 4]).unwrap(), 0.5);
        assert!(matches!(roc_auc(&[1, 1], &[0.2, 0.3]), Err(EvalError::SingleClass)));
    }
}
