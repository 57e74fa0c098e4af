use serde::{Deserialize, Serialize};

use super::metrics::{confusion, metrics, roc_auc, ConfusionMatrix};
use super::{EvalError, Result};
use crate::models::{Family, Hyperparams};
use crate::ArtifactStamp;

/// Precision, recall and F1 with the returner (label 0) as the positive
/// class.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub zero_division: Vec<String>,
}

/// Scores on one evaluation slice (a CV fold or the test split).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldScores {
    pub fold: String,
    pub n_rows: usize,
    pub accuracy: f64,
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
    /// `None` when the slice holds a single class.
    pub roc_auc: Option<f64>,
    pub confusion: ConfusionMatrix,
    pub returner: ClassScores,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub zero_division: Vec<String>,
}

impl FoldScores {
    pub fn score(name: &str, y: &[u8], proba: &[f64], threshold: f64) -> Result<Self> {
        let pred: Vec<u8> = proba.iter().map(|&p| u8::from(p >= threshold)).collect();
        let cm = confusion(y, &pred)?;
        let m = metrics(&cm)?;
        let roc_auc = match roc_auc(y, proba) {
            Ok(a) => Some(a),
            Err(EvalError::SingleClass) => {
                log::warn!("{name}: single class in evaluation rows; roc_auc undefined");
                None
            }
            Err(e) => return Err(e),
        };
        Ok(Self {
            fold: name.to_string(),
            n_rows: y.len(),
            accuracy: m.accuracy,
            recall: m.recall,
            precision: m.precision,
            f1: m.f1,
            roc_auc,
            confusion: cm,
            returner: {
                let r = metrics(&cm.flipped())?;
                ClassScores {
                    precision: r.precision,
                    recall: r.recall,
                    f1: r.f1,
                    zero_division: r.zero_division,
                }
            },
            zero_division: m.zero_division,
        })
    }
}

/// Arithmetic means over folds; `roc_auc` averages the defined folds only.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MeanScores {
    pub accuracy: f64,
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
    pub roc_auc: Option<f64>,
    #[serde(default)]
    pub returner: ClassScores,
}

impl MeanScores {
    pub fn of(folds: &[FoldScores]) -> Self {
        let n = folds.len().max(1) as f64;
        let mean = |f: fn(&FoldScores) -> f64| folds.iter().map(f).sum::<f64>() / n;
        let aucs: Vec<f64> = folds.iter().filter_map(|f| f.roc_auc).collect();
        Self {
            accuracy: mean(|f| f.accuracy),
            recall: mean(|f| f.recall),
            precision: mean(|f| f.precision),
            f1: mean(|f| f.f1),
            roc_auc: (!aucs.is_empty()).then(|| aucs.iter().sum::<f64>() / aucs.len() as f64),
            returner: ClassScores {
                precision: mean(|f| f.returner.precision),
                recall: mean(|f| f.returner.recall),
                f1: mean(|f| f.returner.f1),
                zero_division: Vec::new(),
            },
        }
    }
}

/// Evaluation summary. The top-level metric keys repeat `mean`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub family: Family,
    pub hyperparams: Hyperparams,
    pub serve_number: Option<u8>,
    /// `cv` or `test` (or another named hold-out).
    pub kind: String,
    /// Identity of the split the report was produced on.
    pub split: String,
    pub seed: u64,
    pub threshold: f64,
    pub accuracy: f64,
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
    pub roc_auc: Option<f64>,
    pub per_fold: Vec<FoldScores>,
    pub mean: MeanScores,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stamp: Option<ArtifactStamp>,
}

pub const SUMMARY_HEADER: &str = "family\tserve\tkind\tsplit\tseed\taccuracy\trecall\tprecision\tf1\troc_auc\treturner_recall\treturner_precision\treturner_f1";

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |v| format!("{v:.6}"))
}

impl EvalReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        family: Family,
        hyperparams: Hyperparams,
        serve_number: Option<u8>,
        kind: &str,
        split: String,
        seed: u64,
        threshold: f64,
        per_fold: Vec<FoldScores>,
    ) -> Self {
        let mean = MeanScores::of(&per_fold);
        Self {
            family,
            hyperparams,
            serve_number,
            kind: kind.to_string(),
            split,
            seed,
            threshold,
            accuracy: mean.accuracy,
            recall: mean.recall,
            precision: mean.precision,
            f1: mean.f1,
            roc_auc: mean.roc_auc,
            per_fold,
            mean,
            stamp: None,
        }
    }

    pub fn with_stamp(mut self, stamp: ArtifactStamp) -> Self {
        self.stamp = Some(stamp);
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// One tab-separated line matching [`SUMMARY_HEADER`].
    pub fn summary_row(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{}\t{:.6}\t{:.6}\t{:.6}",
            self.family,
            self.serve_number.map_or_else(|| "-".to_string(), |s| s.to_string()),
            self.kind,
            self.split,
            self.seed,
            self.accuracy,
            self.recall,
            self.precision,
            self.f1,
            opt(self.roc_auc),
            self.mean.returner.recall,
            self.mean.returner.precision,
            self.mean.returner.f1
        )
    }
}
