//! Metrics, match-level cross-validation and random hyperparameter search.
//!
//! Threshold metrics treat "server wins" (label 1) as the positive class and
//! report any 0/0 ratio as 0, naming it in `zero_division`. Reports also
//! carry precision, recall and F1 for the returner class, which is how
//! "predicting the returner" is usually scored on this problem. ROC AUC is the
//! midrank statistic, so tied scores count one half and a constant predictor
//! scores exactly 0.5.

mod cv;
mod metrics;
mod report;
mod search;

pub use cv::{cross_validate, evaluate_model, split_identity, EvalOptions};
pub use metrics::{confusion, metrics, roc_auc, ConfusionMatrix, Metrics};
pub use report::{ClassScores, EvalReport, FoldScores, MeanScores, SUMMARY_HEADER};
pub use search::{
    random_search, select_best, write_trial_log, Distribution, SearchOutcome, SearchSpace, Trial, TRIAL_LOG_HEADER,
};

use thiserror::Error;

use crate::featureset::FeatureError;
use crate::models::ModelError;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("length mismatch: {left} labels vs {right} predictions")]
    LengthMismatch { left: usize, right: usize },
    #[error("labels and predictions must be 0 or 1")]
    NonBinary,
    #[error("scores must not be NaN")]
    NonFinite,
    #[error("confusion matrix is empty")]
    EmptyMatrix,
    #[error("roc_auc needs both classes")]
    SingleClass,
    #[error("split plan has fewer than 2 folds")]
    NoFolds,
    #[error("{0} has no rows to fit or evaluate")]
    EmptyFold(String),
    #[error("match `{0}` is both in the fitting data and in the evaluation data")]
    LeakageDetected(String),
    #[error("search space: {0}")]
    InvalidSpace(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = EvalError> = std::result::Result<T, E>;
