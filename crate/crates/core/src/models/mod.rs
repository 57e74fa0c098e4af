//! The five classifier families, written from scratch.
//!
//! | family     | fit                | probability                         |
//! |------------|--------------------|-------------------------------------|
//! | `baseline` | [`fit_prior_baseline`] | training server win rate        |
//! | `logistic` | [`fit_logistic`]   | `sigmoid(w·x + b)`                  |
//! | `forest`   | [`fit_forest`]     | share of trees voting "server wins" |
//! | `adaboost` | [`fit_adaboost`]   | `sigmoid(2 · Σ αₜ hₜ(x))`           |
//! | `gbt`      | [`fit_gbt`]        | `sigmoid(base + η · Σ trees)`       |
//!
//! [`ModelSpec`] pairs a family with its hyperparameters and [`fit`] dispatches
//! on it. [`ModelFile`] is the persisted, self-describing form.

mod adaboost;
mod baseline;
mod file;
mod forest;
mod gbt;
mod logistic;
mod matrix;
mod params;
mod tree;

pub use adaboost::{fit_adaboost, AdaBoostModel, AdaBoostParams};
pub use baseline::{fit_prior_baseline, BaselineModel};
pub use file::{ModelFile, MODEL_FORMAT};
pub use forest::{fit_forest, ForestModel, ForestParams};
pub use gbt::{fit_gbt, GbtModel, GbtParams};
pub use logistic::{fit_logistic, logistic_gradient, logistic_loss, LinearModel, LogisticParams};
pub use matrix::Matrix;
pub use params::{param_decls, Family, Hyperparams, ModelSpec, ParamDecl, ParamKind};
pub use tree::{entropy, fit_tree, BinnedMatrix, Node, Tree, TreeParams};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("no training rows")]
    EmptyInput,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("training diverged: loss became non-finite in epoch {epoch}")]
    DivergenceDetected { epoch: usize },
    #[error("feature schema mismatch: model expects {expected}, input has {found}")]
    SchemaMismatch { expected: String, found: String },
    #[error("model has no splits; gain importance is undefined")]
    NoSplits,
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("model file: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;

/// Inputs are clamped to `[-500, 500]` so `exp` never overflows.
pub fn sigmoid(z: f64) -> f64 {
    let z = z.clamp(-500.0, 500.0);
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

pub(crate) fn check_rows(x: &Matrix, y: &[u8]) -> Result<()> {
    if x.n_rows() == 0 {
        return Err(ModelError::EmptyInput);
    }
    if x.n_rows() != y.len() {
        return Err(ModelError::DimensionMismatch {
            expected: x.n_rows(),
            found: y.len(),
        });
    }
    if y.iter().any(|&l| l > 1) {
        return Err(ModelError::InvalidInput("labels must be 0 or 1".into()));
    }
    Ok(())
}

pub(crate) fn check_finite(x: &Matrix) -> Result<()> {
    match x.as_slice().iter().position(|v| !v.is_finite()) {
        Some(k) => Err(ModelError::InvalidInput(format!(
            "non-finite value at row {}, column {}",
            k / x.n_cols().max(1),
            k % x.n_cols().max(1)
        ))),
        None => Ok(()),
    }
}

/// A fitted model of any family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum FittedModel {
    Baseline(BaselineModel),
    Logistic(LinearModel),
    Forest(ForestModel),
    Adaboost(AdaBoostModel),
    Gbt(GbtModel),
}

impl FittedModel {
    pub fn family(&self) -> Family {
        match self {
            FittedModel::Baseline(_) => Family::Baseline,
            FittedModel::Logistic(_) => Family::Logistic,
            FittedModel::Forest(_) => Family::Forest,
            FittedModel::Adaboost(_) => Family::Adaboost,
            FittedModel::Gbt(_) => Family::Gbt,
        }
    }

    /// Expected input width; `None` for the input-independent baseline.
    pub fn n_features(&self) -> Option<usize> {
        match self {
            FittedModel::Baseline(_) => None,
            FittedModel::Logistic(m) => Some(m.weights.len()),
            FittedModel::Forest(m) => Some(m.n_features),
            FittedModel::Adaboost(m) => Some(m.n_features),
            FittedModel::Gbt(m) => Some(m.n_features),
        }
    }

    /// Probability that the server wins, one per row, each in `[0, 1]`.
    pub fn predict_proba(&self, x: &Matrix) -> Result<Vec<f64>> {
        if let Some(d) = self.n_features() {
            if x.n_cols() != d {
                return Err(ModelError::DimensionMismatch {
                    expected: d,
                    found: x.n_cols(),
                });
            }
        }
        check_finite(x)?;
        Ok(match self {
            FittedModel::Baseline(m) => m.predict_proba(x),
            FittedModel::Logistic(m) => m.predict_proba(x),
            FittedModel::Forest(m) => m.predict_proba(x),
            FittedModel::Adaboost(m) => m.predict_proba(x),
            FittedModel::Gbt(m) => m.predict_proba(x),
        })
    }

    /// Hard labels: 1 iff probability ≥ `threshold`.
    pub fn predict(&self, x: &Matrix, threshold: f64) -> Result<Vec<u8>> {
        Ok(self
            .predict_proba(x)?
            .into_iter()
            .map(|p| u8::from(p >= threshold))
            .collect())
    }
}

/// Fits the family named by `spec`. `seed` drives every random choice.
pub fn fit(spec: &ModelSpec, x: &Matrix, y: &[u8], seed: u64) -> Result<FittedModel> {
    Ok(match spec {
        ModelSpec::Baseline => FittedModel::Baseline(fit_prior_baseline(y)?),
        ModelSpec::Logistic(p) => FittedModel::Logistic(fit_logistic(x, y, p, seed)?),
        ModelSpec::Forest(p) => FittedModel::Forest(fit_forest(x, y, p, seed)?),
        ModelSpec::Adaboost(p) => FittedModel::Adaboost(fit_adaboost(x, y, p, seed)?),
        ModelSpec::Gbt(p) => FittedModel::Gbt(fit_gbt(x, y, p, seed)?),
    })
}
