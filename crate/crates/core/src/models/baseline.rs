use serde::{Deserialize, Serialize};

use super::{Matrix, ModelError, Result};

/// Predicts the training server win rate for every point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineModel {
    pub p_server_win: f64,
    pub n_fit: usize,
}

impl BaselineModel {
    pub fn predict_proba(&self, x: &Matrix) -> Vec<f64> {
        vec![self.p_server_win; x.n_rows()]
    }
}

pub fn fit_prior_baseline(labels: &[u8]) -> Result<BaselineModel> {
    if labels.is_empty() {
        return Err(ModelError::EmptyInput);
    }
    if labels.iter().any(|&l| l > 1) {
        return Err(ModelError::InvalidInput("labels must be 0 or 1".into()));
    }
    let wins = labels.iter().filter(|&&l| l == 1).count();
    Ok(BaselineModel {
        p_server_win: wins as f64 / labels.len() as f64,
        n_fit: labels.len(),
    })
}
