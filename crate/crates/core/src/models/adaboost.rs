use serde::{Deserialize, Serialize};

use super::tree::{fit_tree_binned, BinnedMatrix, Tree, TreeParams};
use super::{check_rows, sigmoid, Matrix, ModelError, Result};

/// Floor on the weighted error of a perfect weak learner, keeping its stage
/// weight finite.
const MIN_ERROR: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaBoostParams {
    pub rounds: usize,
    pub weak_depth: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaBoostModel {
    pub learners: Vec<Tree>,
    pub alphas: Vec<f64>,
    /// Weighted error εₜ of each kept learner.
    pub stage_errors: Vec<f64>,
    pub n_features: usize,
}

/// Weak-learner vote mapped to ±1.
fn vote(tree: &Tree, row: &[f64]) -> f64 {
    if tree.predict_row(row) >= 0.5 {
        1.0
    } else {
        -1.0
    }
}

impl AdaBoostModel {
    /// `Σ αₜ hₜ(x)` with `hₜ ∈ {−1, +1}`.
    pub fn score_row(&self, row: &[f64]) -> f64 {
        self.learners.iter().zip(&self.alphas).map(|(t, a)| a * vote(t, row)).sum()
    }

    /// `sigmoid(2 · score)`, the logistic reading of the exponential loss.
    pub fn predict_proba(&self, x: &Matrix) -> Vec<f64> {
        x.rows().map(|r| sigmoid(2.0 * self.score_row(r))).collect()
    }

    /// `Π 2·sqrt(εₜ(1 − εₜ))`, an upper bound on the training error.
    pub fn error_bound(&self) -> f64 {
        self.stage_errors.iter().map(|e| 2.0 * (e * (1.0 - e)).sqrt()).product()
    }
}

/// Discrete AdaBoost over entropy trees of depth `weak_depth`. Stops early
/// when a learner is no better than chance (εₜ ≥ ½, learner dropped) or
/// perfect (εₜ = 0, learner kept with ε floored at 1e-10).
pub fn fit_adaboost(x: &Matrix, y: &[u8], params: &AdaBoostParams, seed: u64) -> Result<AdaBoostModel> {
    check_rows(x, y)?;
    if params.weak_depth == 0 {
        return Err(ModelError::InvalidHyperparameter("weak_depth must be at least 1".into()));
    }
    let binned = BinnedMatrix::new(x)?;
    let n = y.len();
    let signs: Vec<f64> = y.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
    let mut w = vec![1.0 / n as f64; n];
    let mut model = AdaBoostModel {
        learners: Vec::new(),
        alphas: Vec::new(),
        stage_errors: Vec::new(),
        n_features: x.n_cols(),
    };
    let tp = TreeParams {
        max_depth: Some(params.weak_depth),
        min_leaf: 1,
        m_try: None,
        seed,
    };
    for _ in 0..params.rounds {
        let tree = fit_tree_binned(&binned, y, &w, &tp);
        let h: Vec<f64> = x.rows().map(|r| vote(&tree, r)).collect();
        let total: f64 = w.iter().sum();
        let err: f64 = w
            .iter()
            .zip(h.iter().zip(&signs))
            .filter(|(_, (h, s))| h != s)
            .map(|(w, _)| w)
            .sum::<f64>()
            / total;
        if err >= 0.5 {
            break;
        }
        let perfect = err <= 0.0;
        let eps = err.max(MIN_ERROR);
        let alpha = 0.5 * ((1.0 - eps) / eps).ln();
        model.learners.push(tree);
        model.alphas.push(alpha);
        model.stage_errors.push(eps);
        if perfect {
            break;
        }
        for ((wi, hi), si) in w.iter_mut().zip(&h).zip(&signs) {
            *wi *= (-alpha * si * hi).exp();
        }
        let z: f64 = w.iter().sum();
        w.iter_mut().for_each(|wi| *wi /= z);
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_stops_after_a_perfect_stump() {
        let x = Matrix::from_rows(&[[0.0], [1.0], [2.0], [3.0]]);
        let y = [0, 0, 1, 1];
        let m = fit_adaboost(&x, &y, &AdaBoostParams { rounds: 10, weak_depth: 1 }, 0).unwrap();
        assert_eq!(m.learners.len(), 1);
        let hard: Vec<u8> = m.predict_proba(&x).iter().map(|&p| u8::from(p >= 0.5)).collect();
        assert_eq!(hard, y);
    }

    #[test]
    fn first_round_is_a_uniform_weight_tree() {
        let x = Matrix::from_rows(&[[0.0, 5.0], [1.0, 3.0], [2.0, 4.0], [3.0, 1.0], [4.0, 2.0]]);
        let y = [0, 1, 0, 1, 1];
        let m = fit_adaboost(&x, &y, &AdaBoostParams { rounds: 1, weak_depth: 1 }, 0).unwrap();
        let tp = TreeParams {
            max_depth: Some(1),
            ..TreeParams::default()
        };
        let plain = crate::models::fit_tree(&x, &y, &[1.0; 5], &tp).unwrap();
        assert_eq!(m.learners[0].root_split(), plain.root_split());
    }
}
