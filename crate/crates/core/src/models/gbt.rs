use serde::{Deserialize, Serialize};

use super::tree::{grow, BinnedMatrix, Criterion, Tree, TreeParams};
use super::{check_rows, logit, sigmoid, Matrix, ModelError, Result};

/// Base rate clamp so an all-one or all-zero label set keeps a finite logit.
const BASE_EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GbtParams {
    pub rounds: usize,
    pub eta: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub max_depth: usize,
    pub min_leaf: usize,
    pub scale_pos_weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GbtModel {
    /// Leaves hold the unshrunk weight `−G/(H+λ)`.
    pub trees: Vec<Tree>,
    pub eta: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub max_depth: usize,
    pub scale_pos_weight: f64,
    pub base_score: f64,
    /// Summed split gain (before the γ penalty) per feature.
    pub feature_gain: Vec<f64>,
    /// Training log-loss before the first tree and after each one.
    pub loss_history: Vec<f64>,
    pub n_features: usize,
}

impl GbtModel {
    pub fn margin_row(&self, row: &[f64]) -> f64 {
        self.base_score + self.eta * self.trees.iter().map(|t| t.predict_row(row)).sum::<f64>()
    }

    pub fn predict_proba(&self, x: &Matrix) -> Vec<f64> {
        x.rows().map(|r| sigmoid(self.margin_row(r))).collect()
    }

    /// Gain shares per feature, normalized to sum to 1, in feature order.
    pub fn importance_gain(&self) -> Result<Vec<f64>> {
        let total: f64 = self.feature_gain.iter().sum();
        if total <= 0.0 {
            return Err(ModelError::NoSplits);
        }
        Ok(self.feature_gain.iter().map(|g| g / total).collect())
    }

    /// [`importance_gain`](Self::importance_gain) paired with column names,
    /// largest share first.
    pub fn importance_named(&self, names: &[String]) -> Result<Vec<(String, f64)>> {
        if names.len() != self.n_features {
            return Err(ModelError::DimensionMismatch {
                expected: self.n_features,
                found: names.len(),
            });
        }
        let mut out: Vec<(String, f64)> = names.iter().cloned().zip(self.importance_gain()?).collect();
        out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Ok(out)
    }
}

fn log_loss(margins: &[f64], y: &[u8]) -> f64 {
    margins
        .iter()
        .zip(y)
        .map(|(&m, &l)| {
            let p = sigmoid(m).clamp(BASE_EPS, 1.0 - BASE_EPS);
            if l == 1 {
                -p.ln()
            } else {
                -(1.0 - p).ln()
            }
        })
        .sum::<f64>()
        / y.len() as f64
}

/// Second-order gradient boosting on the logistic loss. Each round grows a
/// depth-limited tree on `g = p − y`, `h = p(1 − p)` (both multiplied by
/// `scale_pos_weight` on positive rows) and adds `η · leaf` to every margin.
pub fn fit_gbt(x: &Matrix, y: &[u8], params: &GbtParams, seed: u64) -> Result<GbtModel> {
    check_rows(x, y)?;
    let binned = BinnedMatrix::new(x)?;
    let n = y.len();
    let mean = y.iter().map(|&l| f64::from(l)).sum::<f64>() / n as f64;
    let base_score = logit(mean.clamp(BASE_EPS, 1.0 - BASE_EPS));
    let mut margins = vec![base_score; n];
    let criterion = Criterion::Newton {
        lambda: params.lambda,
        gamma: params.gamma,
    };
    let tp = TreeParams {
        max_depth: Some(params.max_depth),
        min_leaf: params.min_leaf,
        m_try: None,
        seed,
    };
    let mut model = GbtModel {
        trees: Vec::with_capacity(params.rounds),
        eta: params.eta,
        lambda: params.lambda,
        gamma: params.gamma,
        max_depth: params.max_depth,
        scale_pos_weight: params.scale_pos_weight,
        base_score,
        feature_gain: vec![0.0; x.n_cols()],
        loss_history: vec![log_loss(&margins, y)],
        n_features: x.n_cols(),
    };
    let all_rows: Vec<u32> = (0..n as u32).collect();
    for _ in 0..params.rounds {
        let stats: Vec<(f64, f64)> = margins
            .iter()
            .zip(y)
            .map(|(&m, &l)| {
                let p = sigmoid(m);
                let scale = if l == 1 { params.scale_pos_weight } else { 1.0 };
                (scale * (p - f64::from(l)), scale * p * (1.0 - p))
            })
            .collect();
        let tree = grow(&binned, &stats, all_rows.clone(), criterion, &tp);
        for (feature, _, gain) in tree.splits() {
            model.feature_gain[feature] += gain;
        }
        for (m, r) in margins.iter_mut().zip(x.rows()) {
            *m += params.eta * tree.predict_row(r);
        }
        model.trees.push(tree);
        model.loss_history.push(log_loss(&margins, y));
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(rounds: usize) -> GbtParams {
        GbtParams {
            rounds,
            eta: 0.3,
            lambda: 1.0,
            gamma: 0.0,
            max_depth: 3,
            min_leaf: 1,
            scale_pos_weight: 1.0,
        }
    }

    #[test]
    fn zero_rounds_predicts_the_base_rate() {
        let x = Matrix::from_rows(&[[0.0], [1.0], [2.0], [3.0]]);
        let m = fit_gbt(&x, &[1, 1, 1, 0], &params(0), 0).unwrap();
        for p in m.predict_proba(&x) {
            assert!((p - 0.75).abs() < 1e-12);
        }
        assert!(matches!(m.importance_gain(), Err(ModelError::NoSplits)));
    }

    #[test]
    fn single_feature_takes_all_importance() {
        let x = Matrix::from_rows(&[[0.0, 1.0], [1.0, 1.0], [2.0, 1.0], [3.0, 1.0]]);
        let m = fit_gbt(&x, &[0, 0, 1, 1], &params(3), 0).unwrap();
        assert_eq!(m.importance_gain().unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn loss_decreases() {
        let rows: Vec<[f64; 2]> = (0..60).map(|i| [f64::from(i % 12), f64::from((i * 5) % 7)]).collect();
        let y: Vec<u8> = rows.iter().map(|r| u8::from(r[0] > 5.0)).collect();
        let m = fit_gbt(&Matrix::from_rows(&rows), &y, &params(10), 0).unwrap();
        assert!(m.loss_history.windows(2).all(|w| w[1] < w[0]));
    }
}
