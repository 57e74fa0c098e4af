use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_finite, check_rows, sigmoid, Matrix, ModelError, Result};

/// Probabilities are clamped to `[EPS, 1 − EPS]` inside the loss.
const EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    pub learning_rate: f64,
    pub epochs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Mean training loss after each epoch.
    pub loss_history: Vec<f64>,
}

fn dot(w: &[f64], x: &[f64]) -> f64 {
    w.iter().zip(x).map(|(a, b)| a * b).sum()
}

impl LinearModel {
    pub fn predict_proba(&self, x: &Matrix) -> Vec<f64> {
        x.rows().map(|r| sigmoid(dot(&self.weights, r) + self.bias)).collect()
    }
}

fn check_width(w: &[f64], x: &Matrix, y: &[u8]) -> Result<()> {
    check_rows(x, y)?;
    if w.len() != x.n_cols() {
        return Err(ModelError::DimensionMismatch {
            expected: x.n_cols(),
            found: w.len(),
        });
    }
    Ok(())
}

/// Mean binary cross-entropy of `sigmoid(w·x + b)`. For labels in {0, 1} this
/// is the same quantity as `−(1−y)·log(1+y−G) − y·log(G)`.
pub fn logistic_loss(w: &[f64], bias: f64, x: &Matrix, y: &[u8]) -> Result<f64> {
    check_width(w, x, y)?;
    let total: f64 = x
        .rows()
        .zip(y)
        .map(|(r, &l)| {
            let g = sigmoid(dot(w, r) + bias).clamp(EPS, 1.0 - EPS);
            if l == 1 {
                -g.ln()
            } else {
                -(1.0 - g).ln()
            }
        })
        .sum();
    Ok(total / y.len() as f64)
}

/// Gradient of [`logistic_loss`] with respect to `(w, b)`, ignoring the clamp.
pub fn logistic_gradient(w: &[f64], bias: f64, x: &Matrix, y: &[u8]) -> Result<(Vec<f64>, f64)> {
    check_width(w, x, y)?;
    let m = y.len() as f64;
    let mut gw = vec![0.0; w.len()];
    let mut gb = 0.0;
    for (r, &l) in x.rows().zip(y) {
        let e = sigmoid(dot(w, r) + bias) - f64::from(l);
        for (g, v) in gw.iter_mut().zip(r) {
            *g += e * v;
        }
        gb += e;
    }
    gw.iter_mut().for_each(|g| *g /= m);
    Ok((gw, gb / m))
}

/// Per-sample SGD from zero weights, visiting rows in a fresh seeded shuffle
/// every epoch.
pub fn fit_logistic(x: &Matrix, y: &[u8], params: &LogisticParams, seed: u64) -> Result<LinearModel> {
    check_rows(x, y)?;
    check_finite(x)?;
    if !(params.learning_rate > 0.0 && params.learning_rate.is_finite()) {
        return Err(ModelError::InvalidHyperparameter("learning_rate must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = vec![0.0; x.n_cols()];
    let mut b = 0.0;
    let mut order: Vec<usize> = (0..y.len()).collect();
    let mut loss_history = Vec::with_capacity(params.epochs);
    for epoch in 0..params.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let r = x.row(i);
            let e = sigmoid(dot(&w, r) + b) - f64::from(y[i]);
            let step = params.learning_rate * e;
            for (wj, v) in w.iter_mut().zip(r) {
                *wj -= step * v;
            }
            b -= step;
        }
        let loss = logistic_loss(&w, b, x, y)?;
        if !loss.is_finite() || w.iter().any(|v| !v.is_finite()) || !b.is_finite() {
            return Err(ModelError::DivergenceDetected { epoch: epoch + 1 });
        }
        loss_history.push(loss);
    }
    Ok(LinearModel {
        weights: w,
        bias: b,
        learning_rate: params.learning_rate,
        epochs: params.epochs,
        seed,
        loss_history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(epochs: usize) -> LogisticParams {
        LogisticParams {
            learning_rate: 0.1,
            epochs,
        }
    }

    #[test]
    fn zero_weights_give_ln2() {
        let x = Matrix::from_rows(&[[1.0, -2.0], [0.5, 3.0], [9.0, 0.0]]);
        let loss = logistic_loss(&[0.0, 0.0], 0.0, &x, &[1, 0, 1]).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn separable_one_dimension() {
        let x = Matrix::from_rows(&[[-2.0], [-1.0], [-0.5], [0.5], [1.0], [2.0]]);
        let y = [0, 0, 0, 1, 1, 1];
        let m = fit_logistic(&x, &y, &params(200), 1).unwrap();
        assert!(m.weights[0] > 0.0);
        let hard: Vec<u8> = m.predict_proba(&x).iter().map(|&p| u8::from(p >= 0.5)).collect();
        assert_eq!(hard, y);
        assert!(m.loss_history.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn large_separating_weights_drive_loss_to_zero() {
        let x = Matrix::from_rows(&[[-1.0], [1.0]]);
        assert!(logistic_loss(&[60.0], 0.0, &x, &[0, 1]).unwrap() < 1e-11);
    }

    #[test]
    fn same_seed_same_weights() {
        let x = Matrix::from_rows(&[[0.3, 1.0], [-1.2, 0.1], [2.0, -0.7], [0.0, 0.4]]);
        let y = [1, 0, 1, 0];
        let a = fit_logistic(&x, &y, &params(5), 9).unwrap();
        let b = fit_logistic(&x, &y, &params(5), 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn divergence_is_reported() {
        let x = Matrix::from_rows(&[[1e308], [-1e308]]);
        let p = LogisticParams {
            learning_rate: 10.0,
            epochs: 3,
        };
        assert!(matches!(
            fit_logistic(&x, &[0, 1], &p, 0),
            Err(ModelError::DivergenceDetected { .. })
        ));
    }

    #[test]
    fn width_checked() {
        let x = Matrix::zeros(2, 3);
        assert!(matches!(
            logistic_loss(&[0.0], 0.0, &x, &[0, 1]),
            Err(ModelError::DimensionMismatch { .. })
        ));
    }
}
