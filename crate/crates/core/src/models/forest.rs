use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{fit_tree_binned, BinnedMatrix, Tree, TreeParams};
use super::{check_rows, Matrix, ModelError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    /// `None` draws `floor(sqrt(d))` features per node.
    pub m_try: Option<usize>,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    /// When false every tree sees every row once.
    pub bootstrap: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<Tree>,
    pub tree_seeds: Vec<u64>,
    pub m_try: usize,
    pub n_features: usize,
}

impl ForestModel {
    /// Share of trees voting "server wins".
    pub fn predict_proba(&self, x: &Matrix) -> Vec<f64> {
        let n = self.trees.len() as f64;
        x.rows()
            .map(|r| self.trees.iter().map(|t| t.predict_row(r)).sum::<f64>() / n)
            .collect()
    }
}

/// Bootstrap draw expressed as per-row multiplicities.
fn bootstrap_counts(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut counts = vec![0.0; n];
    for _ in 0..n {
        counts[rng.gen_range(0..n)] += 1.0;
    }
    counts
}

/// Bagged entropy trees with a fresh random feature subset at every node.
/// Per-tree seeds come from one stream seeded by `seed`, so the result does
/// not depend on how trees are scheduled across threads.
pub fn fit_forest(x: &Matrix, y: &[u8], params: &ForestParams, seed: u64) -> Result<ForestModel> {
    check_rows(x, y)?;
    if params.n_trees == 0 {
        return Err(ModelError::InvalidHyperparameter("n_trees must be at least 1".into()));
    }
    let d = x.n_cols();
    let m_try = params
        .m_try
        .unwrap_or_else(|| (d as f64).sqrt().floor() as usize)
        .clamp(1, d.max(1));
    let binned = BinnedMatrix::new(x)?;
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let tree_seeds: Vec<u64> = (0..params.n_trees).map(|_| master.gen()).collect();
    let trees = tree_seeds
        .par_iter()
        .map(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let weights = if params.bootstrap {
                bootstrap_counts(y.len(), &mut rng)
            } else {
                vec![1.0; y.len()]
            };
            let tp = TreeParams {
                max_depth: params.max_depth,
                min_leaf: params.min_leaf,
                m_try: Some(m_try),
                seed: rng.gen(),
            };
            fit_tree_binned(&binned, y, &weights, &tp)
        })
        .collect();
    Ok(ForestModel {
        trees,
        tree_seeds,
        m_try,
        n_features: d,
    })
}
