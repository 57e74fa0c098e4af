//! Binary decision trees shared by the forest, AdaBoost and boosting.
//!
//! Split search is exact: every feature is coded by its sorted distinct
//! values, candidate thresholds are midpoints between consecutive distinct
//! values present in the node, and the best candidate wins with ties going to
//! the lower feature index, then the lower threshold. Large nodes aggregate
//! per-code histograms; small nodes sort their codes instead.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_finite, check_rows, Matrix, ModelError, Result};

/// Splits whose gain does not exceed this are treated as no improvement.
const MIN_GAIN: f64 = 1e-12;
/// Nodes with at least this many rows search features in parallel.
const PAR_ROWS: usize = 8192;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        value: f64,
    },
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        gain: f64,
        left: usize,
        right: usize,
    },
}

/// Flat tree; node 0 is the root.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf(value: f64) -> Self {
        Self {
            nodes: vec![Node::Leaf { value }],
        }
    }

    pub fn predict_row(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => i = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        let mut deepest = 0;
        let mut stack = vec![(0usize, 0usize)];
        while let Some((i, d)) = stack.pop() {
            match &self.nodes[i] {
                Node::Leaf { .. } => deepest = deepest.max(d),
                Node::Split { left, right, .. } => {
                    stack.push((*left, d + 1));
                    stack.push((*right, d + 1));
                }
            }
        }
        deepest
    }

    pub fn splits(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Split {
                feature,
                threshold,
                gain,
                ..
            } => Some((*feature, *threshold, *gain)),
            Node::Leaf { .. } => None,
        })
    }

    pub fn root_split(&self) -> Option<(usize, f64)> {
        match &self.nodes[0] {
            Node::Split { feature, threshold, .. } => Some((*feature, *threshold)),
            Node::Leaf { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or too small.
    pub max_depth: Option<usize>,
    /// Minimum number of distinct rows on each side of a split.
    pub min_leaf: usize,
    /// Features drawn per node; `None` uses all of them.
    pub m_try: Option<usize>,
    pub seed: u64,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: None,
            min_leaf: 1,
            m_try: None,
            seed: 0,
        }
    }
}

/// Feature columns recoded as indices into their sorted distinct values.
#[derive(Clone, Debug)]
pub struct BinnedMatrix {
    n_rows: usize,
    values: Vec<Vec<f64>>,
    codes: Vec<Vec<u32>>,
}

impl BinnedMatrix {
    pub fn new(x: &Matrix) -> Result<Self> {
        check_finite(x)?;
        let (values, codes) = (0..x.n_cols())
            .into_par_iter()
            .map(|j| {
                let col: Vec<f64> = x.column(j).collect();
                let mut distinct = col.clone();
                distinct.sort_by(f64::total_cmp);
                distinct.dedup();
                let codes = col
                    .iter()
                    .map(|v| distinct.binary_search_by(|d| d.total_cmp(v)).expect("value present") as u32)
                    .collect();
                (distinct, codes)
            })
            .unzip();
        Ok(Self {
            n_rows: x.n_rows(),
            values,
            codes,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.values.len()
    }
}

/// Per-row statistics summed over a node: `(a, b)` are the positive and
/// negative weights for entropy trees, gradient and hessian for Newton trees.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Stats {
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

impl Stats {
    fn add(&mut self, (a, b): (f64, f64)) {
        self.a += a;
        self.b += b;
        self.n += 1;
    }

    fn minus(self, o: Stats) -> Stats {
        Stats {
            a: self.a - o.a,
            b: self.b - o.b,
            n: self.n - o.n,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Criterion {
    /// Weighted information gain; leaves vote 1 iff positive weight ≥ negative.
    Entropy,
    /// Second-order boosting gain; leaves hold `−G/(H+λ)`.
    Newton { lambda: f64, gamma: f64 },
}

/// Binary entropy in bits of a split with class weights `a` and `b`.
pub(crate) fn binary_entropy(a: f64, b: f64) -> f64 {
    let w = a + b;
    if w <= 0.0 {
        return 0.0;
    }
    [a / w, b / w]
        .iter()
        .filter(|p| **p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

impl Criterion {
    /// `(gain used for acceptance, gain recorded on the node)`.
    fn gain(self, parent: Stats, left: Stats, right: Stats) -> (f64, f64) {
        match self {
            Criterion::Entropy => {
                let w = parent.a + parent.b;
                let g = binary_entropy(parent.a, parent.b)
                    - (left.a + left.b) / w * binary_entropy(left.a, left.b)
                    - (right.a + right.b) / w * binary_entropy(right.a, right.b);
                (g, g)
            }
            Criterion::Newton { lambda, gamma } => {
                let term = |s: Stats| if s.b + lambda > 0.0 { s.a * s.a / (s.b + lambda) } else { 0.0 };
                let raw = 0.5 * (term(left) + term(right) - term(parent));
                (raw - gamma, raw)
            }
        }
    }

    fn leaf_value(self, s: Stats) -> f64 {
        match self {
            Criterion::Entropy => f64::from(u8::from(s.a >= s.b)),
            Criterion::Newton { lambda, .. } => {
                if s.b + lambda > 0.0 {
                    -s.a / (s.b + lambda)
                } else {
                    0.0
                }
            }
        }
    }

    fn is_pure(self, s: Stats) -> bool {
        matches!(self, Criterion::Entropy) && (s.a <= 0.0 || s.b <= 0.0)
    }
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    feature: usize,
    cut: u32,
    threshold: f64,
    accept: f64,
    recorded: f64,
}

/// Present codes of feature `f` among `rows`, ascending, with their stats.
fn code_runs(binned: &BinnedMatrix, f: usize, row_stats: &[(f64, f64)], rows: &[u32]) -> Vec<(u32, Stats)> {
    let codes = &binned.codes[f];
    let n_bins = binned.values[f].len();
    if rows.len() * 4 < n_bins {
        let mut pairs: Vec<(u32, u32)> = rows.iter().map(|&r| (codes[r as usize], r)).collect();
        pairs.sort_unstable();
        let mut runs: Vec<(u32, Stats)> = Vec::new();
        for (code, r) in pairs {
            match runs.last_mut() {
                Some((c, s)) if *c == code => s.add(row_stats[r as usize]),
                _ => {
                    let mut s = Stats::default();
                    s.add(row_stats[r as usize]);
                    runs.push((code, s));
                }
            }
        }
        runs
    } else {
        let mut hist = vec![Stats::default(); n_bins];
        for &r in rows {
            hist[codes[r as usize] as usize].add(row_stats[r as usize]);
        }
        hist.into_iter()
            .enumerate()
            .filter(|(_, s)| s.n > 0)
            .map(|(c, s)| (c as u32, s))
            .collect()
    }
}

fn best_for_feature(
    binned: &BinnedMatrix,
    f: usize,
    row_stats: &[(f64, f64)],
    rows: &[u32],
    total: Stats,
    criterion: Criterion,
    min_leaf: usize,
) -> Option<Candidate> {
    if binned.values[f].len() < 2 {
        return None;
    }
    let runs = code_runs(binned, f, row_stats, rows);
    let mut best: Option<Candidate> = None;
    let mut left = Stats::default();
    for k in 0..runs.len().saturating_sub(1) {
        let s = runs[k].1;
        left.a += s.a;
        left.b += s.b;
        left.n += s.n;
        let right = total.minus(left);
        if left.n < min_leaf || right.n < min_leaf {
            continue;
        }
        let (accept, recorded) = criterion.gain(total, left, right);
        if best.map_or(true, |b| accept > b.accept) {
            let (lo, hi) = (runs[k].0, runs[k + 1].0);
            best = Some(Candidate {
                feature: f,
                cut: lo,
                threshold: 0.5 * (binned.values[f][lo as usize] + binned.values[f][hi as usize]),
                accept,
                recorded,
            });
        }
    }
    best
}

fn best_split(
    binned: &BinnedMatrix,
    features: &[usize],
    row_stats: &[(f64, f64)],
    rows: &[u32],
    total: Stats,
    criterion: Criterion,
    min_leaf: usize,
) -> Option<Candidate> {
    let search = |&f: &usize| best_for_feature(binned, f, row_stats, rows, total, criterion, min_leaf);
    let per_feature: Vec<Option<Candidate>> = if rows.len() >= PAR_ROWS && features.len() > 1 {
        features.par_iter().map(search).collect()
    } else {
        features.iter().map(search).collect()
    };
    per_feature
        .into_iter()
        .flatten()
        .fold(None, |best: Option<Candidate>, c| match best {
            Some(b) if c.accept <= b.accept => Some(b),
            _ => Some(c),
        })
        .filter(|c| c.accept > MIN_GAIN)
}

/// Grows one tree over the rows with positive weight, depth first.
pub(crate) fn grow(
    binned: &BinnedMatrix,
    row_stats: &[(f64, f64)],
    mut rows: Vec<u32>,
    criterion: Criterion,
    params: &TreeParams,
) -> Tree {
    let d = binned.n_cols();
    let m_try = params.m_try.map_or(d, |m| m.clamp(1, d.max(1)));
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut nodes = vec![Node::Leaf { value: 0.0 }];
    let mut stack = vec![(0usize, 0usize, rows.len(), 0usize)];
    while let Some((id, start, end, depth)) = stack.pop() {
        let slice = &mut rows[start..end];
        let mut total = Stats::default();
        for &r in slice.iter() {
            total.add(row_stats[r as usize]);
        }
        nodes[id] = Node::Leaf {
            value: criterion.leaf_value(total),
        };
        let depth_left = params.max_depth.map_or(true, |m| depth < m);
        if !depth_left || total.n < 2 * params.min_leaf.max(1) || criterion.is_pure(total) || d == 0 {
            continue;
        }
        let features: Vec<usize> = if m_try < d {
            let mut f = sample(&mut rng, d, m_try).into_vec();
            f.sort_unstable();
            f
        } else {
            (0..d).collect()
        };
        let Some(best) = best_split(binned, &features, row_stats, slice, total, criterion, params.min_leaf.max(1))
        else {
            continue;
        };
        let codes = &binned.codes[best.feature];
        let mut mid = 0;
        for i in 0..slice.len() {
            if codes[slice[i] as usize] <= best.cut {
                slice.swap(i, mid);
                mid += 1;
            }
        }
        let (left, right) = (nodes.len(), nodes.len() + 1);
        nodes.push(Node::Leaf { value: 0.0 });
        nodes.push(Node::Leaf { value: 0.0 });
        nodes[id] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            gain: best.recorded,
            left,
            right,
        };
        stack.push((right, start + mid, end, depth + 1));
        stack.push((left, start, start + mid, depth + 1));
    }
    Tree { nodes }
}

/// Per-row `(positive weight, negative weight)` for entropy trees.
pub(crate) fn class_stats(y: &[u8], weights: &[f64]) -> Vec<(f64, f64)> {
    y.iter()
        .zip(weights)
        .map(|(&l, &w)| if l == 1 { (w, 0.0) } else { (0.0, w) })
        .collect()
}

pub(crate) fn positive_rows(weights: &[f64]) -> Vec<u32> {
    (0..weights.len() as u32).filter(|&i| weights[i as usize] > 0.0).collect()
}

pub(crate) fn fit_tree_binned(binned: &BinnedMatrix, y: &[u8], weights: &[f64], params: &TreeParams) -> Tree {
    grow(binned, &class_stats(y, weights), positive_rows(weights), Criterion::Entropy, params)
}

/// Entropy classification tree on weighted rows. Leaves hold the class vote.
pub fn fit_tree(x: &Matrix, y: &[u8], weights: &[f64], params: &TreeParams) -> Result<Tree> {
    check_rows(x, y)?;
    if weights.len() != y.len() {
        return Err(ModelError::DimensionMismatch {
            expected: y.len(),
            found: weights.len(),
        });
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || weights.iter().sum::<f64>() <= 0.0 {
        return Err(ModelError::InvalidInput("weights must be non-negative with a positive sum".into()));
    }
    Ok(fit_tree_binned(&BinnedMatrix::new(x)?, y, weights, params))
}

/// Shannon entropy in bits of a label multiset.
pub fn entropy(labels: &[u8]) -> Result<f64> {
    if labels.is_empty() {
        return Err(ModelError::EmptyInput);
    }
    let pos = labels.iter().filter(|&&l| l == 1).count() as f64;
    Ok(binary_entropy(pos, labels.len() as f64 - pos))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&[1, 1, 1]).unwrap(), 0.0);
        assert!((entropy(&[1, 1, 0, 0]).unwrap() - 1.0).abs() < 1e-15);
        // −¼log₂¼ − ¾log₂¾
        assert!((entropy(&[1, 0, 0, 0]).unwrap() - 0.811_278_124_459_132_8).abs() < 1e-15);
        assert!(matches!(entropy(&[]), Err(ModelError::EmptyInput)));
    }

    #[test]
    fn two_points_one_split() {
        let x = Matrix::from_rows(&[[0.0], [1.0]]);
        let t = fit_tree(&x, &[0, 1], &[1.0, 1.0], &TreeParams::default()).unwrap();
        assert_eq!(t.depth(), 1);
        assert_eq!(t.root_split(), Some((0, 0.5)));
        assert_eq!(t.predict_row(&[0.0]), 0.0);
        assert_eq!(t.predict_row(&[1.0]), 1.0);
    }

    #[test]
    fn pure_labels_give_a_leaf() {
        let x = Matrix::from_rows(&[[0.0], [1.0], [2.0]]);
        let t = fit_tree(&x, &[1, 1, 1], &[1.0; 3], &TreeParams::default()).unwrap();
        assert_eq!(t.nodes, vec![Node::Leaf { value: 1.0 }]);
    }

    #[test]
    fn ties_prefer_lower_feature() {
        let x = Matrix::from_rows(&[[0.0, 0.0], [1.0, 1.0]]);
        let t = fit_tree(&x, &[0, 1], &[1.0, 1.0], &TreeParams::default()).unwrap();
        assert_eq!(t.root_split(), Some((0, 0.5)));
    }

    #[test]
    fn depth_limit() {
        let x = Matrix::from_rows(&[[0.0], [1.0], [2.0], [3.0]]);
        let p = TreeParams {
            max_depth: Some(1),
            ..TreeParams::default()
        };
        let t = fit_tree(&x, &[0, 1, 0, 1], &[1.0; 4], &p).unwrap();
        assert!(t.depth() <= 1);
    }

    #[test]
    fn zero_weight_rows_are_ignored() {
        let x = Matrix::from_rows(&[[0.0], [1.0], [2.0]]);
        let t = fit_tree(&x, &[0, 1, 0], &[1.0, 1.0, 0.0], &TreeParams::default()).unwrap();
        assert_eq!(t.root_split(), Some((0, 0.5)));
        assert_eq!(t.predict_row(&[2.0]), 1.0);
    }

    #[test]
    fn rejects_non_finite() {
        let x = Matrix::from_rows(&[[f64::NAN]]);
        assert!(fit_tree(&x, &[1], &[1.0], &TreeParams::default()).is_err());
    }
}
