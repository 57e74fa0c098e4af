use std::collections::BTreeSet;

use rayon::prelude::*;

use super::report::{EvalReport, FoldScores};
use super::{EvalError, Result};
use crate::featureset::{FeatureSchema, PreparedRow, PreparedSet, SplitPlan};
use crate::models::{fit, ModelFile, ModelSpec};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalOptions {
    pub seed: u64,
    /// Hard label is 1 iff probability ≥ threshold.
    pub threshold: f64,
    pub serve_number: Option<u8>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            threshold: 0.5,
            serve_number: None,
        }
    }
}

pub fn split_identity(plan: &SplitPlan) -> String {
    format!(
        "seed={} folds={} test={} train={} validation={}",
        plan.seed,
        plan.folds,
        plan.test.len(),
        plan.train.len(),
        plan.validation.len()
    )
}

fn match_set<'a>(rows: &[&'a PreparedRow]) -> BTreeSet<&'a str> {
    rows.iter().map(|r| &*r.match_id).collect()
}

/// Fits on `fit_rows` (schema refit on them) and scores `eval_rows`.
fn fit_and_score(
    spec: &ModelSpec,
    set: &PreparedSet,
    fit_rows: &[&PreparedRow],
    eval_rows: &[&PreparedRow],
    name: &str,
    opts: &EvalOptions,
) -> Result<FoldScores> {
    if let Some(shared) = match_set(fit_rows).intersection(&match_set(eval_rows)).next() {
        return Err(EvalError::LeakageDetected(shared.to_string()));
    }
    if fit_rows.is_empty() || eval_rows.is_empty() {
        return Err(EvalError::EmptyFold(name.to_string()));
    }
    let schema = FeatureSchema::fit(&set.layout, fit_rows);
    let train = schema.transform(fit_rows);
    let test = schema.transform(eval_rows);
    let model = fit(spec, &train.x, &train.y, opts.seed)?;
    let proba = model.predict_proba(&test.x)?;
    FoldScores::score(name, &test.y, &proba, opts.threshold)
}

/// Match-level k-fold cross-validation over the plan's train ∪ validation
/// matches. Each fold refits the feature schema on its own training side.
/// Folds run in parallel and are reported in fold order.
pub fn cross_validate(spec: &ModelSpec, set: &PreparedSet, plan: &SplitPlan, opts: &EvalOptions) -> Result<EvalReport> {
    if plan.folds < 2 {
        return Err(EvalError::NoFolds);
    }
    let tagged: Vec<(usize, &PreparedRow)> = set
        .rows
        .iter()
        .filter_map(|r| plan.fold_of.get(&*r.match_id).map(|&f| (f, r)))
        .collect();
    let per_fold = (0..plan.folds)
        .into_par_iter()
        .map(|k| {
            let (eval_rows, fit_rows): (Vec<&(usize, &PreparedRow)>, Vec<_>) = tagged.iter().partition(|(f, _)| *f == k);
            let fit_rows: Vec<&PreparedRow> = fit_rows.into_iter().map(|(_, r)| *r).collect();
            let eval_rows: Vec<&PreparedRow> = eval_rows.into_iter().map(|(_, r)| *r).collect();
            fit_and_score(spec, set, &fit_rows, &eval_rows, &format!("fold {}", k + 1), opts)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalReport::new(
        spec.family(),
        spec.to_hyperparams(),
        opts.serve_number,
        "cv",
        split_identity(plan),
        opts.seed,
        opts.threshold,
        per_fold,
    ))
}

/// Scores a persisted model on `rows`, refusing if any of their matches was
/// part of its training data.
pub fn evaluate_model(model: &ModelFile, set: &PreparedSet, kind: &str, split: String, threshold: f64) -> Result<EvalReport> {
    if let Some(r) = set.rows.iter().find(|r| model.saw_match(&r.match_id)) {
        return Err(EvalError::LeakageDetected(r.match_id.to_string()));
    }
    if set.is_empty() {
        return Err(EvalError::EmptyFold(kind.to_string()));
    }
    let (fm, proba) = model.predict_rows(&set.layout, &set.rows)?;
    let scores = FoldScores::score(kind, &fm.y, &proba, threshold)?;
    Ok(EvalReport::new(
        model.family,
        model.hyperparams.clone(),
        model.serve_number,
        kind,
        split,
        model.stamp.seed,
        threshold,
        vec![scores],
    ))
}
