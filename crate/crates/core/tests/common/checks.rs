//! One function per self-contained acceptance property. Each returns a short
//! detail line on success and the first violation on failure.

use std::path::Path;
use std::time::{Duration, Instant};

use pointwin::eval::{cross_validate, evaluate_model, metrics, confusion, roc_auc, EvalError, EvalOptions, FoldScores};
use pointwin::featureset::{
    canonical_layout, encode, make_split_plan, prepare_dataset, prepare_match, shift_outcomes, split_by_serve,
    PairMap, PreparedRow, PreparedSet, SplitRatios,
};
use pointwin::ingest::MergedMatch;
use pointwin::models::{
    fit, fit_adaboost, fit_gbt, fit_tree, logistic_gradient, logistic_loss, AdaBoostParams, Family, GbtParams,
    Matrix, ModelFile, ModelSpec, TreeParams,
};
use pointwin::ArtifactStamp;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{exhaustive_split, fixture, pairwise_auc, replay, simulated, snapshot, three_matches, twenty_points};

pub type Check = Result<String, String>;

fn fail<T>(msg: impl Into<String>) -> Result<T, String> {
    Err(msg.into())
}

/// Linearly separable up to label noise: `y = 1` iff `x0 + x1/2 − x2/3 + ε > 0`.
pub fn learnable(n: usize, seed: u64) -> (Matrix, Vec<u8>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let r: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let z = r[0] + 0.5 * r[1] - r[2] / 3.0 + rng.gen_range(-0.3..0.3);
        y.push(u8::from(z > 0.0));
        rows.push(r);
    }
    (Matrix::from_rows(&rows), y)
}

/// Two features, label is their sign agreement.
pub fn xor(n: usize, seed: u64) -> (Matrix, Vec<u8>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
    let y = rows.iter().map(|r| u8::from((r[0] > 0.0) == (r[1] > 0.0))).collect();
    (Matrix::from_rows(&rows), y)
}

/// Encoded first- and second-serve matrices of a prepared set.
pub fn encoded_by_serve(set: &PreparedSet) -> Vec<(Matrix, Vec<u8>)> {
    let (first, second) = split_by_serve(set);
    [first, second]
        .into_iter()
        .filter(|s| !s.is_empty())
        .map(|s| {
            let (fm, _) = encode(&s.rows, &s.layout, &s.rows);
            (fm.x, fm.y)
        })
        .collect()
}

/// Every fixture the boosting checks run on, with a name.
pub fn boosting_fixtures() -> Vec<(String, Matrix, Vec<u8>)> {
    let mut out = Vec::new();
    let (x, y) = learnable(400, 1);
    out.push(("learnable".to_string(), x, y));
    let (x, y) = xor(300, 2);
    out.push(("xor".to_string(), x, y));
    for (name, ds) in [("twenty_points", twenty_points()), ("three_matches", three_matches())] {
        let set = prepare_dataset(&ds, false).unwrap();
        for (k, (x, y)) in encoded_by_serve(&set).into_iter().enumerate() {
            out.push((format!("{name} serve {}", k + 1), x, y));
        }
    }
    out
}

// 7

pub fn leak_freedom(samples: usize) -> Check {
    let ds = simulated(12, 21);
    let full: Vec<Vec<PreparedRow>> = ds.matches.iter().map(|m| prepare_match(m, true).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..samples {
        let mi = rng.gen_range(0..ds.matches.len());
        let m = &ds.matches[mi];
        let i = rng.gen_range(0..m.points.len());
        let cut = MergedMatch {
            points: m.points[..=i].to_vec(),
            ..m.clone()
        };
        let recomputed = prepare_match(&cut, true).map_err(|e| e.to_string())?;
        let want = full[mi].iter().find(|r| r.point_number == m.points[i].point_number);
        if recomputed.last() != want {
            return fail(format!("{} point {} differs after truncation", m.meta.match_id, m.points[i].point_number));
        }
    }
    Ok(format!("{samples} sampled rows, 0 mismatches"))
}

// 8

pub fn tree_split_oracle(cases: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut unique = 0;
    for case in 0..cases {
        let n = rng.gen_range(2..=64);
        let d = rng.gen_range(1..=6);
        let levels = rng.gen_range(2..=10);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| f64::from(rng.gen_range(0..levels))).collect())
            .collect();
        let bias = rng.gen_range(0.2..0.8);
        let y: Vec<u8> = (0..n).map(|_| u8::from(rng.gen_bool(bias))).collect();
        let w: Vec<f64> = if case % 2 == 0 {
            vec![1.0; n]
        } else {
            (0..n).map(|_| rng.gen_range(0.1..2.0)).collect()
        };
        let tree = fit_tree(
            &Matrix::from_rows(&rows),
            &y,
            &w,
            &TreeParams {
                max_depth: Some(1),
                ..TreeParams::default()
            },
        )
        .map_err(|e| e.to_string())?;
        let (best, near, runner_up) = exhaustive_split(&rows, &y, &w);
        let got = tree.splits().next();
        match got {
            None if best > 1e-9 => return fail(format!("case {case}: no split, oracle gain {best}")),
            None => {}
            Some(_) if best < 1e-13 => return fail(format!("case {case}: split taken with oracle gain {best}")),
            Some((f, t, g)) => {
                if (g - best).abs() > 1e-9 {
                    return fail(format!("case {case}: gain {g} vs oracle {best}"));
                }
                if !near.contains(&(f, t)) {
                    return fail(format!("case {case}: split ({f}, {t}) not among oracle maxima {near:?}"));
                }
                if near.len() == 1 && best - runner_up > 1e-9 {
                    unique += 1;
                }
            }
        }
    }
    Ok(format!("{cases} cases, {unique} with a unique best split matched exactly"))
}

pub fn auc_oracle(cases: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    for case in 0..cases {
        let n = rng.gen_range(2..=120);
        let mut y: Vec<u8> = (0..n).map(|_| u8::from(rng.gen_bool(0.6))).collect();
        y[0] = 1;
        y[1] = 0;
        let coarse = case % 3 == 0;
        let s: Vec<f64> = (0..n)
            .map(|_| {
                let v: f64 = rng.gen_range(0.0..1.0);
                if coarse {
                    (v * 5.0).floor() / 5.0
                } else {
                    v
                }
            })
            .collect();
        let got = roc_auc(&y, &s).map_err(|e| e.to_string())?;
        let want = pairwise_auc(&y, &s);
        if (got - want).abs() > 1e-12 {
            return fail(format!("case {case}: {got} vs pairwise {want}"));
        }
    }
    Ok(format!("{cases} cases within 1e-12"))
}

/// Central differences with step `1e-5`; the relative error denominator is
/// floored at `1e-3` so near-zero components do not divide by noise.
pub fn logistic_finite_differences(cases: usize) -> Result<(String, f64), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(888);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let n = rng.gen_range(5..60);
        let d = rng.gen_range(1..8);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
        let x = Matrix::from_rows(&rows);
        let y: Vec<u8> = (0..n).map(|_| u8::from(rng.gen_bool(0.5))).collect();
        let w: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b = rng.gen_range(-1.0..1.0);
        let (gw, gb) = logistic_gradient(&w, b, &x, &y).map_err(|e| e.to_string())?;
        let h = 1e-5;
        let loss = |w: &[f64], b: f64| logistic_loss(w, b, &x, &y).unwrap();
        let rel = |fd: f64, g: f64| (fd - g).abs() / fd.abs().max(g.abs()).max(1e-3);
        for j in 0..d {
            let (mut up, mut down) = (w.clone(), w.clone());
            up[j] += h;
            down[j] -= h;
            worst = worst.max(rel((loss(&up, b) - loss(&down, b)) / (2.0 * h), gw[j]));
        }
        worst = worst.max(rel((loss(&w, b + h) - loss(&w, b - h)) / (2.0 * h), gb));
    }
    if worst < 1e-6 {
        Ok((format!("{cases} cases, max relative error {worst:.2e}"), worst))
    } else {
        fail(format!("max relative error {worst:.2e}"))
    }
}

// 9

pub fn gbt_monotone_loss() -> Check {
    let (x, y) = learnable(400, 1);
    let params = GbtParams {
        rounds: 10,
        eta: 0.3,
        lambda: 1.0,
        gamma: 0.0,
        max_depth: 3,
        min_leaf: 1,
        scale_pos_weight: 1.0,
    };
    let m = fit_gbt(&x, &y, &params, 0).map_err(|e| e.to_string())?;
    let h = &m.loss_history;
    if h.len() != 11 {
        return fail(format!("{} loss entries for 10 rounds", h.len()));
    }
    if let Some(k) = (1..h.len()).find(|&k| h[k] > h[k - 1]) {
        return fail(format!("loss rose at round {k}: {} -> {}", h[k - 1], h[k]));
    }
    Ok(format!("log-loss {:.4} -> {:.4} over 10 rounds", h[0], h[10]))
}

/// Probabilities of a one-round, depth-1, λ = 0 model computed directly, one
/// vector per split whose gain is within `1e-9` of the best.
pub fn newton_stump_oracle(rows: &[Vec<f64>], y: &[u8], eta: f64) -> Vec<Vec<f64>> {
    let n = y.len() as f64;
    let p0 = y.iter().map(|&l| f64::from(l)).sum::<f64>() / n;
    let g: Vec<f64> = y.iter().map(|&l| p0 - f64::from(l)).collect();
    let h = p0 * (1.0 - p0);
    let big_g: f64 = g.iter().sum();
    let big_h = h * n;
    let mut cands: Vec<(f64, usize, f64)> = Vec::new();
    for f in 0..rows[0].len() {
        let mut vals: Vec<f64> = rows.iter().map(|r| r[f]).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        for pair in vals.windows(2) {
            let t = 0.5 * (pair[0] + pair[1]);
            let (mut gl, mut hl) = (0.0, 0.0);
            for (r, gi) in rows.iter().zip(&g) {
                if r[f] <= t {
                    gl += gi;
                    hl += h;
                }
            }
            let (gr, hr) = (big_g - gl, big_h - hl);
            cands.push((0.5 * (gl * gl / hl + gr * gr / hr - big_g * big_g / big_h), f, t));
        }
    }
    let best = cands.iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max);
    let base = (p0 / (1.0 - p0)).ln();
    let proba = |leaf: &dyn Fn(&[f64]) -> f64| -> Vec<f64> {
        rows.iter().map(|r| 1.0 / (1.0 + (-(base + eta * leaf(r))).exp())).collect()
    };
    if best <= 1e-12 {
        return vec![proba(&|_| -big_g / big_h)];
    }
    cands
        .iter()
        .filter(|c| best - c.0 <= 1e-9)
        .map(|&(_, f, t)| {
            let side = |left: bool| {
                let (mut gs, mut hs) = (0.0, 0.0);
                for (q, gi) in rows.iter().zip(&g) {
                    if (q[f] <= t) == left {
                        gs += gi;
                        hs += h;
                    }
                }
                -gs / hs
            };
            let (l, r) = (side(true), side(false));
            proba(&|x: &[f64]| if x[f] <= t { l } else { r })
        })
        .collect()
}

pub fn newton_stump(cases: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut tied = 0;
    for case in 0..cases {
        let n = rng.gen_range(4..=64);
        let d = rng.gen_range(1..=6);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect()).collect();
        let mut y: Vec<u8> = (0..n).map(|_| u8::from(rng.gen_bool(0.6))).collect();
        y[0] = 1;
        y[1] = 0;
        let eta = rng.gen_range(0.05..1.0);
        let params = GbtParams {
            rounds: 1,
            eta,
            lambda: 0.0,
            gamma: 0.0,
            max_depth: 1,
            min_leaf: 1,
            scale_pos_weight: 1.0,
        };
        let x = Matrix::from_rows(&rows);
        let got = fit_gbt(&x, &y, &params, 0).map_err(|e| e.to_string())?.predict_proba(&x);
        let options = newton_stump_oracle(&rows, &y, eta);
        if options.len() > 1 {
            tied += 1;
        }
        let dev = options
            .iter()
            .map(|want| got.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min);
        if dev > 1e-9 {
            return fail(format!("case {case}: deviation {dev:.2e}"));
        }
        worst = worst.max(dev);
    }
    Ok(format!("{cases} cases ({tied} with tied best splits), max deviation {worst:.2e}"))
}

// 10

pub fn adaboost_bound() -> Check {
    let mut lines = Vec::new();
    for (name, x, y) in boosting_fixtures() {
        for depth in [1, 2] {
            let params = AdaBoostParams {
                rounds: 30,
                weak_depth: depth,
            };
            let m = fit_adaboost(&x, &y, &params, 3).map_err(|e| format!("{name}: {e}"))?;
            let wrong = x
                .rows()
                .zip(&y)
                .filter(|(r, &l)| {
                    let s = m.score_row(r);
                    s == 0.0 || (s > 0.0) != (l == 1)
                })
                .count();
            let err = wrong as f64 / y.len() as f64;
            let bound = m.error_bound();
            if err > bound + 1e-12 {
                return fail(format!("{name} depth {depth}: error {err:.4} > bound {bound:.4}"));
            }
            lines.push(format!("{name}/d{depth} {err:.3}<={bound:.3}"));
        }
    }
    Ok(lines.join(", "))
}

// 11

pub const PIPELINE_CONF: &str = "three_matches.conf";

/// Runs every stage on the three-match fixture into `out`; returns the
/// elapsed time.
pub fn run_pipeline(out: &Path, seed: u64) -> Result<Duration, String> {
    let conf = fixture(PIPELINE_CONF);
    let data = fixture("three_matches");
    let base = |rest: &[&str]| -> Vec<String> {
        let mut v: Vec<String> = vec![
            "pointwin".into(),
            "--config".into(),
            conf.display().to_string(),
            "--out".into(),
            out.display().to_string(),
            "--seed".into(),
            seed.to_string(),
        ];
        v.extend(rest.iter().map(|s| s.to_string()));
        v
    };
    let start = Instant::now();
    let steps: [&[&str]; 6] = [
        &["ingest", "--data-dir", data.to_str().unwrap()],
        &["prepare"],
        &["tune"],
        &["train", "--tuned"],
        &["evaluate"],
        &["report"],
    ];
    for step in steps {
        let code = pointwin::cli::run(base(step));
        if code != 0 {
            return fail(format!("`{}` exited with {code}", step.join(" ")));
        }
    }
    Ok(start.elapsed())
}

pub fn determinism() -> Check {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let ta = run_pipeline(a.path(), 4)?;
    run_pipeline(b.path(), 4)?;
    let (sa, sb) = (snapshot(a.path()), snapshot(b.path()));
    if sa.len() != sb.len() {
        return fail(format!("{} vs {} artifacts", sa.len(), sb.len()));
    }
    for ((pa, ba), (pb, bb)) in sa.iter().zip(&sb) {
        if pa != pb || ba != bb {
            return fail(format!("{} differs between reruns", pa.display()));
        }
    }
    if ta > Duration::from_secs(60) {
        return fail(format!("pipeline took {:.1}s", ta.as_secs_f64()));
    }
    Ok(format!("{} artifacts byte-identical; pipeline {:.1}s", sa.len(), ta.as_secs_f64()))
}

// 12

pub fn swap_and_replay() -> Check {
    let ds = twenty_points();
    let m = &ds.matches[0];
    let layout = canonical_layout();
    let pairs = PairMap::new(&layout.numeric).map_err(|e| e.to_string())?;
    let oracle = replay(&m.points, |s| m.meta.tiebreak_at(s));
    let shifted = shift_outcomes(&m.points, &|s| m.meta.tiebreak_at(s)).map_err(|e| e.to_string())?;
    let rows = prepare_match(m, true).map_err(|e| e.to_string())?;
    let mut agree = 0;
    for (((p, (before, after)), st), r) in m.points.iter().zip(&oracle).zip(&shifted).zip(&rows) {
        let n = p.point_number;
        let published = if p.game_winner != 0 {
            ["0".to_string(), "0".to_string()]
        } else {
            after.tokens()
        };
        if [p.p1_score.clone(), p.p2_score.clone()] != published {
            return fail(format!("point {n}: replayed score {published:?} vs published"));
        }
        if st.score != before.ordinal() || st.games != before.games || st.sets != before.sets || st.points_won != before.total {
            return fail(format!("point {n}: shifted state disagrees with replay"));
        }
        let mut v = r.numeric.clone();
        pairs.swap(&mut v);
        pairs.swap(&mut v);
        if v != r.numeric {
            return fail(format!("point {n}: swap is not an involution"));
        }
        if r.label != u8::from(p.point_winner == p.point_server) {
            return fail(format!("point {n}: label is not server-won"));
        }
        agree += 1;
    }
    Ok(format!("{agree}/{} points agree", m.points.len()))
}

// 13

pub fn split_hygiene() -> Check {
    for (n, folds, seed) in [(25usize, 10usize, 1u64), (709, 10, 2), (40, 5, 3), (12, 3, 4)] {
        let ids: Vec<String> = (0..n).map(|i| format!("m{i:04}")).collect();
        let ratios = SplitRatios {
            folds,
            ..SplitRatios::default()
        };
        let plan = make_split_plan(&ids, seed, &ratios).map_err(|e| e.to_string())?;
        let mut seen = std::collections::BTreeSet::new();
        for id in plan.test.iter().chain(&plan.train).chain(&plan.validation) {
            if !seen.insert(id.clone()) {
                return fail(format!("{id} is in two roles"));
            }
        }
        if seen.len() != n {
            return fail(format!("{} of {n} matches assigned", seen.len()));
        }
        let mut in_folds = std::collections::BTreeSet::new();
        for k in 0..folds {
            for id in plan.fold(k) {
                if !in_folds.insert(id.clone()) {
                    return fail(format!("{id} is in two folds"));
                }
                if plan.test.contains(&id) {
                    return fail(format!("test match {id} is in fold {k}"));
                }
            }
        }
        if in_folds.len() != plan.train.len() + plan.validation.len() {
            return fail("folds do not cover train and validation");
        }
    }

    let set = prepare_dataset(&simulated(8, 31), false).map_err(|e| e.to_string())?;
    let (first, _) = split_by_serve(&set);
    let plan = make_split_plan(
        &first.match_ids(),
        2,
        &SplitRatios {
            folds: 3,
            ..SplitRatios::default()
        },
    )
    .map_err(|e| e.to_string())?;
    cross_validate(&ModelSpec::defaults(Family::Baseline), &first, &plan, &EvalOptions::default())
        .map_err(|e| e.to_string())?;

    let dev = first.filter_matches(|id| plan.fold_of.contains_key(id));
    let (fm, schema) = encode(&dev.rows, &dev.layout, &dev.rows);
    let fitted = fit(&ModelSpec::defaults(Family::Baseline), &fm.x, &fm.y, 0).map_err(|e| e.to_string())?;
    let model = ModelFile::new(
        fitted,
        Default::default(),
        schema,
        dev.match_ids(),
        Some(1),
        ArtifactStamp::unconfigured(0),
    );
    let test = first.filter_matches(|id| plan.test.iter().any(|t| t == id));
    evaluate_model(&model, &test, "test", "test".into(), 0.5).map_err(|e| e.to_string())?;
    let leaky = first.filter_matches(|id| id == plan.test[0] || id == plan.train[0]);
    match evaluate_model(&model, &leaky, "test", "test".into(), 0.5) {
        Err(EvalError::LeakageDetected(id)) if id == plan.train[0] => {}
        other => return fail(format!("constructed leak not caught: {other:?}")),
    }
    Ok("roles and folds disjoint on 4 plans; LeakageDetected fired on a training match".into())
}

// 14

pub fn metrics_conventions() -> Check {
    let set = prepare_dataset(&three_matches(), false).map_err(|e| e.to_string())?;
    let (first, _) = split_by_serve(&set);
    let (fm, _) = encode(&first.rows, &first.layout, &first.rows);
    let model = fit(&ModelSpec::defaults(Family::Baseline), &fm.x, &fm.y, 0).map_err(|e| e.to_string())?;
    let proba = model.predict_proba(&fm.x).map_err(|e| e.to_string())?;
    let scores = FoldScores::score("fixture", &fm.y, &proba, 0.5).map_err(|e| e.to_string())?;
    let returner_rows = fm.y.iter().filter(|&&l| l == 0).count();
    if returner_rows == 0 {
        return fail("fixture has no returner wins");
    }
    if scores.returner.recall != 0.0 || scores.returner.precision != 0.0 || scores.returner.f1 != 0.0 {
        return fail(format!("returner scores {:?}", scores.returner));
    }
    if !scores.returner.zero_division.iter().any(|z| z == "precision") {
        return fail("0/0 precision not flagged");
    }
    let prior = fm.y.iter().filter(|&&l| l == 1).count() as f64 / fm.y.len() as f64;
    if (scores.accuracy - prior).abs() > 1e-12 || scores.recall != 1.0 {
        return fail(format!("server accuracy {} vs prior {prior}", scores.accuracy));
    }
    if scores.roc_auc != Some(0.5) {
        return fail(format!("constant scorer auc {:?}", scores.roc_auc));
    }
    let m = metrics(&confusion(&[0, 0, 0], &[0, 0, 0]).unwrap()).unwrap();
    if m.precision != 0.0 || m.recall != 0.0 || m.f1 != 0.0 {
        return fail("all-negative 0/0 metrics are not 0");
    }
    Ok(format!(
        "baseline on {} first-serve rows: accuracy {:.3}, returner recall 0.0",
        fm.y.len(),
        scores.accuracy
    ))
}
