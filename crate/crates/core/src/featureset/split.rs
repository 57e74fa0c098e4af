use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{FeatureError, Result};
use crate::ArtifactStamp;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitRatios {
    /// Share of all matches held out for the final test.
    pub test: f64,
    /// Share of the remaining matches used for validation.
    pub validation: f64,
    pub folds: usize,
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self {
            test: 0.1,
            validation: 0.2,
            folds: 10,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatchRole {
    Test,
    Train { fold: usize },
    Validation { fold: usize },
}

/// Match-level assignment to test, train and validation, plus cross-validation
/// folds over train ∪ validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitPlan {
    pub seed: u64,
    pub folds: usize,
    pub test: Vec<String>,
    pub train: Vec<String>,
    pub validation: Vec<String>,
    /// Fold (0-based) of every train or validation match.
    pub fold_of: BTreeMap<String, usize>,
}

fn round_half_up(x: f64) -> usize {
    // Absorbs representation error in products like 0.2 * n.
    (x + 0.5 + 1e-9).floor() as usize
}

/// Shuffles the sorted ids with `seed`, takes the first `round(test·n)` (at
/// least 1) as test, the next `round(validation·rest)` as validation and the
/// remainder as train. Folds are dealt round-robin over train ∪ validation in
/// shuffled order, so fold sizes differ by at most one.
pub fn make_split_plan(match_ids: &[String], seed: u64, ratios: &SplitRatios) -> Result<SplitPlan> {
    if ratios.folds < 2 {
        return Err(FeatureError::InvalidSplit(format!("need at least 2 folds, got {}", ratios.folds)));
    }
    if !(0.0..1.0).contains(&ratios.test) || !(0.0..1.0).contains(&ratios.validation) {
        return Err(FeatureError::InvalidSplit("ratios must lie in [0, 1)".into()));
    }
    let mut ids = match_ids.to_vec();
    ids.sort();
    ids.dedup();
    let n = ids.len();
    let n_test = round_half_up(ratios.test * n as f64).max(1);
    if n < n_test + ratios.folds {
        return Err(FeatureError::TooFewMatches {
            found: n,
            folds: ratios.folds,
        });
    }
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let rest = ids.split_off(n_test);
    let n_val = round_half_up(ratios.validation * rest.len() as f64);
    let fold_of: BTreeMap<String, usize> = rest
        .iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), i % ratios.folds))
        .collect();
    let (validation, train) = rest.split_at(n_val);
    let sorted = |v: &[String]| {
        let mut v = v.to_vec();
        v.sort();
        v
    };
    Ok(SplitPlan {
        seed,
        folds: ratios.folds,
        test: sorted(&ids),
        train: sorted(train),
        validation: sorted(validation),
        fold_of,
    })
}

impl SplitPlan {
    pub fn role(&self, match_id: &str) -> Option<MatchRole> {
        if self.test.binary_search_by(|m| m.as_str().cmp(match_id)).is_ok() {
            return Some(MatchRole::Test);
        }
        let fold = *self.fold_of.get(match_id)?;
        if self.validation.binary_search_by(|m| m.as_str().cmp(match_id)).is_ok() {
            Some(MatchRole::Validation { fold })
        } else {
            Some(MatchRole::Train { fold })
        }
    }

    /// Train ∪ validation, sorted.
    pub fn development(&self) -> Vec<String> {
        self.fold_of.keys().cloned().collect()
    }

    /// Match ids of fold `k`, sorted.
    pub fn fold(&self, k: usize) -> Vec<String> {
        self.fold_of.iter().filter(|(_, &f)| f == k).map(|(id, _)| id.clone()).collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.folds];
        for &f in self.fold_of.values() {
            sizes[f] += 1;
        }
        sizes
    }
}

/// One line per match: `id<TAB>test` or `id<TAB>fold <k><TAB>train|validation`
/// with 1-based folds, after a `#split-plan seed=.. folds=.. <stamp>` header.
pub fn write_split_plan<W: Write>(mut w: W, plan: &SplitPlan, stamp: &ArtifactStamp) -> Result<()> {
    writeln!(w, "#split-plan\tseed={}\tfolds={}\t{}", plan.seed, plan.folds, stamp.describe())?;
    let mut all: Vec<&String> = plan.test.iter().chain(plan.fold_of.keys()).collect();
    all.sort();
    for id in all {
        match plan.role(id) {
            Some(MatchRole::Test) => writeln!(w, "{id}\ttest")?,
            Some(MatchRole::Train { fold }) => writeln!(w, "{id}\tfold {}\ttrain", fold + 1)?,
            Some(MatchRole::Validation { fold }) => writeln!(w, "{id}\tfold {}\tvalidation", fold + 1)?,
            None => unreachable!("every listed id has a role"),
        }
    }
    Ok(())
}

pub fn read_split_plan<R: Read>(r: R) -> Result<SplitPlan> {
    let bad = |msg: String| FeatureError::Format(format!("split plan: {msg}"));
    let mut lines = BufReader::new(r).lines();
    let header = lines.next().transpose()?.ok_or_else(|| bad("empty file".into()))?;
    let mut head = header.split('\t');
    if head.next() != Some("#split-plan") {
        return Err(bad("missing #split-plan header".into()));
    }
    let mut field = |key: &str| -> Result<u64> {
        head.next()
            .and_then(|f| f.strip_prefix(key))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad(format!("header lacks {key}")))
    };
    let seed = field("seed=")?;
    let folds = field("folds=")? as usize;
    let mut plan = SplitPlan {
        seed,
        folds,
        test: Vec::new(),
        train: Vec::new(),
        validation: Vec::new(),
        fold_of: BTreeMap::new(),
    };
    for (n, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').collect();
        match cells.as_slice() {
            [id, "test"] => plan.test.push(id.to_string()),
            [id, fold, role] => {
                let k: usize = fold
                    .strip_prefix("fold ")
                    .and_then(|k| k.parse().ok())
                    .filter(|k| (1..=folds).contains(k))
                    .ok_or_else(|| bad(format!("line {}: bad fold {fold:?}", n + 2)))?;
                plan.fold_of.insert(id.to_string(), k - 1);
                match *role {
                    "train" => plan.train.push(id.to_string()),
                    "validation" => plan.validation.push(id.to_string()),
                    other => return Err(bad(format!("line {}: bad role {other:?}", n + 2))),
                }
            }
            _ => return Err(bad(format!("line {}: expected 2 or 3 fields", n + 2))),
        }
    }
    plan.test.sort();
    plan.train.sort();
    plan.validation.sort();
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("2019-wimbledon-{:04}", 1100 + i)).collect()
    }

    #[test]
    fn paper_sized_split() {
        // 709 · 0.1 = 70.9 → 71; 638 · 0.2 = 127.6 → 128.
        let plan = make_split_plan(&ids(709), 7, &SplitRatios::default()).unwrap();
        assert_eq!(plan.test.len(), 71);
        assert_eq!(plan.validation.len(), 128);
        assert_eq!(plan.train.len(), 510);
        let sizes = plan.fold_sizes();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }

    #[test]
    fn deterministic() {
        let a = make_split_plan(&ids(50), 3, &SplitRatios::default()).unwrap();
        let b = make_split_plan(&ids(50), 3, &SplitRatios::default()).unwrap();
        assert_eq!(a, b);
        let c = make_split_plan(&ids(50), 4, &SplitRatios::default()).unwrap();
        assert_ne!(a.test, c.test);
    }

    #[test]
    fn too_few() {
        assert!(matches!(
            make_split_plan(&ids(10), 1, &SplitRatios::default()),
            Err(FeatureError::TooFewMatches { found: 10, folds: 10 })
        ));
    }

    #[test]
    fn file_round_trip() {
        let plan = make_split_plan(&ids(30), 9, &SplitRatios::default()).unwrap();
        let mut buf = Vec::new();
        write_split_plan(&mut buf, &plan, &ArtifactStamp::unconfigured(0)).unwrap();
        assert_eq!(read_split_plan(buf.as_slice()).unwrap(), plan);
    }

    #[test]
    fn rounding_ties_go_up() {
        assert_eq!(round_half_up(2.5), 3);
        assert_eq!(round_half_up(70.9), 71);
        assert_eq!(round_half_up(0.1 * 715.0), 72);
    }
}
