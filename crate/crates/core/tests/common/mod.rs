//! Helpers and independent oracles shared by the integration suites and the
//! acceptance harness.

#![allow(dead_code)]

pub mod checks;

use std::path::{Path, PathBuf};

use pointwin::cli::{load_public_files, RunConfig};
use pointwin::ingest::{MergedDataset, RawPoint, Tournament};
use pointwin::synth::{simulate_dataset, SimConfig};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// The hand-written 20-point Wimbledon 2019 match.
pub fn twenty_points() -> MergedDataset {
    let cfg = RunConfig {
        years: vec![2019],
        tournaments: vec![Tournament::Wimbledon],
        ..RunConfig::default()
    };
    load_public_files(&fixture("twenty_points"), &cfg).expect("twenty-point fixture loads")
}

pub fn three_matches() -> MergedDataset {
    load_public_files(&fixture("three_matches"), &RunConfig::default()).expect("three-match fixture loads")
}

pub fn simulated(matches: usize, seed: u64) -> MergedDataset {
    simulate_dataset(&SimConfig {
        matches,
        seed,
        ..SimConfig::default()
    })
    .assemble()
    .expect("simulated data assembles")
}

/// Scoreboard replayed from point winners alone.
#[derive(Clone, Debug, PartialEq)]
pub struct Replayed {
    /// In-game points per player (raw counts, not tokens).
    pub points: [u32; 2],
    pub games: [u32; 2],
    pub sets: [u32; 2],
    pub total: [u32; 2],
    pub tiebreak: bool,
}

impl Replayed {
    /// Ordinal 0..4 outside tiebreaks (AD = 4, deuce = 40-40), raw counts inside.
    pub fn ordinal(&self) -> [f64; 2] {
        if self.tiebreak {
            return [self.points[0] as f64, self.points[1] as f64];
        }
        let [a, b] = self.points;
        if a <= 3 && b <= 3 {
            [a as f64, b as f64]
        } else if a == b {
            [3.0, 3.0]
        } else if a > b {
            [4.0, 3.0]
        } else {
            [3.0, 4.0]
        }
    }

    /// Published score tokens.
    pub fn tokens(&self) -> [String; 2] {
        let o = self.ordinal();
        if self.tiebreak {
            return o.map(|v| format!("{v}"));
        }
        o.map(|v| ["0", "15", "30", "40", "AD"][v as usize].to_string())
    }

    /// True when the returner wins the game by winning the next point.
    pub fn break_point(&self, server: u8) -> bool {
        if self.tiebreak {
            return false;
        }
        let s = usize::from(server - 1);
        let (sv, rt) = (self.points[s], self.points[1 - s]);
        rt >= 3 && rt > sv
    }
}

/// Replays a match from `PointWinner` only. Returns the state before every
/// point and the state after it.
pub fn replay(points: &[RawPoint], tiebreak_at: impl Fn(u32) -> Option<u32>) -> Vec<(Replayed, Replayed)> {
    let mut st = Replayed {
        points: [0, 0],
        games: [0, 0],
        sets: [0, 0],
        total: [0, 0],
        tiebreak: false,
    };
    let mut out = Vec::new();
    for p in points {
        st.tiebreak = tiebreak_at(p.set_no).is_some_and(|n| st.games == [n, n]);
        let before = st.clone();
        let w = usize::from(p.point_winner - 1);
        st.points[w] += 1;
        st.total[w] += 1;
        let need = if st.tiebreak { 7 } else { 4 };
        if st.points[w] >= need && st.points[w] >= st.points[1 - w] + 2 {
            st.points = [0, 0];
            st.games[w] += 1;
            let g = st.games;
            let set_won = (st.tiebreak) || (g[w] >= 6 && g[w] >= g[1 - w] + 2);
            if set_won {
                st.sets[w] += 1;
                st.games = [0, 0];
            }
        }
        out.push((before, st.clone()));
    }
    out
}

/// Best split of an exhaustive search: `(gain, feature, threshold)` candidates
/// within `1e-9` of the maximum, plus the maximum itself. Entropy in bits.
pub fn exhaustive_split(rows: &[Vec<f64>], y: &[u8], w: &[f64]) -> (f64, Vec<(usize, f64)>, f64) {
    fn h(pos: f64, neg: f64) -> f64 {
        let t = pos + neg;
        if t <= 0.0 {
            return 0.0;
        }
        [pos / t, neg / t].iter().filter(|p| **p > 0.0).map(|p| -p * p.log2()).sum()
    }
    let d = rows[0].len();
    let (mut pos, mut neg) = (0.0, 0.0);
    for (l, wt) in y.iter().zip(w) {
        if *l == 1 {
            pos += wt;
        } else {
            neg += wt;
        }
    }
    let parent = h(pos, neg);
    let mut cands = Vec::new();
    for f in 0..d {
        let mut vals: Vec<f64> = rows.iter().map(|r| r[f]).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        for pair in vals.windows(2) {
            let t = 0.5 * (pair[0] + pair[1]);
            let (mut lp, mut ln) = (0.0, 0.0);
            for ((r, l), wt) in rows.iter().zip(y).zip(w) {
                if r[f] <= t {
                    if *l == 1 {
                        lp += wt;
                    } else {
                        ln += wt;
                    }
                }
            }
            let (rp, rn) = (pos - lp, neg - ln);
            let total = pos + neg;
            let gain = parent - (lp + ln) / total * h(lp, ln) - (rp + rn) / total * h(rp, rn);
            cands.push((gain, f, t));
        }
    }
    let best = cands.iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max);
    let near: Vec<(usize, f64)> = cands.iter().filter(|c| best - c.0 <= 1e-9).map(|c| (c.1, c.2)).collect();
    let runner_up = cands
        .iter()
        .filter(|c| best - c.0 > 1e-9)
        .map(|c| c.0)
        .fold(f64::NEG_INFINITY, f64::max);
    (best, near, runner_up)
}

/// AUC as the share of (positive, negative) pairs ranked correctly, ties
/// counting one half.
pub fn pairwise_auc(y: &[u8], s: &[f64]) -> f64 {
    let (mut good, mut pairs) = (0.0, 0.0);
    for i in 0..y.len() {
        for j in 0..y.len() {
            if y[i] == 1 && y[j] == 0 {
                pairs += 1.0;
                good += if s[i] > s[j] {
                    1.0
                } else if s[i] == s[j] {
                    0.5
                } else {
                    0.0
                };
            }
        }
    }
    good / pairs
}

/// Every regular file under `dir`, relative path and contents, sorted.
pub fn snapshot(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let bytes = std::fs::read(&p).unwrap();
                out.push((p.strip_prefix(dir).unwrap().to_path_buf(), bytes));
            }
        }
    }
    out.sort();
    out
}
