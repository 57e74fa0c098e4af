use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cv::{cross_validate, EvalOptions};
use super::report::{EvalReport, MeanScores};
use super::{EvalError, Result};
use crate::featureset::{PreparedSet, SplitPlan};
use crate::models::{param_decls, Family, Hyperparams, ModelSpec, ParamKind};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Distribution {
    Uniform { lo: f64, hi: f64 },
    LogUniform { lo: f64, hi: f64 },
    IntUniform { lo: i64, hi: i64 },
    Categorical(Vec<f64>),
}

impl Distribution {
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Distribution::Uniform { lo, hi } => {
                if lo == hi {
                    *lo
                } else {
                    rng.gen_range(*lo..*hi)
                }
            }
            Distribution::LogUniform { lo, hi } => {
                if lo == hi {
                    *lo
                } else {
                    rng.gen_range(lo.ln()..hi.ln()).exp().clamp(*lo, *hi)
                }
            }
            Distribution::IntUniform { lo, hi } => rng.gen_range(*lo..=*hi) as f64,
            Distribution::Categorical(values) => values[rng.gen_range(0..values.len())],
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        match self {
            Distribution::Uniform { lo, hi } | Distribution::LogUniform { lo, hi } => (*lo..=*hi).contains(&v),
            Distribution::IntUniform { lo, hi } => v.fract() == 0.0 && (*lo as f64..=*hi as f64).contains(&v),
            Distribution::Categorical(values) => values.contains(&v),
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distribution::Uniform { lo, hi } => write!(f, "uniform({lo}, {hi})"),
            Distribution::LogUniform { lo, hi } => write!(f, "loguniform({lo}, {hi})"),
            Distribution::IntUniform { lo, hi } => write!(f, "int({lo}, {hi})"),
            Distribution::Categorical(v) => {
                let items: Vec<String> = v.iter().map(f64::to_string).collect();
                write!(f, "choice({})", items.join("|"))
            }
        }
    }
}

/// Parses `uniform(a, b)`, `loguniform(a, b)`, `int(a, b)` or
/// `choice(a|b|...)`.
impl FromStr for Distribution {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || EvalError::InvalidSpace(format!("cannot parse distribution `{s}`"));
        let s = s.trim();
        let (name, rest) = s.split_once('(').ok_or_else(bad)?;
        let args = rest.strip_suffix(')').ok_or_else(bad)?;
        let nums = |sep: char| -> Result<Vec<f64>> {
            args.split(sep)
                .map(|a| a.trim().parse::<f64>().map_err(|_| bad()))
                .collect()
        };
        let pair = || -> Result<(f64, f64)> {
            match nums(',')?.as_slice() {
                [a, b] if a <= b => Ok((*a, *b)),
                _ => Err(bad()),
            }
        };
        match name.trim() {
            "uniform" => pair().map(|(lo, hi)| Distribution::Uniform { lo, hi }),
            "loguniform" => match pair()? {
                (lo, hi) if lo > 0.0 => Ok(Distribution::LogUniform { lo, hi }),
                _ => Err(bad()),
            },
            "int" => match pair()? {
                (lo, hi) if lo.fract() == 0.0 && hi.fract() == 0.0 => Ok(Distribution::IntUniform {
                    lo: lo as i64,
                    hi: hi as i64,
                }),
                _ => Err(bad()),
            },
            "choice" => {
                let v = nums('|')?;
                if v.is_empty() {
                    Err(bad())
                } else {
                    Ok(Distribution::Categorical(v))
                }
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub family: Family,
    /// Sampled in this order; parameters left out keep their defaults.
    pub params: Vec<(String, Distribution)>,
    pub budget: usize,
    pub seed: u64,
}

impl SearchSpace {
    /// A broad space around the defaults of each family.
    pub fn default_for(family: Family, budget: usize, seed: u64) -> Self {
        let p = |name: &str, d: Distribution| (name.to_string(), d);
        let params = match family {
            Family::Baseline => vec![],
            Family::Logistic => vec![
                p("learning_rate", Distribution::LogUniform { lo: 1e-4, hi: 0.1 }),
                p("epochs", Distribution::IntUniform { lo: 5, hi: 100 }),
            ],
            Family::Forest => vec![
                p("n_trees", Distribution::IntUniform { lo: 20, hi: 200 }),
                p("m_try", Distribution::IntUniform { lo: 2, hi: 16 }),
                p("max_depth", Distribution::IntUniform { lo: 3, hi: 20 }),
                p("min_leaf", Distribution::Categorical(vec![1.0, 5.0, 20.0, 50.0])),
            ],
            Family::Adaboost => vec![
                p("rounds", Distribution::IntUniform { lo: 10, hi: 200 }),
                p("weak_depth", Distribution::IntUniform { lo: 1, hi: 3 }),
            ],
            Family::Gbt => vec![
                p("rounds", Distribution::IntUniform { lo: 20, hi: 300 }),
                p("eta", Distribution::LogUniform { lo: 0.01, hi: 0.3 }),
                p("max_depth", Distribution::IntUniform { lo: 2, hi: 8 }),
                p("lambda", Distribution::LogUniform { lo: 0.1, hi: 10.0 }),
                p("gamma", Distribution::Uniform { lo: 0.0, hi: 1.0 }),
                p("scale_pos_weight", Distribution::Uniform { lo: 1.0, hi: 1.5 }),
            ],
        };
        Self {
            family,
            params,
            budget,
            seed,
        }
    }

    /// Every parameter must be declared for the family and its distribution
    /// must stay inside the declared range.
    pub fn validate(&self) -> Result<()> {
        if self.budget < 1 {
            return Err(EvalError::InvalidSpace("budget must be at least 1".into()));
        }
        let decls = param_decls(self.family);
        for (name, dist) in &self.params {
            let decl = decls
                .iter()
                .find(|d| d.name == name)
                .ok_or_else(|| EvalError::InvalidSpace(format!("`{name}` is not a {} hyperparameter", self.family)))?;
            let (lo, hi) = match dist {
                Distribution::Uniform { lo, hi } | Distribution::LogUniform { lo, hi } => (*lo, *hi),
                Distribution::IntUniform { lo, hi } => (*lo as f64, *hi as f64),
                Distribution::Categorical(v) => v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x))),
            };
            let integral = match dist {
                Distribution::IntUniform { .. } => true,
                Distribution::Categorical(v) => v.iter().all(|x| x.fract() == 0.0),
                _ => false,
            };
            if lo < decl.min || hi > decl.max || (decl.kind == ParamKind::Integer && !integral) {
                return Err(EvalError::InvalidSpace(format!(
                    "{name} ~ {dist} leaves the declared range [{}, {}]{}",
                    decl.min,
                    decl.max,
                    if decl.kind == ParamKind::Integer { " (integer)" } else { "" }
                )));
            }
        }
        Ok(())
    }

    /// The first `budget` draws, reproducible from `seed`.
    pub fn draws(&self) -> Vec<Hyperparams> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.budget)
            .map(|_| {
                self.params
                    .iter()
                    .map(|(name, d)| (name.clone(), d.sample(&mut rng)))
                    .collect()
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub index: usize,
    pub seed: u64,
    pub hyperparams: Hyperparams,
    pub mean: MeanScores,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub best_index: usize,
    pub best: ModelSpec,
    pub report: EvalReport,
    pub trials: Vec<Trial>,
}

/// Ranks trials: higher mean roc_auc (undefined counts lowest), then higher
/// f1, then earlier index.
pub fn select_best(trials: &[Trial]) -> Option<usize> {
    let key = |t: &Trial| t.mean.roc_auc.unwrap_or(f64::NEG_INFINITY);
    let mut best: Option<&Trial> = None;
    for t in trials {
        best = match best {
            None => Some(t),
            Some(b) => {
                let better = key(t) > key(b) || (key(t) == key(b) && t.mean.f1 > b.mean.f1);
                Some(if better { t } else { b })
            }
        };
    }
    best.map(|t| t.index)
}

/// Cross-validates `budget` random configurations and keeps the best.
pub fn random_search(space: &SearchSpace, set: &PreparedSet, plan: &SplitPlan, opts: &EvalOptions) -> Result<SearchOutcome> {
    space.validate()?;
    let mut trials = Vec::with_capacity(space.budget);
    let mut reports = Vec::with_capacity(space.budget);
    for (index, hp) in space.draws().into_iter().enumerate() {
        let spec = ModelSpec::from_hyperparams(space.family, &hp)?;
        let report = cross_validate(&spec, set, plan, opts)?;
        log::info!(
            "trial {index}: {} roc_auc={:?} f1={:.4}",
            spec.describe(),
            report.mean.roc_auc,
            report.mean.f1
        );
        trials.push(Trial {
            index,
            seed: opts.seed,
            hyperparams: spec.to_hyperparams(),
            mean: report.mean.clone(),
        });
        reports.push((spec, report));
    }
    let best_index = select_best(&trials).expect("budget ≥ 1");
    let (best, report) = reports.swap_remove(best_index);
    Ok(SearchOutcome {
        best_index,
        best,
        report,
        trials,
    })
}

pub const TRIAL_LOG_HEADER: &str = "trial\tseed\tparams\taccuracy\trecall\tprecision\tf1\troc_auc";

/// One tab-separated row per trial, full-precision metrics.
pub fn write_trial_log<W: Write>(mut w: W, trials: &[Trial]) -> std::io::Result<()> {
    writeln!(w, "{TRIAL_LOG_HEADER}")?;
    for t in trials {
        let params: Vec<String> = t.hyperparams.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            t.index,
            t.seed,
            if params.is_empty() { "-".to_string() } else { params.join(",") },
            t.mean.accuracy,
            t.mean.recall,
            t.mean.precision,
            t.mean.f1,
            t.mean.roc_auc.map_or_else(|| "NA".to_string(), |v| v.to_string())
        )?;
    }
    Ok(())
}
