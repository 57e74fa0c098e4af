use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::adaboost::AdaBoostParams;
use super::forest::ForestParams;
use super::gbt::GbtParams;
use super::logistic::LogisticParams;
use super::{ModelError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Baseline,
    Logistic,
    Forest,
    Adaboost,
    Gbt,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Baseline,
        Family::Logistic,
        Family::Forest,
        Family::Adaboost,
        Family::Gbt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Baseline => "baseline",
            Family::Logistic => "logistic",
            Family::Forest => "forest",
            Family::Adaboost => "adaboost",
            Family::Gbt => "gbt",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| ModelError::InvalidHyperparameter(format!("unknown model family `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParamKind {
    Real,
    Integer,
}

/// A hyperparameter with its admissible closed range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamDecl {
    pub name: &'static str,
    pub kind: ParamKind,
    pub min: f64,
    pub max: f64,
    pub default: f64,
    pub help: &'static str,
}

const fn real(name: &'static str, min: f64, max: f64, default: f64, help: &'static str) -> ParamDecl {
    ParamDecl {
        name,
        kind: ParamKind::Real,
        min,
        max,
        default,
        help,
    }
}

const fn int(name: &'static str, min: f64, max: f64, default: f64, help: &'static str) -> ParamDecl {
    ParamDecl {
        name,
        kind: ParamKind::Integer,
        min,
        max,
        default,
        help,
    }
}

const LOGISTIC: [ParamDecl; 2] = [
    real("learning_rate", 1e-6, 10.0, 0.01, "SGD step size"),
    int("epochs", 1.0, 10_000.0, 50.0, "passes over the training rows"),
];

const FOREST: [ParamDecl; 5] = [
    int("n_trees", 1.0, 5_000.0, 100.0, "number of trees"),
    int("m_try", 0.0, 100_000.0, 0.0, "features drawn per node; 0 = floor(sqrt(d))"),
    int("max_depth", 0.0, 10_000.0, 0.0, "depth limit; 0 = unlimited"),
    int("min_leaf", 1.0, 1_000_000.0, 1.0, "minimum rows per leaf"),
    int("bootstrap", 0.0, 1.0, 1.0, "1 = fit each tree on a bootstrap sample"),
];

const ADABOOST: [ParamDecl; 2] = [
    int("rounds", 1.0, 10_000.0, 50.0, "boosting rounds"),
    int("weak_depth", 1.0, 64.0, 1.0, "depth of each weak tree"),
];

const GBT: [ParamDecl; 7] = [
    int("rounds", 0.0, 10_000.0, 100.0, "boosting rounds"),
    real("eta", 1e-6, 1.0, 0.3, "shrinkage applied to every tree"),
    real("lambda", 0.0, 1e6, 1.0, "L2 penalty on leaf weights"),
    real("gamma", 0.0, 1e6, 0.0, "minimum gain to keep a split"),
    int("max_depth", 1.0, 64.0, 6.0, "depth of each tree"),
    int("min_leaf", 1.0, 1_000_000.0, 1.0, "minimum rows per leaf"),
    real("scale_pos_weight", 1e-6, 1e6, 1.0, "multiplier on positive rows' gradient and hessian"),
];

/// Declared hyperparameters of a family, with defaults.
pub fn param_decls(family: Family) -> &'static [ParamDecl] {
    match family {
        Family::Baseline => &[],
        Family::Logistic => &LOGISTIC,
        Family::Forest => &FOREST,
        Family::Adaboost => &ADABOOST,
        Family::Gbt => &GBT,
    }
}

/// Named hyperparameter values; integers are stored as whole numbers.
pub type Hyperparams = BTreeMap<String, f64>;

/// A family together with validated hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ModelSpec {
    Baseline,
    Logistic(LogisticParams),
    Forest(ForestParams),
    Adaboost(AdaBoostParams),
    Gbt(GbtParams),
}

impl ModelSpec {
    pub fn defaults(family: Family) -> Self {
        Self::from_hyperparams(family, &Hyperparams::new()).expect("defaults are valid")
    }

    pub fn family(&self) -> Family {
        match self {
            ModelSpec::Baseline => Family::Baseline,
            ModelSpec::Logistic(_) => Family::Logistic,
            ModelSpec::Forest(_) => Family::Forest,
            ModelSpec::Adaboost(_) => Family::Adaboost,
            ModelSpec::Gbt(_) => Family::Gbt,
        }
    }

    /// Missing names take their defaults; unknown names and out-of-range or
    /// fractional integer values are rejected.
    pub fn from_hyperparams(family: Family, hp: &Hyperparams) -> Result<Self> {
        let decls = param_decls(family);
        for name in hp.keys() {
            if !decls.iter().any(|d| d.name == name) {
                return Err(ModelError::InvalidHyperparameter(format!(
                    "`{name}` is not a {family} hyperparameter"
                )));
            }
        }
        let mut v = BTreeMap::new();
        for d in decls {
            let x = hp.get(d.name).copied().unwrap_or(d.default);
            if !x.is_finite() || x < d.min || x > d.max {
                return Err(ModelError::InvalidHyperparameter(format!(
                    "{family}.{} = {x} outside [{}, {}]",
                    d.name, d.min, d.max
                )));
            }
            if d.kind == ParamKind::Integer && x.fract() != 0.0 {
                return Err(ModelError::InvalidHyperparameter(format!(
                    "{family}.{} must be an integer, got {x}",
                    d.name
                )));
            }
            v.insert(d.name, x);
        }
        let n = |k: &str| v[k] as usize;
        let optional = |k: &str| Some(n(k)).filter(|&x| x > 0);
        Ok(match family {
            Family::Baseline => ModelSpec::Baseline,
            Family::Logistic => ModelSpec::Logistic(LogisticParams {
                learning_rate: v["learning_rate"],
                epochs: n("epochs"),
            }),
            Family::Forest => ModelSpec::Forest(ForestParams {
                n_trees: n("n_trees"),
                m_try: optional("m_try"),
                max_depth: optional("max_depth"),
                min_leaf: n("min_leaf"),
                bootstrap: n("bootstrap") == 1,
            }),
            Family::Adaboost => ModelSpec::Adaboost(AdaBoostParams {
                rounds: n("rounds"),
                weak_depth: n("weak_depth"),
            }),
            Family::Gbt => ModelSpec::Gbt(GbtParams {
                rounds: n("rounds"),
                eta: v["eta"],
                lambda: v["lambda"],
                gamma: v["gamma"],
                max_depth: n("max_depth"),
                min_leaf: n("min_leaf"),
                scale_pos_weight: v["scale_pos_weight"],
            }),
        })
    }

    pub fn to_hyperparams(&self) -> Hyperparams {
        let mut hp = Hyperparams::new();
        let mut put = |k: &str, v: f64| {
            hp.insert(k.to_string(), v);
        };
        match self {
            ModelSpec::Baseline => {}
            ModelSpec::Logistic(p) => {
                put("learning_rate", p.learning_rate);
                put("epochs", p.epochs as f64);
            }
            ModelSpec::Forest(p) => {
                put("n_trees", p.n_trees as f64);
                put("m_try", p.m_try.unwrap_or(0) as f64);
                put("max_depth", p.max_depth.unwrap_or(0) as f64);
                put("min_leaf", p.min_leaf as f64);
                put("bootstrap", f64::from(u8::from(p.bootstrap)));
            }
            ModelSpec::Adaboost(p) => {
                put("rounds", p.rounds as f64);
                put("weak_depth", p.weak_depth as f64);
            }
            ModelSpec::Gbt(p) => {
                put("rounds", p.rounds as f64);
                put("eta", p.eta);
                put("lambda", p.lambda);
                put("gamma", p.gamma);
                put("max_depth", p.max_depth as f64);
                put("min_leaf", p.min_leaf as f64);
                put("scale_pos_weight", p.scale_pos_weight);
            }
        }
        hp
    }

    /// `name=value` pairs joined by commas, in name order.
    pub fn describe(&self) -> String {
        let hp = self.to_hyperparams();
        if hp.is_empty() {
            return "-".to_string();
        }
        hp.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",")
    }
}
