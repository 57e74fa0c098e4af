use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::analysis::{SidelineCells, DEFAULT_IMPORTANCE_THRESHOLD};
use crate::artifact::sha256_hex;
use crate::eval::Distribution;
use crate::featureset::SplitRatios;
use crate::ingest::{Gender, Scope, Tournament};
use crate::models::{Family, Hyperparams};
use crate::ArtifactStamp;

use super::CliError;

/// Environment variable naming the default data directory.
pub const DATA_DIR_ENV: &str = "POINTWIN_DATA_DIR";

/// Everything a run depends on. Built from defaults, then the environment,
/// then a `key = value` config file, then command-line flags.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub data_dir: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub tournaments: Vec<Tournament>,
    pub years: Vec<i32>,
    pub gender: Gender,
    pub ratios: SplitRatios,
    pub keep_double_faults: bool,
    pub serve: Option<u8>,
    pub family: Family,
    /// Overrides of the family defaults, by family name (`gbt.eta = 0.1`).
    /// Only the selected family's entries are used.
    pub hyperparams: BTreeMap<String, Hyperparams>,
    /// Search distributions by family name (`search.gbt.eta = uniform(0.01, 0.3)`);
    /// none for the selected family means its built-in space.
    pub search: BTreeMap<String, Vec<(String, Distribution)>>,
    pub budget: usize,
    pub threshold: f64,
    pub sideline: SidelineCells,
    pub importance_threshold: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let scope = Scope::default();
        Self {
            data_dir: None,
            out: PathBuf::from("pointwin-out"),
            seed: 1,
            tournaments: scope.tournaments.into_iter().collect(),
            years: scope.years.into_iter().collect(),
            gender: scope.gender,
            ratios: SplitRatios::default(),
            keep_double_faults: false,
            serve: None,
            family: Family::Gbt,
            hyperparams: BTreeMap::new(),
            search: BTreeMap::new(),
            budget: 20,
            threshold: 0.5,
            sideline: SidelineCells::default(),
            importance_threshold: DEFAULT_IMPORTANCE_THRESHOLD,
        }
    }
}

fn usage(msg: String) -> CliError {
    CliError::Usage(msg)
}

/// Splits `<family>.<name>`; `key` is only used in the error.
fn family_key<'a>(key: &str, rest: &'a str) -> Result<(String, &'a str), CliError> {
    let unknown = || usage(format!("unknown config key `{key}`"));
    let (family, name) = rest.split_once('.').ok_or_else(unknown)?;
    let family: Family = family.parse().map_err(|_| unknown())?;
    if name.is_empty() {
        return Err(unknown());
    }
    Ok((family.name().to_string(), name))
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| usage(format!("{key}: cannot parse {v:?}")))
}

/// `2016-2020`, `2016,2018` or a mix of both.
fn parse_years(v: &str) -> Result<Vec<i32>, CliError> {
    let mut years = Vec::new();
    for part in v.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (i32, i32) = (parse_num("years", a)?, parse_num("years", b)?);
                if a > b {
                    return Err(usage(format!("years: empty range {part}")));
                }
                years.extend(a..=b);
            }
            None => years.push(parse_num("years", part)?),
        }
    }
    years.sort_unstable();
    years.dedup();
    Ok(years)
}

fn parse_bool(key: &str, v: &str) -> Result<bool, CliError> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(usage(format!("{key}: expected true or false, found {v:?}"))),
    }
}

pub(crate) fn parse_serve(v: &str) -> Result<u8, CliError> {
    match v {
        "1" => Ok(1),
        "2" => Ok(2),
        _ => Err(usage(format!("serve must be 1 or 2, found {v:?}"))),
    }
}

impl RunConfig {
    pub fn scope(&self) -> Scope {
        Scope {
            tournaments: self.tournaments.iter().copied().collect(),
            years: self.years.iter().copied().collect(),
            gender: self.gender,
        }
    }

    /// Serve numbers a command covers: the selected one, or both.
    pub fn serves(&self) -> Vec<u8> {
        self.serve.map_or_else(|| vec![1, 2], |s| vec![s])
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let v = value.trim();
        match key.trim() {
            "data_dir" => self.data_dir = Some(PathBuf::from(v)),
            "out" => self.out = PathBuf::from(v),
            "seed" => self.seed = parse_num(key, v)?,
            "tournaments" => {
                self.tournaments = v
                    .split(',')
                    .map(|t| t.trim().parse::<Tournament>().map_err(|e| usage(e.to_string())))
                    .collect::<Result<_, _>>()?;
                self.tournaments.sort();
                self.tournaments.dedup();
            }
            "years" => self.years = parse_years(v)?,
            "gender" => {
                self.gender = Gender::from_code(v).ok_or_else(|| usage(format!("gender: unknown value {v:?}")))?
            }
            "test_ratio" => self.ratios.test = parse_num(key, v)?,
            "validation_ratio" => self.ratios.validation = parse_num(key, v)?,
            "folds" => self.ratios.folds = parse_num(key, v)?,
            "keep_double_faults" => self.keep_double_faults = parse_bool(key, v)?,
            "serve" => self.serve = Some(parse_serve(v)?),
            "model" => self.family = v.parse().map_err(|e: crate::models::ModelError| usage(e.to_string()))?,
            "budget" => self.budget = parse_num(key, v)?,
            "threshold" => self.threshold = parse_num(key, v)?,
            "sideline" => self.sideline = v.parse().map_err(|e: String| usage(format!("sideline: {e}")))?,
            "importance_threshold" => self.importance_threshold = parse_num(key, v)?,
            k => {
                if let Some(rest) = k.strip_prefix("search.") {
                    let (family, name) = family_key(k, rest)?;
                    let dist: Distribution = v.parse().map_err(|e: crate::eval::EvalError| usage(e.to_string()))?;
                    let params = self.search.entry(family).or_default();
                    params.retain(|(n, _)| n != name);
                    params.push((name.to_string(), dist));
                } else {
                    let (family, name) = family_key(k, k)?;
                    self.hyperparams.entry(family).or_default().insert(name.to_string(), parse_num(k, v)?);
                }
            }
        }
        Ok(())
    }

    /// Hyperparameter overrides for the selected family.
    pub fn family_hyperparams(&self) -> Hyperparams {
        self.hyperparams.get(self.family.name()).cloned().unwrap_or_default()
    }

    /// Configured search distributions for the selected family, if any.
    pub fn family_search(&self) -> Option<&[(String, Distribution)]> {
        self.search.get(self.family.name()).map(Vec::as_slice)
    }

    /// Reads `key = value` lines; `#` starts a comment.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("{}:{}: expected key = value", path.display(), n + 1)))?;
            self.set(k, v)
                .map_err(|e| usage(format!("{}:{}: {}", path.display(), n + 1, e.message())))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let r = &self.ratios;
        if !(r.test > 0.0 && r.test < 1.0) || !(r.validation > 0.0 && r.validation < 1.0) {
            return Err(usage("test_ratio and validation_ratio must lie in (0, 1)".into()));
        }
        if r.folds < 2 {
            return Err(usage("folds must be at least 2".into()));
        }
        if self.tournaments.is_empty() || self.years.is_empty() {
            return Err(usage("scope needs at least one tournament and one year".into()));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(usage("threshold must lie in [0, 1]".into()));
        }
        Ok(())
    }

    /// Canonical `key=value` lines for every setting except the output
    /// directory, sorted by key.
    pub fn canonical(&self) -> String {
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            kv.insert(k.to_string(), v);
        };
        put(
            "data_dir",
            self.data_dir.as_ref().map_or_else(String::new, |p| p.display().to_string()),
        );
        put("seed", self.seed.to_string());
        put(
            "tournaments",
            self.tournaments.iter().map(|t| t.code()).collect::<Vec<_>>().join(","),
        );
        put(
            "years",
            self.years.iter().map(i32::to_string).collect::<Vec<_>>().join(","),
        );
        put("gender", self.gender.code().to_string());
        put("test_ratio", self.ratios.test.to_string());
        put("validation_ratio", self.ratios.validation.to_string());
        put("folds", self.ratios.folds.to_string());
        put("keep_double_faults", self.keep_double_faults.to_string());
        put("serve", self.serve.map_or_else(String::new, |s| s.to_string()));
        put("model", self.family.to_string());
        put("budget", self.budget.to_string());
        put("threshold", self.threshold.to_string());
        put(
            "sideline",
            self.sideline.widths.iter().map(|w| w.code()).collect::<Vec<_>>().join(","),
        );
        put("importance_threshold", self.importance_threshold.to_string());
        for (family, hp) in &self.hyperparams {
            for (k, v) in hp {
                put(&format!("{family}.{k}"), v.to_string());
            }
        }
        for (family, params) in &self.search {
            for (k, d) in params {
                put(&format!("search.{family}.{k}"), d.to_string());
            }
        }
        kv.into_iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn config_hash(&self) -> String {
        sha256_hex(self.canonical().as_bytes())[..16].to_string()
    }

    pub fn stamp(&self) -> ArtifactStamp {
        ArtifactStamp::new(self.config_hash(), self.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_override() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(&path, "# comment\nseed = 7\nyears = 2016-2018, 2020\ngbt.eta = 0.1\nsearch.gbt.rounds = int(10, 20)\n").unwrap();
        let mut c = RunConfig::default();
        c.apply_file(&path).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.years, vec![2016, 2017, 2018, 2020]);
        assert_eq!(c.family_hyperparams()["eta"], 0.1);
        c.set("seed", "9").unwrap();
        assert_eq!(c.seed, 9);
    }

    #[test]
    fn hash_ignores_output_dir() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.out = PathBuf::from("/elsewhere");
        assert_eq!(a.config_hash(), b.config_hash());
        b.seed += 1;
        assert_ne!(a.config_hash(), b.config_hash());
    }

    #[test]
    fn rejects_unknown_key() {
        assert!(matches!(RunConfig::default().set("sed", "1"), Err(CliError::Usage(_))));
    }
}
