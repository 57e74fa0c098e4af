use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::CliError;
use crate::analysis::{
    render_court_heatmap, AnalysisError, ImportanceReport, PlacementGrid, SvgStyle, WinRateSummary,
};
use crate::eval::{
    cross_validate, evaluate_model, random_search, split_identity, write_trial_log, EvalOptions, MeanScores,
    SearchSpace,
};
use crate::featureset::{
    make_split_plan, prepare_dataset, read_prepared, read_split_plan, split_by_serve, write_prepared,
    write_schema_sidecar, write_split_plan, FeatureSchema, PreparedSet, SplitPlan,
};
use crate::ingest::{
    assemble_dataset, parse_matches_file, parse_points_file, parse_rankings, read_dataset, write_dataset,
    write_exclusions, Dialect, Gender, MergedDataset, RawPoint, ServeDepth,
};
use crate::models::{fit, Family, FittedModel, Hyperparams, ModelFile, ModelSpec};
use crate::ArtifactStamp;

pub const DATASET_FILE: &str = "dataset.tsv";
pub const EXCLUSIONS_FILE: &str = "exclusions.tsv";
pub const SPLIT_FILE: &str = "split.tsv";
pub const REPORT_DIR: &str = "report";

pub fn prepared_file(serve: u8) -> String {
    format!("prepared-serve{serve}.tsv")
}

pub fn schema_file(serve: u8) -> String {
    format!("schema-serve{serve}.tsv")
}

pub fn model_file(family: Family, serve: u8) -> String {
    format!("model-{family}-serve{serve}.json")
}

pub fn cv_report_file(family: Family, serve: u8) -> String {
    format!("cv-{family}-serve{serve}.json")
}

pub fn trials_file(family: Family, serve: u8) -> String {
    format!("trials-{family}-serve{serve}.tsv")
}

pub fn tuned_file(family: Family, serve: u8) -> String {
    format!("tuned-{family}-serve{serve}.json")
}

pub fn eval_report_file(split: &str, family: Family, serve: u8) -> String {
    format!("{split}-{family}-serve{serve}.json")
}

/// Which matches `evaluate` scores.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum EvalSplit {
    Test,
    Validation,
    Train,
    /// Train and validation together.
    Development,
}

impl EvalSplit {
    pub fn name(self) -> &'static str {
        match self {
            EvalSplit::Test => "test",
            EvalSplit::Validation => "validation",
            EvalSplit::Train => "train",
            EvalSplit::Development => "development",
        }
    }

    fn ids(self, plan: &SplitPlan) -> Vec<String> {
        match self {
            EvalSplit::Test => plan.test.clone(),
            EvalSplit::Validation => plan.validation.clone(),
            EvalSplit::Train => plan.train.clone(),
            EvalSplit::Development => plan.development(),
        }
    }
}

/// Winner of a search, as written by `tune` and read by `train --tuned`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TunedParams {
    pub family: Family,
    pub serve_number: u8,
    pub hyperparams: Hyperparams,
    pub best_trial: usize,
    pub trials: usize,
    pub mean: MeanScores,
    pub stamp: ArtifactStamp,
}

fn input_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(|e| input_err(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::Failed(format!("{}: {e}", dir.display())))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))
}

/// `text` behind a `# config_hash=... seed=... schema=...` line.
fn stamped(stamp: &ArtifactStamp, text: &str) -> String {
    format!("# {}\n{text}", stamp.describe())
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))
}

fn load_dataset(cfg: &RunConfig) -> Result<MergedDataset, CliError> {
    let path = cfg.out.join(DATASET_FILE);
    let (ds, _) = read_dataset(open(&path)?).map_err(|e| input_err(&path, e))?;
    Ok(ds)
}

fn load_prepared(cfg: &RunConfig, serve: u8) -> Result<PreparedSet, CliError> {
    let path = cfg.out.join(prepared_file(serve));
    let (set, _) = read_prepared(open(&path)?).map_err(|e| input_err(&path, e))?;
    Ok(set)
}

fn load_plan(cfg: &RunConfig) -> Result<SplitPlan, CliError> {
    let path = cfg.out.join(SPLIT_FILE);
    read_split_plan(open(&path)?).map_err(|e| input_err(&path, e))
}

fn rankings_prefix(gender: Gender) -> &'static str {
    match gender {
        Gender::Women => "wta",
        _ => "atp",
    }
}

/// Parses the public files for every in-scope event found in `dir` and
/// assembles them.
pub fn load_public_files(dir: &Path, cfg: &RunConfig) -> Result<MergedDataset, CliError> {
    if !dir.is_dir() {
        return Err(input_err(dir, "data directory not found"));
    }
    let dialect = Dialect::default();
    let mut points: Vec<RawPoint> = Vec::new();
    let mut metas = Vec::new();
    let mut found = 0;
    for &year in &cfg.years {
        for &t in &cfg.tournaments {
            let pts_path = dir.join(format!("{year}-{}-points.csv", t.code()));
            if !pts_path.is_file() {
                log::info!("{} not found; skipping {year} {}", pts_path.display(), t.code());
                continue;
            }
            let m_path = dir.join(format!("{year}-{}-matches.csv", t.code()));
            metas.extend(parse_matches_file(open(&m_path)?).map_err(|e| input_err(&m_path, e))?);
            points.extend(parse_points_file(open(&pts_path)?, &dialect).map_err(|e| input_err(&pts_path, e))?);
            found += 1;
        }
    }
    if found == 0 {
        return Err(input_err(dir, "no in-scope <year>-<slam>-points.csv files"));
    }
    let prefix = rankings_prefix(cfg.gender);
    let mut ranking_paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| input_err(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with(&format!("{prefix}_rankings_")) && n.ends_with(".csv"))
        })
        .collect();
    ranking_paths.sort();
    if ranking_paths.is_empty() {
        return Err(input_err(&dir.join(format!("{prefix}_rankings_*.csv")), "no ranking files"));
    }
    let players_path = dir.join(format!("{prefix}_players.csv"));
    let sources = ranking_paths.iter().map(|p| open(p)).collect::<Result<Vec<_>, _>>()?;
    let rankings = parse_rankings(sources, open(&players_path)?).map_err(|e| input_err(dir, e))?;
    for w in rankings.warnings() {
        log::warn!("{w}");
    }
    // Points without metadata are dropped here rather than failing assembly.
    let known: std::collections::HashSet<&str> = metas.iter().map(|m| m.match_id.as_str()).collect();
    let before = points.len();
    let points: Vec<RawPoint> = points.into_iter().filter(|p| known.contains(p.match_id.as_str())).collect();
    if points.len() < before {
        log::warn!("{} points reference matches missing from the metadata", before - points.len());
    }
    assemble_dataset(points, &metas, &rankings, &cfg.scope()).map_err(|e| CliError::Input(e.to_string()))
}

pub fn cmd_ingest(cfg: &RunConfig) -> Result<(), CliError> {
    let dir = cfg
        .data_dir
        .clone()
        .ok_or_else(|| CliError::Usage(format!("no data directory: pass --data-dir or set {}", super::DATA_DIR_ENV)))?;
    let ds = load_public_files(&dir, cfg)?;
    let stamp = cfg.stamp();
    let path = cfg.out.join(DATASET_FILE);
    let mut w = create(&path)?;
    write_dataset(&mut w, &ds, &stamp).map_err(|e| CliError::Failed(e.to_string()))?;
    w.flush().map_err(|e| CliError::Failed(e.to_string()))?;
    let mut w = create(&cfg.out.join(EXCLUSIONS_FILE))?;
    writeln!(w, "# {}", stamp.describe()).map_err(|e| CliError::Failed(e.to_string()))?;
    write_exclusions(&mut w, &ds.exclusions).map_err(|e| CliError::Failed(e.to_string()))?;
    w.flush().map_err(|e| CliError::Failed(e.to_string()))?;
    println!(
        "{} matches, {} points ({} matches excluded) -> {}",
        ds.matches.len(),
        ds.point_count(),
        ds.exclusions.len(),
        path.display()
    );
    Ok(())
}

pub fn cmd_prepare(cfg: &RunConfig) -> Result<(), CliError> {
    let ds = load_dataset(cfg)?;
    let stamp = cfg.stamp();
    let set = prepare_dataset(&ds, cfg.keep_double_faults).map_err(|e| CliError::Input(e.to_string()))?;
    let plan = make_split_plan(&ds.match_ids(), cfg.seed, &cfg.ratios).map_err(|e| CliError::Input(e.to_string()))?;
    let mut w = create(&cfg.out.join(SPLIT_FILE))?;
    write_split_plan(&mut w, &plan, &stamp).map_err(|e| CliError::Failed(e.to_string()))?;
    w.flush().map_err(|e| CliError::Failed(e.to_string()))?;

    let (first, second) = split_by_serve(&set);
    for (serve, part) in [(1u8, &first), (2, &second)] {
        let mut w = create(&cfg.out.join(prepared_file(serve)))?;
        write_prepared(&mut w, part, &stamp).map_err(|e| CliError::Failed(e.to_string()))?;
        w.flush().map_err(|e| CliError::Failed(e.to_string()))?;
        let dev: Vec<_> = part.rows.iter().filter(|r| plan.fold_of.contains_key(&*r.match_id)).collect();
        let schema = FeatureSchema::fit(&part.layout, &dev);
        let mut w = create(&cfg.out.join(schema_file(serve)))?;
        write_schema_sidecar(&mut w, &schema, &stamp).map_err(|e| CliError::Failed(e.to_string()))?;
        w.flush().map_err(|e| CliError::Failed(e.to_string()))?;
        println!(
            "serve {serve}: {} rows, server win rate {:.4}, {} encoded columns",
            part.len(),
            part.server_win_rate(),
            schema.width()
        );
    }
    println!(
        "{} rows total; split {} -> {}",
        set.len(),
        split_identity(&plan),
        cfg.out.join(SPLIT_FILE).display()
    );
    Ok(())
}

fn spec_for(cfg: &RunConfig, serve: u8, tuned: bool) -> Result<ModelSpec, CliError> {
    let hp = if tuned {
        let path = cfg.out.join(tuned_file(cfg.family, serve));
        let t: TunedParams = serde_json::from_reader(open(&path)?).map_err(|e| input_err(&path, e))?;
        t.hyperparams
    } else {
        let mut hp = ModelSpec::defaults(cfg.family).to_hyperparams();
        hp.extend(cfg.family_hyperparams());
        hp
    };
    ModelSpec::from_hyperparams(cfg.family, &hp).map_err(|e| CliError::Usage(e.to_string()))
}

fn eval_options(cfg: &RunConfig, serve: u8) -> EvalOptions {
    EvalOptions {
        seed: cfg.seed,
        threshold: cfg.threshold,
        serve_number: Some(serve),
    }
}

/// Cross-validates on the development matches, then refits on all of them.
pub fn cmd_train(cfg: &RunConfig, tuned: bool) -> Result<(), CliError> {
    let plan = load_plan(cfg)?;
    let stamp = cfg.stamp();
    for serve in cfg.serves() {
        let set = load_prepared(cfg, serve)?;
        let spec = spec_for(cfg, serve, tuned)?;
        let report = cross_validate(&spec, &set, &plan, &eval_options(cfg, serve))?.with_stamp(stamp.clone());
        write_text(&cfg.out.join(cv_report_file(cfg.family, serve)), &report.to_json())?;

        let dev = set.filter_matches(|id| plan.fold_of.contains_key(id));
        let schema = FeatureSchema::fit(&dev.layout, &dev.rows);
        let fm = schema.transform(&dev.rows);
        let model = fit(&spec, &fm.x, &fm.y, cfg.seed).map_err(|e| CliError::Failed(e.to_string()))?;
        let file = ModelFile::new(model, spec.to_hyperparams(), schema, dev.match_ids(), Some(serve), stamp.clone());
        let path = cfg.out.join(model_file(cfg.family, serve));
        file.save(&path).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))?;
        println!("{}", report.summary_row());
    }
    Ok(())
}

pub fn cmd_tune(cfg: &RunConfig, budget: usize) -> Result<(), CliError> {
    if budget < 1 {
        return Err(CliError::Usage("budget must be at least 1".into()));
    }
    let plan = load_plan(cfg)?;
    let stamp = cfg.stamp();
    for serve in cfg.serves() {
        let set = load_prepared(cfg, serve)?;
        let mut space = SearchSpace::default_for(cfg.family, budget, cfg.seed);
        if let Some(params) = cfg.family_search() {
            space.params = params.to_vec();
        }
        space.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        let outcome = random_search(&space, &set, &plan, &eval_options(cfg, serve))?;
        let mut w = create(&cfg.out.join(trials_file(cfg.family, serve)))?;
        writeln!(w, "# {}", stamp.describe())
            .and_then(|_| write_trial_log(&mut w, &outcome.trials))
            .and_then(|_| w.flush())
            .map_err(|e| CliError::Failed(e.to_string()))?;
        let tuned = TunedParams {
            family: cfg.family,
            serve_number: serve,
            hyperparams: outcome.best.to_hyperparams(),
            best_trial: outcome.best_index,
            trials: outcome.trials.len(),
            mean: outcome.report.mean.clone(),
            stamp: stamp.clone(),
        };
        let json = serde_json::to_string_pretty(&tuned).map_err(|e| CliError::Failed(e.to_string()))? + "\n";
        write_text(&cfg.out.join(tuned_file(cfg.family, serve)), &json)?;
        println!(
            "serve {serve}: trial {} of {} wins: {} (mean roc_auc {})",
            outcome.best_index,
            outcome.trials.len(),
            outcome.best.describe(),
            outcome.report.mean.roc_auc.map_or_else(|| "NA".to_string(), |a| format!("{a:.4}"))
        );
    }
    Ok(())
}

pub fn cmd_evaluate(cfg: &RunConfig, model_path: Option<&Path>, split: EvalSplit) -> Result<(), CliError> {
    let plan = load_plan(cfg)?;
    let stamp = cfg.stamp();
    let targets: Vec<(PathBuf, Option<u8>)> = match model_path {
        Some(p) => vec![(p.to_path_buf(), cfg.serve)],
        None => cfg
            .serves()
            .into_iter()
            .map(|s| (cfg.out.join(model_file(cfg.family, s)), Some(s)))
            .collect(),
    };
    for (path, serve) in targets {
        if !path.is_file() {
            return Err(input_err(&path, "model file not found"));
        }
        let model = ModelFile::load(&path).map_err(|e| input_err(&path, e))?;
        let serve = model
            .serve_number
            .or(serve)
            .ok_or_else(|| CliError::Usage("model records no serve number; pass --serve".into()))?;
        let ids: std::collections::BTreeSet<String> = split.ids(&plan).into_iter().collect();
        let set = load_prepared(cfg, serve)?.filter_matches(|id| ids.contains(id));
        let report = evaluate_model(&model, &set, split.name(), split_identity(&plan), cfg.threshold)?
            .with_stamp(stamp.clone());
        write_text(
            &cfg.out.join(eval_report_file(split.name(), model.family, serve)),
            &report.to_json(),
        )?;
        println!("{}", report.summary_row());
    }
    Ok(())
}

/// Placement grids, win rates and (when a boosted model exists) importance
/// charts, with an index in `report/index.md`.
pub fn cmd_report(cfg: &RunConfig) -> Result<(), CliError> {
    let ds = load_dataset(cfg)?;
    let stamp = cfg.stamp();
    let style = SvgStyle::default();
    let dir = cfg.out.join(REPORT_DIR);
    let points: Vec<&RawPoint> = ds.points().collect();
    let mut index = format!("# Point-winner report\n\n`{}`\n\n", stamp.describe());
    index.push_str(&format!(
        "{} matches, {} points.\n\n## Serve placement\n\nSideline cells: {}.\n\n",
        ds.matches.len(),
        points.len(),
        cfg.sideline.describe()
    ));
    index.push_str("| selection | serves | sideline % | NCTL % | heatmap | table |\n|---|---|---|---|---|---|\n");
    let mut summary = String::from("serve\tcourt\tserves\tsideline_percent\tnctl_percent\n");
    for serve in [1u8, 2] {
        for court in crate::analysis::Court::ALL {
            let stem = format!("placement-serve{serve}-{}", court.code().to_ascii_lowercase());
            match PlacementGrid::from_points(points.iter().copied(), Some(serve), Some(court)) {
                Ok(grid) => {
                    write_text(&dir.join(format!("{stem}.svg")), &render_court_heatmap(&grid, &style, &stamp))?;
                    write_text(&dir.join(format!("{stem}.tsv")), &stamped(&stamp, &grid.to_tsv()))?;
                    let side = grid.width_share(&cfg.sideline.widths);
                    let nctl = grid.depth_share(ServeDepth::Nctl);
                    summary.push_str(&format!("{serve}\t{court}\t{}\t{side:.2}\t{nctl:.2}\n", grid.total));
                    index.push_str(&format!(
                        "| {} | {} | {side:.2} | {nctl:.2} | [{stem}.svg]({stem}.svg) | [{stem}.tsv]({stem}.tsv) |\n",
                        grid.label(),
                        grid.total
                    ));
                }
                Err(AnalysisError::EmptySelection(what)) => {
                    log::warn!("no serves for {what}; grid skipped");
                    index.push_str(&format!("| {what} | 0 | | | skipped | |\n"));
                }
            }
        }
    }
    write_text(&dir.join("placement-summary.tsv"), &stamped(&stamp, &summary))?;

    index.push_str("\n## Server win rates\n\n[winrates.tsv](winrates.tsv)\n\n");
    match WinRateSummary::from_points(points.iter().copied()) {
        Ok(w) => {
            write_text(&dir.join("winrates.tsv"), &stamped(&stamp, &w.to_tsv()))?;
            index.push_str(&format!(
                "First serve in {:.4}, second serve in {:.4}, all points {:.4}.\n",
                w.p_first(),
                w.p_second(),
                w.p_overall()
            ));
        }
        Err(e) => index.push_str(&format!("Skipped: {e}.\n")),
    }

    index.push_str(&format!("\n## Feature importance (gain share > {})\n\n", cfg.importance_threshold));
    for serve in [1u8, 2] {
        let path = cfg.out.join(model_file(Family::Gbt, serve));
        if !path.is_file() {
            index.push_str(&format!("Serve {serve}: no boosted model at `{}`; chart skipped.\n\n", model_file(Family::Gbt, serve)));
            continue;
        }
        let file = ModelFile::load(&path).map_err(|e| input_err(&path, e))?;
        let FittedModel::Gbt(gbt) = &file.model else {
            index.push_str(&format!("Serve {serve}: model is not boosted; chart skipped.\n\n"));
            continue;
        };
        let shares = match gbt.importance_named(&file.schema.column_names()) {
            Ok(s) => s,
            Err(e) => {
                index.push_str(&format!("Serve {serve}: {e}; chart skipped.\n\n"));
                continue;
            }
        };
        let report = ImportanceReport::new(&shares, cfg.importance_threshold);
        let stem = format!("importance-serve{serve}");
        write_text(&dir.join(format!("{stem}.tsv")), &stamped(&stamp, &report.to_tsv()))?;
        write_text(
            &dir.join(format!("{stem}.svg")),
            &report.render_svg(&format!("Serve {serve} gain"), &style, &stamp),
        )?;
        index.push_str(&format!(
            "Serve {serve}: {} features. [{stem}.svg]({stem}.svg), [{stem}.tsv]({stem}.tsv)\n\n",
            report.entries.len()
        ));
    }
    write_text(&dir.join("index.md"), &index)?;
    println!("report -> {}", dir.join("index.md").display());
    Ok(())
}
