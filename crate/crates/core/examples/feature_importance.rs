//! Gain importance of a boosted model, filtered at 0.01 and drawn as a bar
//! chart.
//!
//! cargo run --release --example feature_importance -- [out.svg]

use pointwin::analysis::{ImportanceReport, SvgStyle, DEFAULT_IMPORTANCE_THRESHOLD};
use pointwin::featureset::{encode, prepare_dataset, split_by_serve};
use pointwin::models::{fit_gbt, Family, ModelSpec};
use pointwin::synth::{simulate_dataset, SimConfig};
use pointwin::ArtifactStamp;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "importance.svg".into());
    let ds = simulate_dataset(&SimConfig {
        matches: 20,
        seed: 12,
        ..SimConfig::default()
    })
    .assemble()?;
    let (first, _) = split_by_serve(&prepare_dataset(&ds, false)?);
    let (fm, _) = encode(&first.rows, &first.layout, &first.rows);

    let ModelSpec::Gbt(params) = ModelSpec::defaults(Family::Gbt) else {
        unreachable!()
    };
    let model = fit_gbt(&fm.x, &fm.y, &params, 1)?;
    let report = ImportanceReport::new(&model.importance_named(&fm.columns)?, DEFAULT_IMPORTANCE_THRESHOLD);
    print!("{}", report.to_tsv());
    std::fs::write(&out, report.render_svg("First serve gain", &SvgStyle::default(), &ArtifactStamp::unconfigured(1)))?;
    println!("chart -> {out}");
    Ok(())
}
