//! Match-level cross-validation of every model family on simulated data.
//!
//! cargo run --release --example compare_models -- [matches] [folds]

use pointwin::eval::{cross_validate, EvalOptions, SUMMARY_HEADER};
use pointwin::featureset::{make_split_plan, prepare_dataset, split_by_serve, SplitRatios};
use pointwin::models::{Family, ModelSpec};
use pointwin::synth::{simulate_dataset, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let matches = args.next().map(|s| s.parse()).transpose()?.unwrap_or(30);
    let folds = args.next().map(|s| s.parse()).transpose()?.unwrap_or(5);

    let ds = simulate_dataset(&SimConfig {
        matches,
        seed: 17,
        ..SimConfig::default()
    })
    .assemble()?;
    let set = prepare_dataset(&ds, false)?;
    let plan = make_split_plan(&set.match_ids(), 1, &SplitRatios { folds, ..SplitRatios::default() })?;
    let (first, second) = split_by_serve(&set);

    println!("{SUMMARY_HEADER}");
    for (serve, rows) in [(1u8, &first), (2, &second)] {
        for family in [Family::Baseline, Family::Logistic, Family::Forest, Family::Adaboost, Family::Gbt] {
            let opts = EvalOptions {
                seed: 1,
                serve_number: Some(serve),
                ..EvalOptions::default()
            };
            let report = cross_validate(&ModelSpec::defaults(family), rows, &plan, &opts)?;
            println!("{}", report.summary_row());
        }
    }
    Ok(())
}
