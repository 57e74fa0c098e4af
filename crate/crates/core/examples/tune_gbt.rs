//! Random search over the boosted-tree space with cross-validation per trial.
//!
//! cargo run --release --example tune_gbt -- [budget]

use pointwin::eval::{random_search, write_trial_log, EvalOptions, SearchSpace};
use pointwin::featureset::{make_split_plan, prepare_dataset, split_by_serve, SplitRatios};
use pointwin::models::Family;
use pointwin::synth::{simulate_dataset, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let budget = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(6);
    let ds = simulate_dataset(&SimConfig {
        matches: 24,
        seed: 5,
        ..SimConfig::default()
    })
    .assemble()?;
    let set = prepare_dataset(&ds, false)?;
    let plan = make_split_plan(&set.match_ids(), 2, &SplitRatios { folds: 4, ..SplitRatios::default() })?;
    let (first, _) = split_by_serve(&set);

    let mut space = SearchSpace::default_for(Family::Gbt, budget, 11);
    space.params.retain(|(name, _)| name != "rounds");
    space.params.push(("rounds".into(), "int(10,60)".parse()?));
    let opts = EvalOptions {
        seed: 2,
        serve_number: Some(1),
        ..EvalOptions::default()
    };
    let outcome = random_search(&space, &first, &plan, &opts)?;

    write_trial_log(std::io::stdout().lock(), &outcome.trials)?;
    println!("winner: trial {} -> {}", outcome.best_index, outcome.best.describe());
    Ok(())
}
