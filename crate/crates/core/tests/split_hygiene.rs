mod common;

use common::{checks, simulated};
use pointwin::eval::{cross_validate, EvalError, EvalOptions};
use pointwin::featureset::{make_split_plan, prepare_dataset, read_split_plan, write_split_plan, MatchRole, SplitRatios};
use pointwin::models::{Family, ModelSpec};
use pointwin::ArtifactStamp;

fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("m{i:03}")).collect()
}

#[test]
fn roles_folds_and_leakage_guard() {
    checks::split_hygiene().unwrap();
}

#[test]
fn plan_depends_only_on_ids_and_seed() {
    let ratios = SplitRatios::default();
    let a = make_split_plan(&ids(50), 7, &ratios).unwrap();
    let mut shuffled = ids(50);
    shuffled.reverse();
    assert_eq!(a, make_split_plan(&shuffled, 7, &ratios).unwrap());
    assert_ne!(a, make_split_plan(&ids(50), 8, &ratios).unwrap());
}

#[test]
fn ratio_sizes() {
    let plan = make_split_plan(&ids(709), 1, &SplitRatios::default()).unwrap();
    assert_eq!(plan.test.len(), 71);
    assert_eq!(plan.validation.len(), 128);
    assert_eq!(plan.train.len(), 510);
    let sizes = plan.fold_sizes();
    assert_eq!(sizes.iter().sum::<usize>(), 638);
    assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
}

#[test]
fn roles_agree_with_lists() {
    let plan = make_split_plan(&ids(30), 3, &SplitRatios::default()).unwrap();
    for id in &plan.test {
        assert_eq!(plan.role(id), Some(MatchRole::Test));
    }
    for id in &plan.train {
        assert!(matches!(plan.role(id), Some(MatchRole::Train { .. })));
    }
    for id in &plan.validation {
        assert!(matches!(plan.role(id), Some(MatchRole::Validation { .. })));
    }
    assert_eq!(plan.role("unknown"), None);
}

#[test]
fn plan_file_round_trips() {
    let plan = make_split_plan(&ids(25), 9, &SplitRatios::default()).unwrap();
    let mut buf = Vec::new();
    write_split_plan(&mut buf, &plan, &ArtifactStamp::unconfigured(9)).unwrap();
    assert_eq!(read_split_plan(buf.as_slice()).unwrap(), plan);
}

#[test]
fn cross_validation_refuses_a_single_fold() {
    let set = prepare_dataset(&simulated(6, 3), false).unwrap();
    let mut plan = make_split_plan(&set.match_ids(), 1, &SplitRatios { folds: 2, ..SplitRatios::default() }).unwrap();
    plan.folds = 1;
    let err = cross_validate(&ModelSpec::defaults(Family::Baseline), &set, &plan, &EvalOptions::default()).unwrap_err();
    assert!(matches!(err, EvalError::NoFolds));
}
