mod common;

use common::checks;
use pointwin::eval::{confusion, metrics, FoldScores};

#[test]
fn never_predicting_the_returner_gives_returner_recall_zero() {
    checks::metrics_conventions().unwrap();
}

#[test]
fn zero_denominators_are_flagged() {
    let m = metrics(&confusion(&[1, 0], &[0, 0]).unwrap()).unwrap();
    assert_eq!(m.precision, 0.0);
    assert_eq!(m.f1, 0.0);
    assert_eq!(m.zero_division, vec!["precision".to_string(), "f1".to_string()]);
}

#[test]
fn threshold_is_inclusive() {
    let s = FoldScores::score("t", &[1, 0], &[0.5, 0.49], 0.5).unwrap();
    assert_eq!(s.accuracy, 1.0);
    assert_eq!(s.confusion.tp, 1);
}
