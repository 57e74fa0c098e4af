mod common;

use common::{replay, simulated};
use pointwin::featureset::{prepare_match, shift_outcomes, PreparedRow};
use pointwin::ingest::{EventFlag, MergedMatch, RawPoint, ReturnDepth};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn row_for(rows: &[PreparedRow], point_number: u32) -> &PreparedRow {
    rows.iter().find(|r| r.point_number == point_number).expect("row present")
}

fn truncated(m: &MergedMatch, keep: usize) -> MergedMatch {
    MergedMatch {
        points: m.points[..keep].to_vec(),
        ..m.clone()
    }
}

/// Scrambles everything about `p` that is only known once the point is over.
fn scramble_outcome(p: &mut RawPoint, rng: &mut ChaCha8Rng) {
    p.point_winner = 3 - p.point_winner;
    p.p1_score = "AD".into();
    p.p2_score = "40".into();
    p.p1_points_won += rng.gen_range(1..50);
    p.p2_points_won += rng.gen_range(1..50);
    p.p1_games_won += 3;
    p.game_winner = rng.gen_range(0..=2);
    p.set_winner = rng.gen_range(0..=2);
    p.return_depth = Some(ReturnDepth::D);
    for ev in &mut p.events {
        for flag in EventFlag::ALL {
            if flag != EventFlag::DoubleFault {
                ev.set(flag, rng.gen_bool(0.5));
            }
        }
    }
}

#[test]
fn truncate_and_recompute_on_sampled_rows() {
    let ds = simulated(12, 21);
    let full: Vec<Vec<PreparedRow>> = ds.matches.iter().map(|m| prepare_match(m, true).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    for _ in 0..1200 {
        let mi = rng.gen_range(0..ds.matches.len());
        let m = &ds.matches[mi];
        let i = rng.gen_range(0..m.points.len());
        let p = &m.points[i];
        let cut = prepare_match(&truncated(m, i + 1), true).unwrap();
        assert_eq!(cut.last(), Some(row_for(&full[mi], p.point_number)), "{} point {}", m.meta.match_id, p.point_number);
        checked += 1;
    }
    assert!(checked >= 1000);
}

#[test]
fn current_outcome_only_moves_the_label() {
    let ds = simulated(6, 22);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        let m = &ds.matches[rng.gen_range(0..ds.matches.len())];
        let i = rng.gen_range(0..m.points.len());
        let mut cut = truncated(m, i + 1);
        let before = prepare_match(&cut, true).unwrap().pop().unwrap();
        scramble_outcome(cut.points.last_mut().unwrap(), &mut rng);
        let after = prepare_match(&cut, true).unwrap().pop().unwrap();
        assert_eq!(before.numeric, after.numeric);
        assert_eq!(before.categorical, after.categorical);
        assert_eq!(before.label, 1 - after.label);
    }
}

#[test]
fn replay_agrees_with_shifted_state_on_simulated_matches() {
    let ds = simulated(8, 23);
    for m in &ds.matches {
        let oracle = replay(&m.points, |s| m.meta.tiebreak_at(s));
        let got = shift_outcomes(&m.points, &|s| m.meta.tiebreak_at(s)).unwrap();
        for ((p, (before, _)), st) in m.points.iter().zip(&oracle).zip(&got) {
            let at = format!("{} point {}", m.meta.match_id, p.point_number);
            assert_eq!(st.score, before.ordinal(), "{at}");
            assert_eq!(st.games, before.games, "{at}");
            assert_eq!(st.sets, before.sets, "{at}");
            assert_eq!(st.tiebreak, before.tiebreak, "{at}");
        }
    }
}

#[test]
fn double_faults_count_in_history_but_are_not_rows() {
    let ds = simulated(4, 24);
    for m in &ds.matches {
        let all = prepare_match(m, true).unwrap();
        let kept = prepare_match(m, false).unwrap();
        let faults = m.points.iter().filter(|p| p.is_double_fault()).count();
        assert_eq!(all.len(), kept.len() + faults);
        for r in &kept {
            assert_eq!(r, row_for(&all, r.point_number));
        }
    }
}
