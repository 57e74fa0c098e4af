mod common;

use common::{replay, twenty_points};
use pointwin::analysis::{courts, Court, WinRateSummary};
use pointwin::featureset::{accumulate, canonical_layout, prepare_match, shift_outcomes, PairMap};

const MATCH: &str = "2019-wimbledon-1101";

#[test]
fn fixture_loads_as_one_match() {
    let ds = twenty_points();
    assert_eq!(ds.match_ids(), vec![MATCH.to_string()]);
    assert_eq!(ds.point_count(), 20);
    let m = &ds.matches[0];
    assert_eq!(m.p1_rank.rank, 12);
    assert_eq!(m.p2_rank.rank, 40);
}

#[test]
fn replay_reproduces_published_scoreboard() {
    let ds = twenty_points();
    let m = &ds.matches[0];
    let states = replay(&m.points, |s| m.meta.tiebreak_at(s));
    for (p, (_, after)) in m.points.iter().zip(&states) {
        let tokens = if p.game_winner != 0 {
            ["0".to_string(), "0".to_string()]
        } else {
            after.tokens()
        };
        assert_eq!([p.p1_score.clone(), p.p2_score.clone()], tokens, "point {}", p.point_number);
        assert_eq!([p.p1_points_won, p.p2_points_won], after.total, "point {}", p.point_number);
        assert_eq!([p.p1_games_won, p.p2_games_won], after.games, "point {}", p.point_number);
    }
}

#[test]
fn shifted_state_equals_replayed_pre_point_state() {
    let ds = twenty_points();
    let m = &ds.matches[0];
    let states = replay(&m.points, |s| m.meta.tiebreak_at(s));
    let shifted = shift_outcomes(&m.points, &|s| m.meta.tiebreak_at(s)).unwrap();
    assert_eq!(shifted.len(), 20);
    for ((p, (before, _)), st) in m.points.iter().zip(&states).zip(&shifted) {
        let n = p.point_number;
        assert_eq!(st.score, before.ordinal(), "point {n}");
        assert_eq!(st.games, before.games, "point {n}");
        assert_eq!(st.sets, before.sets, "point {n}");
        assert_eq!(st.points_won, before.total, "point {n}");
        assert_eq!(st.tiebreak, before.tiebreak, "point {n}");
        assert_eq!(st.break_point_pending(p.point_server), before.break_point(p.point_server), "point {n}");
    }
    let bp: Vec<u32> = m
        .points
        .iter()
        .zip(&shifted)
        .filter(|(p, st)| st.break_point_pending(p.point_server))
        .map(|(p, _)| p.point_number)
        .collect();
    assert_eq!(bp, vec![11, 13]);
}

#[test]
fn prepared_rows_are_server_perspective() {
    let ds = twenty_points();
    let m = &ds.matches[0];
    let layout = canonical_layout();
    let col = |name: &str| layout.numeric.iter().position(|c| c == name).unwrap();
    let states = replay(&m.points, |s| m.meta.tiebreak_at(s));
    let rows = prepare_match(m, true).unwrap();
    assert_eq!(rows.len(), 20);
    for ((p, (before, _)), r) in m.points.iter().zip(&states).zip(&rows) {
        let s = usize::from(p.point_server - 1);
        let o = before.ordinal();
        let n = p.point_number;
        assert_eq!(r.label, u8::from(p.point_winner == p.point_server), "point {n}");
        assert_eq!(r.numeric[col("P1Score")], o[s], "point {n}");
        assert_eq!(r.numeric[col("P2Score")], o[1 - s], "point {n}");
        assert_eq!(r.numeric[col("P1GamesWon")], f64::from(before.games[s]), "point {n}");
        assert_eq!(r.numeric[col("P1PointsWon")], f64::from(before.total[s]), "point {n}");
        assert_eq!(r.numeric[col("P2PointsWon")], f64::from(before.total[1 - s]), "point {n}");
        let (server_rank, returner_rank) = if s == 0 { (12.0, 40.0) } else { (40.0, 12.0) };
        assert_eq!(r.numeric[col("P1Rank")], server_rank, "point {n}");
        assert_eq!(r.numeric[col("P2Rank")], returner_rank, "point {n}");
        assert_eq!(r.numeric[col("BreakPointPending")], f64::from(u8::from(before.break_point(p.point_server))));
    }
}

#[test]
fn swap_is_an_involution_on_every_row() {
    let ds = twenty_points();
    let layout = canonical_layout();
    let pairs = PairMap::new(&layout.numeric).unwrap();
    for r in prepare_match(&ds.matches[0], true).unwrap() {
        let mut v = r.numeric.clone();
        pairs.swap(&mut v);
        pairs.swap(&mut v);
        assert_eq!(v, r.numeric);
    }
}

#[test]
fn swapping_server_rows_recovers_raw_player_columns() {
    let ds = twenty_points();
    let m = &ds.matches[0];
    let layout = canonical_layout();
    let pairs = PairMap::new(&layout.numeric).unwrap();
    let acc = accumulate(&m.points).unwrap();
    let offset = layout.numeric.len() - acc.names.len();
    for ((p, r), raw) in m.points.iter().zip(prepare_match(m, true).unwrap()).zip(&acc.rows) {
        let mut v = r.numeric.clone();
        if p.point_server == 2 {
            pairs.swap(&mut v);
        }
        assert_eq!(&v[offset..], raw.as_slice(), "point {}", p.point_number);
    }
}

#[test]
fn accumulated_counts_match_naive_recount() {
    let ds = twenty_points();
    let m = &ds.matches[0];
    let acc = accumulate(&m.points).unwrap();
    let naive = |pred: &dyn Fn(&pointwin::ingest::RawPoint) -> bool| -> Vec<f64> {
        (0..m.points.len())
            .map(|i| m.points[..i].iter().filter(|p| pred(p)).count() as f64)
            .collect()
    };
    use pointwin::ingest::{EventFlag, ServeWidth};
    assert_eq!(
        acc.column("P1AceA").unwrap(),
        naive(&|p| p.player(1).is_set(EventFlag::Ace))
    );
    assert_eq!(
        acc.column("P2DoubleFaultA").unwrap(),
        naive(&|p| p.player(2).is_set(EventFlag::DoubleFault))
    );
    assert_eq!(
        acc.column("P2ServeWidthWA").unwrap(),
        naive(&|p| p.point_server == 2 && p.serve_width == Some(ServeWidth::W))
    );
    assert_eq!(acc.column("P1AceA").unwrap()[19], 3.0);
}

#[test]
fn courts_alternate_within_each_game() {
    let ds = twenty_points();
    let got = courts(ds.points());
    let d = Court::Deuce;
    let a = Court::Ad;
    let mut want = vec![d, a, d, a, d];
    want.extend([d, a, d, a, d, a, d, a, d, a]);
    want.extend([d, a, d, a, d]);
    assert_eq!(got, want);
}

#[test]
fn win_rates_from_raw_and_prepared_agree() {
    let ds = twenty_points();
    let m = &ds.matches[0];
    let raw = WinRateSummary::from_points(ds.points()).unwrap();
    let prepared =
        WinRateSummary::from_prepared(&prepare_match(m, false).unwrap(), &prepare_match(m, true).unwrap()).unwrap();
    assert_eq!(raw, prepared);
    assert_eq!((raw.first_won, raw.first_total), (12, 13));
    assert_eq!((raw.second_won, raw.second_total), (2, 5));
    assert_eq!((raw.overall_won, raw.overall_total), (14, 20));
}
