//! Shows how a row is built from points strictly before it: the scoreboard
//! is shifted down one row, accumulated counts stop at the previous point,
//! and rows served by player 2 are swapped into the server's perspective.
//!
//! cargo run --example leak_free_features

use pointwin::featureset::{canonical_layout, prepare_match, shift_outcomes};
use pointwin::ingest::MergedMatch;
use pointwin::synth::{simulate_dataset, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ds = simulate_dataset(&SimConfig {
        matches: 1,
        seed: 3,
        ..SimConfig::default()
    })
    .assemble()?;
    let m = &ds.matches[0];
    let layout = canonical_layout();
    let shown = ["P1Score", "P2Score", "P1PointsWon", "P2PointsWon", "BreakPointPending", "P1AceA", "P2AceA"];
    let idx: Vec<usize> = shown.iter().map(|c| layout.numeric_index(c).unwrap()).collect();

    let states = shift_outcomes(&m.points, &|s| m.meta.tiebreak_at(s))?;
    let rows = prepare_match(m, true)?;
    println!("pt  srv  published  pre-point  label  {}", shown.join(" "));
    for ((p, st), r) in m.points.iter().zip(&states).zip(&rows).take(12) {
        let vals: Vec<String> = idx.iter().map(|&j| r.numeric[j].to_string()).collect();
        println!(
            "{:>2}  {}    {:>3}-{:<3}    {}-{}        {}      {}",
            p.point_number,
            p.point_server,
            p.p1_score,
            p.p2_score,
            st.score[0],
            st.score[1],
            r.label,
            vals.join(" ")
        );
    }

    // Cutting the match after point k leaves row k unchanged.
    let k = m.points.len() / 2;
    let cut = MergedMatch {
        points: m.points[..=k].to_vec(),
        ..m.clone()
    };
    let same = prepare_match(&cut, true)?.last() == rows.iter().find(|r| r.point_number == m.points[k].point_number);
    println!("row {} identical after truncation: {same}", m.points[k].point_number);
    Ok(())
}
