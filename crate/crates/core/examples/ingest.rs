//! Loads public-format files and prints what survived assembly.
//!
//! cargo run --example ingest -- [data-dir]

use std::path::PathBuf;

use pointwin::analysis::WinRateSummary;
use pointwin::cli::{load_public_files, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/three_matches"));
    let ds = load_public_files(&dir, &RunConfig::default()).map_err(|e| e.message().to_string())?;

    println!("{} matches, {} points", ds.matches.len(), ds.point_count());
    for m in &ds.matches {
        println!(
            "  {}  {} ({}) v {} ({})  {} points",
            m.meta.match_id,
            m.meta.player1_name,
            m.p1_rank.rank,
            m.meta.player2_name,
            m.p2_rank.rank,
            m.points.len()
        );
    }
    for e in &ds.exclusions {
        println!("  excluded {}: {}", e.match_id, e.reason);
    }
    let w = WinRateSummary::from_points(ds.points())?;
    print!("{}", w.to_tsv());
    Ok(())
}
