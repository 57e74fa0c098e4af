//! Writes simulated matches in the public file layout.
//!
//! cargo run --example simulate -- <out-dir> [matches] [seed]

use std::path::PathBuf;

use pointwin::synth::{simulate_dataset, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "simulated".into()));
    let matches = args.next().map(|s| s.parse()).transpose()?.unwrap_or(40);
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(7);

    let data = simulate_dataset(&SimConfig {
        matches,
        seed,
        ..SimConfig::default()
    });
    for path in data.write_public_files(&dir)? {
        println!("{}", path.display());
    }
    println!("{} matches, {} points", data.matches.len(), data.points.len());
    Ok(())
}
