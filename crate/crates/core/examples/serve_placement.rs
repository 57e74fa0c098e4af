//! Serve placement heatmaps per serve number and court, plus server win rates.
//!
//! cargo run --example serve_placement -- [out-dir]

use std::fs;
use std::path::PathBuf;

use pointwin::analysis::{render_court_heatmap, Court, PlacementGrid, SidelineCells, SvgStyle, WinRateSummary};
use pointwin::ingest::ServeDepth;
use pointwin::synth::{simulate_dataset, SimConfig};
use pointwin::ArtifactStamp;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| "placement".into());
    fs::create_dir_all(&out)?;
    let ds = simulate_dataset(&SimConfig {
        matches: 20,
        seed: 8,
        ..SimConfig::default()
    })
    .assemble()?;
    let sideline = SidelineCells::default();
    let stamp = ArtifactStamp::unconfigured(8);

    println!("selection\tserves\tsideline% ({})\tNCTL%", sideline.describe());
    for serve in [1, 2] {
        for court in Court::ALL {
            let grid = PlacementGrid::from_points(ds.points(), Some(serve), Some(court))?;
            println!(
                "{}\t{}\t{:.2}\t{:.2}",
                grid.label(),
                grid.total,
                grid.width_share(&sideline.widths),
                grid.depth_share(ServeDepth::Nctl)
            );
            let path = out.join(format!("serve{serve}-{}.svg", court.code().to_ascii_lowercase()));
            fs::write(&path, render_court_heatmap(&grid, &SvgStyle::default(), &stamp))?;
        }
    }
    print!("{}", WinRateSummary::from_points(ds.points())?.to_tsv());
    println!("heatmaps in {}", out.display());
    Ok(())
}
