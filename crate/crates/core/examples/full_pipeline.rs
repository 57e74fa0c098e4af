//! Every `pointwin` stage on the bundled three-match fixture, driven through
//! the same entry point as the binary.
//!
//! cargo run --example full_pipeline -- [out-dir]

use std::path::Path;

fn main() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let out = std::env::args().nth(1).unwrap_or_else(|| "pipeline-out".into());
    let conf = root.join("fixtures/three_matches.conf");
    let data = root.join("fixtures/three_matches");
    let stages: [&[&str]; 6] = [
        &["ingest", "--data-dir", data.to_str().unwrap()],
        &["prepare"],
        &["tune"],
        &["train", "--tuned"],
        &["evaluate"],
        &["report"],
    ];
    for stage in stages {
        println!("$ pointwin {}", stage.join(" "));
        let mut args = vec!["pointwin", "--config", conf.to_str().unwrap(), "--out", &out];
        args.extend_from_slice(stage);
        let code = pointwin::cli::run(args);
        if code != 0 {
            std::process::exit(code);
        }
    }
    println!("artifacts in {out}");
}
