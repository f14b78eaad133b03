//! Full pipeline on a manifest, printing the JSON report without timings.
//!
//!     cargo run --example run_report -- manifests/torus_cone.json

use std::path::PathBuf;

use skewprod::manifest;
use skewprod::run::{run, Command, RunOptions};

fn main() {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("manifests/example43.json"));
    let problem = manifest::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let report = run(&problem, Command::Verify, &RunOptions::default()).unwrap();
    print!("{}", report.to_json());
    eprintln!("pass = {}", report.pass);
}
