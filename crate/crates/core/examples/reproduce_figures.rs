//! Run every experiment into a directory (default `out/`).
//!
//! `cargo run --release --example reproduce_figures -- out`

use effgrow::experiments::{run_experiment, ExperimentConfig, ExperimentId};
use effgrow::Error;

fn main() -> effgrow::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "out".to_string());
    for id in ExperimentId::ALL {
        let mut cfg = ExperimentConfig::new(id);
        cfg.out = out.clone().into();
        match run_experiment(&cfg) {
            Ok(m) => println!("{id}: {} files, all checks passed", m.files.len()),
            Err(Error::CheckFailed { .. }) => println!("{id}: written, some checks failed (see manifest)"),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}
