//! Run an experiment configuration file and write results plus plot series.
//!
//!     cargo run --release --example run_grid -- crates/core/configs/smoke.json /tmp/smoke

use std::path::PathBuf;

use pricebounds::harness::{emit_plot_series, run_experiment, ExperimentConfig};

fn main() -> pricebounds::Result<()> {
    env_logger::init();
    let mut args = std::env::args().skip(1);
    let config = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/smoke.json"));
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("pricebounds-example"));

    let mut cfg = ExperimentConfig::from_json_file(&config)?;
    cfg.output_dir = Some(out.clone());
    let result = run_experiment(&cfg)?;
    let files = emit_plot_series(&result.rows(), &out.join("plots"))?;
    println!(
        "{} rows, {} flagged trials, {} plot files under {}",
        result.rows().len(),
        result.flagged().count(),
        files.len(),
        out.display()
    );
    Ok(())
}
