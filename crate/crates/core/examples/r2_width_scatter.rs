//! Per-item forecast accuracy against the width each method assigns, with
//! the rank correlation at every noise level.

use pricebounds::evaluation::spearman;
use pricebounds::harness::{run_experiment, BootstrapSweep, CvSweep, ExperimentConfig, Method};

fn main() -> pricebounds::Result<()> {
    let cfg = ExperimentConfig {
        m: vec![5],
        n: vec![1000],
        delta: vec![0.25, 0.5, 0.75],
        trials: 10,
        master_seed: 2,
        bootstrap: Some(BootstrapSweep {
            kappa: vec![1.645],
            ..BootstrapSweep::default()
        }),
        cross_validation: Some(CvSweep {
            gamma: vec![2.5],
            ..CvSweep::default()
        }),
        ..ExperimentConfig::default()
    };
    let rows = run_experiment(&cfg)?.rows();
    for method in [Method::Bootstrap, Method::CrossValidation] {
        for &delta in &cfg.delta {
            let (mut r2, mut width) = (Vec::new(), Vec::new());
            for row in rows
                .iter()
                .filter(|r| r.method == method && r.delta == delta)
            {
                for (a, w) in row.r2.iter().zip(&row.widths) {
                    if a.is_finite() {
                        r2.push(*a);
                        width.push(*w);
                    }
                }
            }
            let mean_width = width.iter().sum::<f64>() / width.len() as f64;
            println!(
                "{:<17} delta {delta:.2}: mean width {mean_width:.3}, Spearman(R², width) {:+.3}",
                method.name(),
                spearman(&r2, &width)
            );
        }
    }
    Ok(())
}
