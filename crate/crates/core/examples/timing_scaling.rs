//! Time to compute bounds as the item count grows.

use pricebounds::harness::{
    run_experiment, timing_series, BootstrapSweep, CvSweep, ExperimentConfig,
};

fn main() -> pricebounds::Result<()> {
    let cfg = ExperimentConfig {
        m: vec![2, 4, 6, 8],
        n: vec![300],
        delta: vec![0.5],
        trials: 3,
        master_seed: 3,
        bootstrap: Some(BootstrapSweep {
            kappa: vec![2.576],
            ..BootstrapSweep::default()
        }),
        cross_validation: Some(CvSweep {
            gamma: vec![3.0],
            ..CvSweep::default()
        }),
        workers: Some(1),
        ..ExperimentConfig::default()
    };
    let rows = run_experiment(&cfg)?.rows();
    for (key, points) in timing_series(&rows) {
        println!(
            "{} ({} = {})",
            key.method.name(),
            key.method.sweep_param(),
            key.sweep_value()
        );
        for p in points {
            println!(
                "  m = {:>2}: {:.4} s ± {:.4}",
                p.m, p.mean_time_s, p.sem_time_s
            );
        }
    }
    Ok(())
}
