//! Width/revenue trade-off of the three methods on one grid point, averaged
//! over seeded trials.

use pricebounds::evaluation::mean_and_sem;
use pricebounds::harness::{
    curve_series, run_experiment, BootstrapSweep, CvSweep, ExperimentConfig, QuantileSweep,
};

fn main() -> pricebounds::Result<()> {
    let cfg = ExperimentConfig {
        m: vec![5],
        n: vec![1000],
        delta: vec![0.25],
        trials: 10,
        master_seed: 1,
        quantile: Some(QuantileSweep {
            q: vec![0.6, 0.7, 0.8, 0.9, 1.0],
        }),
        bootstrap: Some(BootstrapSweep {
            confidence: vec![60, 90, 99],
            ..BootstrapSweep::default()
        }),
        cross_validation: Some(CvSweep {
            gamma: vec![0.5, 1.25, 2.5],
            ..CvSweep::default()
        }),
        ..ExperimentConfig::default()
    };
    let rows = run_experiment(&cfg)?.rows();
    for (key, points) in curve_series(&rows) {
        println!("{}", key.method.name());
        for p in points {
            println!(
                "  {:>6} = {:<6.3} width {:.3} ± {:.3}  revenue {:.4} ± {:.4}",
                key.method.sweep_param(),
                p.sweep_value,
                p.mean_avg_width,
                p.sem_avg_width,
                p.mean_rel_revenue,
                p.sem_rel_revenue
            );
        }
    }
    let times: Vec<f64> = rows.iter().map(|r| r.time_bounds_s).collect();
    println!("mean bounds time {:.4} s", mean_and_sem(&times).0);
    Ok(())
}
