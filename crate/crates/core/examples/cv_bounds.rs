//! Cross-validated price ranges: search the box maximizing the K-fold
//! revenue estimate under a budget on total width.

use pricebounds::bounds::{cv_bounds_search_detailed, CvConfig, CvRevenueEstimator};
use pricebounds::model::{Envelope, PriceBox};
use pricebounds::optimizer::QpSolverConfig;
use pricebounds::synthetic::{generate_dataset, SyntheticSpec};

fn main() -> pricebounds::Result<()> {
    let (_, data) = generate_dataset(&SyntheticSpec::new(3, 300, 0.5, 5))?;
    let env = Envelope::uniform(3, 0.5, 1.1)?;

    let est = CvRevenueEstimator::new(&data, 5, &QpSolverConfig::default(), 9)?;
    let full = PriceBox::full(&env);
    println!(
        "CV revenue on the full envelope: {:.4}",
        est.estimate(full.alpha(), full.beta())?
    );

    for gamma in [0.25, 0.75, 1.5] {
        let cfg = CvConfig {
            gamma,
            ..CvConfig::default()
        };
        let r = cv_bounds_search_detailed(&data, &env, &cfg, 9)?;
        println!(
            "gamma {gamma:.2}: CV revenue {:.4}, total width {:.3}, {} evaluations, converged {}",
            r.cv_revenue,
            r.bounds.total_width(),
            r.evaluations,
            r.converged
        );
    }
    Ok(())
}
