//! Fit a demand model to synthetic history, estimate price ranges with all
//! three methods and score each against the known ground truth.

use pricebounds::bounds::{
    bootstrap_bounds, cv_bounds_search, quantile_bounds, BootstrapConfig, CvConfig, QuantileConfig,
};
use pricebounds::evaluation::{average_width, relative_revenue};
use pricebounds::model::{Envelope, PriceBox};
use pricebounds::ols::fit_ols;
use pricebounds::optimizer::{maximize_revenue_boxed, QpSolverConfig};
use pricebounds::synthetic::{generate_dataset, oracle_optimal_prices, SyntheticSpec};

fn main() -> pricebounds::Result<()> {
    let spec = SyntheticSpec::new(5, 1000, 0.25, 42);
    let (truth, data) = generate_dataset(&spec)?;
    let env = Envelope::uniform(5, 0.5, 1.1)?;
    let qp = QpSolverConfig::default();

    let p_star = oracle_optimal_prices(&truth, &env, &qp, 0)?;
    let fitted = fit_ols(&data)?;

    let boxes: Vec<(&str, PriceBox)> = vec![
        ("full envelope", PriceBox::full(&env)),
        (
            "quantile q=0.8",
            quantile_bounds(&data, &env, &QuantileConfig { q: 0.8 })?,
        ),
        (
            "bootstrap kappa=1.645",
            bootstrap_bounds(&data, &env, &BootstrapConfig::default(), &qp, 1)?,
        ),
        (
            "cross-validation gamma=1.25",
            cv_bounds_search(
                &data,
                &env,
                &CvConfig {
                    gamma: 1.25,
                    ..CvConfig::default()
                },
                2,
            )?,
        ),
    ];

    println!("{:<28} {:>10} {:>12}", "bounds", "avg width", "rel revenue");
    for (name, bounds) in &boxes {
        let p_hat = maximize_revenue_boxed(&fitted, bounds, &qp, 0)?;
        println!(
            "{name:<28} {:>10.4} {:>12.5}",
            average_width(bounds),
            relative_revenue(&truth, &p_hat, &p_star)?
        );
    }
    Ok(())
}
