//! Bootstrap price ranges: refit and re-optimize on resampled data, then
//! take mean ± κ·sd of the optimal prices. One replicate set serves every κ.

use pricebounds::bounds::{bootstrap_replicates, kappa_for_confidence};
use pricebounds::model::Envelope;
use pricebounds::optimizer::QpSolverConfig;
use pricebounds::synthetic::{generate_dataset, SyntheticSpec};

fn main() -> pricebounds::Result<()> {
    let (_, data) = generate_dataset(&SyntheticSpec::new(4, 500, 0.5, 11))?;
    let env = Envelope::uniform(4, 0.5, 1.1)?;
    let reps = bootstrap_replicates(&data, &env, 100, &QpSolverConfig::default(), 3)?;

    println!("mean optimal prices {:.3?}", reps.mean());
    println!("sd of optimal prices {:.3?}", reps.sd());
    for level in [60, 90, 99, 100] {
        let kappa = kappa_for_confidence(level).expect("tabulated level");
        let b = reps.bounds(kappa)?;
        println!(
            "{level:>3}% (kappa {kappa:.3}): total width {:.4}",
            b.total_width()
        );
    }
    Ok(())
}
