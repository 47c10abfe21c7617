//! The noise scale is calibrated so that σ / rms(demand) hits the requested
//! level; compare the target with what the generated data realizes.

use pricebounds::synthetic::{
    calibrate_noise_sigma, generate_dataset, realized_noise_level, sample_ground_truth,
    sample_prices, SyntheticSpec,
};

fn main() -> pricebounds::Result<()> {
    for delta in [0.25, 0.5, 0.75] {
        let spec = SyntheticSpec::new(5, 1000, delta, 1);
        let sigma =
            calibrate_noise_sigma(&sample_ground_truth(&spec)?, &sample_prices(&spec)?, delta)?;
        let (_, data) = generate_dataset(&spec)?;
        println!(
            "target {delta:.2}  sigma {sigma:.3}  realized {:.4}",
            realized_noise_level(sigma, &data)
        );
    }
    Ok(())
}
