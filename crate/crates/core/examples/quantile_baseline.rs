//! Central quantile ranges of historical prices, the baseline that ignores
//! the demand model entirely.

use pricebounds::bounds::{quantile_bounds, QuantileConfig};
use pricebounds::model::Envelope;
use pricebounds::synthetic::{generate_dataset, SyntheticSpec};

fn main() -> pricebounds::Result<()> {
    let (_, data) = generate_dataset(&SyntheticSpec::new(3, 300, 0.5, 7))?;
    let env = Envelope::uniform(3, 0.5, 1.1)?;
    for q in [0.6, 0.8, 0.95, 1.0] {
        let b = quantile_bounds(&data, &env, &QuantileConfig { q })?;
        let ranges: Vec<String> = (0..3)
            .map(|j| format!("[{:.3}, {:.3}]", b.alpha()[j], b.beta()[j]))
            .collect();
        println!("q = {q:.2}: {}", ranges.join(" "));
    }
    Ok(())
}
