//! Baseline bounds from the empirical distribution of historical prices.
//!
//! For coverage `q` the range of item `j` runs from the `(1 − q)/2` to the
//! `(1 + q)/2` quantile of its observed prices, so `q = 1` spans the full
//! observed range and smaller `q` nest inside larger ones.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Envelope, PriceBox, PriceDemandDataset};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantileConfig {
    /// Central coverage fraction in `(0, 1]`.
    pub q: f64,
}

impl QuantileConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.q > 0.0 && self.q <= 1.0) {
            return Err(Error::Config(format!(
                "q must lie in (0, 1], got {}",
                self.q
            )));
        }
        Ok(())
    }
}

/// Quantile of sorted data with linear interpolation between order statistics.
fn interpolated_quantile(sorted: &[f64], level: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * level.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn quantile_bounds(
    data: &PriceDemandDataset,
    env: &Envelope,
    cfg: &QuantileConfig,
) -> Result<PriceBox> {
    cfg.validate()?;
    let m = data.m();
    if env.m() != m {
        return Err(Error::contract("envelope and dataset dimensions differ"));
    }
    let (lo_level, hi_level) = ((1.0 - cfg.q) / 2.0, (1.0 + cfg.q) / 2.0);
    let mut alpha = Vec::with_capacity(m);
    let mut beta = Vec::with_capacity(m);
    for j in 0..m {
        let mut prices = data.item_prices(j);
        prices.sort_by(f64::total_cmp);
        alpha.push(env.clip(j, interpolated_quantile(&prices, lo_level)));
        beta.push(env.clip(j, interpolated_quantile(&prices, hi_level)));
    }
    PriceBox::new(alpha, beta, env.clone())
}
