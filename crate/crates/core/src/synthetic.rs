//! Synthetic price–demand data with a known ground-truth model.
//!
//! Intercepts are drawn from `U(m, 3m)`, own-price effects from
//! `U(−3m, −2m)`, cross-price effects from `U(0, 3)`, and historical prices
//! from `N(0.8, 0.1²)`. Demand is the linear response plus Gaussian noise
//! whose scale is calibrated so the noise level
//! `δ = sqrt(σ² / E[d²])` matches the requested value in expectation.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{demand_unchecked, CoeffMatrix, Envelope, PriceDemandDataset};
use crate::optimizer::{maximize_revenue, QpSolverConfig};
use crate::seed;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    /// One noise draw per instance, added to every item's demand.
    #[default]
    Shared,
    /// Independent noise for every (instance, item) cell.
    Independent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub m: usize,
    pub n: usize,
    pub delta: f64,
    pub price_mean: f64,
    pub price_sd: f64,
    pub noise: NoiseMode,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn new(m: usize, n: usize, delta: f64, seed: u64) -> Self {
        Self {
            m,
            n,
            delta,
            price_mean: 0.8,
            price_sd: 0.1,
            noise: NoiseMode::Shared,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::Config("m and n must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.delta) {
            return Err(Error::Config(format!(
                "delta must lie in [0, 1), got {}",
                self.delta
            )));
        }
        if !(self.price_sd >= 0.0) || !self.price_mean.is_finite() {
            return Err(Error::Config("invalid price distribution".into()));
        }
        Ok(())
    }
}

pub fn sample_ground_truth(spec: &SyntheticSpec) -> Result<CoeffMatrix> {
    spec.validate()?;
    let m = spec.m;
    let mf = m as f64;
    let mut rng = seed::child_rng(spec.seed, &[seed::label("theta")]);
    let mut theta = CoeffMatrix::zeros(m);
    for j in 0..m {
        theta.set(j, 0, rng.random_range(mf..3.0 * mf));
        for l in 0..m {
            let v = if j == l {
                rng.random_range(-3.0 * mf..-2.0 * mf)
            } else {
                rng.random_range(0.0..3.0)
            };
            theta.set(j, l + 1, v);
        }
    }
    Ok(theta)
}

/// Historical prices, row-major `n × m`. Prices are not clipped to any envelope.
pub fn sample_prices(spec: &SyntheticSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let normal = Normal::new(spec.price_mean, spec.price_sd)
        .map_err(|e| Error::Config(format!("price distribution: {e}")))?;
    let mut rng = seed::child_rng(spec.seed, &[seed::label("prices")]);
    Ok((0..spec.n * spec.m)
        .map(|_| normal.sample(&mut rng))
        .collect())
}

/// Noise standard deviation `σ = δ·sqrt(M / (1 − δ²))`, where `M` is the
/// mean squared noise-free demand over the given prices.
pub fn calibrate_noise_sigma(theta_star: &CoeffMatrix, prices: &[f64], delta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::contract(format!(
            "delta must lie in [0, 1), got {delta}"
        )));
    }
    let m = theta_star.m();
    if prices.is_empty() || prices.len() % m != 0 {
        return Err(Error::contract("prices must be a non-empty n × m buffer"));
    }
    let mean_sq = mean_square_demand(theta_star, prices);
    Ok(noise_sigma_from_mean_square(mean_sq, delta))
}

pub(crate) fn noise_sigma_from_mean_square(mean_sq: f64, delta: f64) -> f64 {
    delta * (mean_sq / (1.0 - delta * delta)).sqrt()
}

fn mean_square_demand(theta: &CoeffMatrix, prices: &[f64]) -> f64 {
    let m = theta.m();
    let total: f64 = prices
        .chunks_exact(m)
        .map(|p| {
            (0..m)
                .map(|j| demand_unchecked(theta, p, j).powi(2))
                .sum::<f64>()
        })
        .sum();
    total / prices.len() as f64
}

/// Ground truth plus a noisy dataset drawn from it.
pub fn generate_dataset(spec: &SyntheticSpec) -> Result<(CoeffMatrix, PriceDemandDataset)> {
    let theta = sample_ground_truth(spec)?;
    let prices = sample_prices(spec)?;
    let sigma = calibrate_noise_sigma(&theta, &prices, spec.delta)?;
    let m = spec.m;
    let noise = Normal::new(0.0, sigma).map_err(|e| Error::Config(format!("noise: {e}")))?;
    let mut rng = seed::child_rng(spec.seed, &[seed::label("noise")]);
    let mut demands = Vec::with_capacity(prices.len());
    for p in prices.chunks_exact(m) {
        let shared = match spec.noise {
            NoiseMode::Shared => noise.sample(&mut rng),
            NoiseMode::Independent => 0.0,
        };
        for j in 0..m {
            let eps = match spec.noise {
                NoiseMode::Shared => shared,
                NoiseMode::Independent => noise.sample(&mut rng),
            };
            demands.push(demand_unchecked(&theta, p, j) + eps);
        }
    }
    let data = PriceDemandDataset::new(m, prices, demands)?;
    Ok((theta, data))
}

/// Noise level of a dataset for a known `σ`: `sqrt(n m σ² / Σ d²)`.
pub fn realized_noise_level(sigma: f64, data: &PriceDemandDataset) -> f64 {
    let sum_sq: f64 = data.demands().iter().map(|d| d * d).sum();
    (data.demands().len() as f64 * sigma * sigma / sum_sq).sqrt()
}

/// Revenue-maximizing prices under the ground truth over the whole envelope.
pub fn oracle_optimal_prices(
    theta_star: &CoeffMatrix,
    env: &Envelope,
    qp: &QpSolverConfig,
    seed: u64,
) -> Result<Vec<f64>> {
    maximize_revenue(theta_star, &env.pmin, &env.pmax, qp, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::eval_revenue;
    use crate::model::PriceBox;
    use crate::ols::fit_ols;
    use crate::optimizer::grid_oracle;

    #[test]
    fn coefficient_ranges() {
        for s in 0..1000 {
            let theta = sample_ground_truth(&SyntheticSpec::new(5, 1, 0.0, s)).unwrap();
            for j in 0..5 {
                assert!((5.0..=15.0).contains(&theta.intercept(j)));
                for l in 0..5 {
                    let v = theta.price_effect(j, l);
                    if j == l {
                        assert!((-15.0..=-10.0).contains(&v));
                    } else {
                        assert!((0.0..=3.0).contains(&v));
                    }
                }
            }
        }
    }

    #[test]
    fn single_item_shape_and_seed_determinism() {
        let theta = sample_ground_truth(&SyntheticSpec::new(1, 1, 0.0, 3)).unwrap();
        assert_eq!(theta.entries().len(), 2);
        let a = sample_ground_truth(&SyntheticSpec::new(4, 1, 0.0, 3)).unwrap();
        let b = sample_ground_truth(&SyntheticSpec::new(4, 1, 0.0, 3)).unwrap();
        let c = sample_ground_truth(&SyntheticSpec::new(4, 1, 0.0, 4)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn sigma_calibration() {
        let theta = CoeffMatrix::new(1, vec![2.0, -1.0]).unwrap();
        assert_eq!(
            calibrate_noise_sigma(&theta, &[0.5, 0.9], 0.0).unwrap(),
            0.0
        );
        assert!((noise_sigma_from_mean_square(3.0, 0.5) - 1.0).abs() < 1e-15);
        assert!(calibrate_noise_sigma(&theta, &[0.5], 1.0).is_err());
    }

    #[test]
    fn realized_noise_level_matches_target() {
        let spec = SyntheticSpec::new(5, 1000, 0.25, 17);
        let theta = sample_ground_truth(&spec).unwrap();
        let prices = sample_prices(&spec).unwrap();
        let sigma = calibrate_noise_sigma(&theta, &prices, spec.delta).unwrap();
        let (_, data) = generate_dataset(&spec).unwrap();
        let realized = realized_noise_level(sigma, &data);
        assert!((realized - 0.25).abs() / 0.25 <= 0.05, "{realized}");
    }

    #[test]
    fn noise_free_round_trip() {
        let (theta, data) = generate_dataset(&SyntheticSpec::new(4, 40, 0.0, 21)).unwrap();
        assert!(fit_ols(&data).unwrap().max_abs_diff(&theta) <= 1e-8);
    }

    #[test]
    fn price_moments() {
        let prices = sample_prices(&SyntheticSpec::new(1, 100_000, 0.0, 5)).unwrap();
        let n = prices.len() as f64;
        let mean = prices.iter().sum::<f64>() / n;
        let sd = (prices.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!((mean - 0.8).abs() <= 0.002);
        assert!((sd - 0.1).abs() <= 0.002);
    }

    #[test]
    fn noise_is_shared_across_items() {
        let (theta, data) = generate_dataset(&SyntheticSpec::new(3, 50, 0.5, 8)).unwrap();
        for i in 0..data.n() {
            let r: Vec<f64> = (0..3)
                .map(|j| data.demand(i)[j] - demand_unchecked(&theta, data.price(i), j))
                .collect();
            assert!(r
                .iter()
                .all(|x| (x - r[0]).abs() <= 1e-12 * (1.0 + r[0].abs())));
        }
        let mut spec = SyntheticSpec::new(3, 50, 0.5, 8);
        spec.noise = NoiseMode::Independent;
        let (theta, data) = generate_dataset(&spec).unwrap();
        let r0 = data.demand(0)[0] - demand_unchecked(&theta, data.price(0), 0);
        let r1 = data.demand(0)[1] - demand_unchecked(&theta, data.price(0), 1);
        assert!((r0 - r1).abs() > 1e-9);
    }

    #[test]
    fn oracle_prices() {
        let qp = QpSolverConfig::default();
        let theta = CoeffMatrix::new(1, vec![2.0, -1.0]).unwrap();
        let env = Envelope::uniform(1, 0.5, 1.1).unwrap();
        let p = oracle_optimal_prices(&theta, &env, &qp, 0).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-8);

        let theta = sample_ground_truth(&SyntheticSpec::new(2, 1, 0.0, 12)).unwrap();
        let env = Envelope::uniform(2, 0.5, 1.1).unwrap();
        let p = oracle_optimal_prices(&theta, &env, &qp, 0).unwrap();
        let g = grid_oracle(&theta, &PriceBox::full(&env), 1e-3).unwrap();
        let (rp, rg) = (
            eval_revenue(&theta, &p).unwrap(),
            eval_revenue(&theta, &g).unwrap(),
        );
        assert!(rp >= rg - 1e-3);

        let point = Envelope::uniform(2, 0.7, 0.7).unwrap();
        assert_eq!(
            oracle_optimal_prices(&theta, &point, &qp, 0).unwrap(),
            vec![0.7, 0.7]
        );
    }
}
