//! Bootstrap confidence intervals over optimal prices.
//!
//! Each replicate resamples the `n` instances with replacement, refits the
//! demand model, and solves the revenue problem over the whole envelope. The
//! bounds are `p̄_j ∓ κ s_j` clipped to the envelope, where `p̄_j` and `s_j`
//! are the replicate mean and sample standard deviation of item `j`'s price.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Envelope, PriceBox, PriceDemandDataset};
use crate::ols::fit_ols;
use crate::optimizer::{QpSolverConfig, RevenueMaximizer};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub n_bootstrap: usize,
    pub kappa: f64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            n_bootstrap: 100,
            kappa: 1.645,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_bootstrap < 2 {
            return Err(Error::Config("n_bootstrap must be at least 2".into()));
        }
        if !(self.kappa >= 0.0) {
            return Err(Error::Config("kappa must be non-negative".into()));
        }
        Ok(())
    }
}

/// Two-sided standard normal critical value for a confidence level given in
/// percent. `100` maps to an infinite multiplier, i.e. the full envelope.
pub fn kappa_for_confidence(percent: u32) -> Option<f64> {
    Some(match percent {
        60 => 0.841,
        65 => 0.935,
        70 => 1.036,
        75 => 1.150,
        80 => 1.282,
        85 => 1.440,
        90 => 1.645,
        95 => 1.960,
        99 => 2.576,
        100 => f64::INFINITY,
        _ => return None,
    })
}

/// Optimal prices of every bootstrap replicate with their summary statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapReplicates {
    prices: Vec<Vec<f64>>,
    mean: Vec<f64>,
    sd: Vec<f64>,
    envelope: Envelope,
}

impl BootstrapReplicates {
    pub fn prices(&self) -> &[Vec<f64>] {
        &self.prices
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Sample standard deviation with the `N − 1` divisor.
    pub fn sd(&self) -> &[f64] {
        &self.sd
    }

    /// Bounds `max(p^min, p̄ − κs)`, `min(p^max, p̄ + κs)`.
    pub fn bounds(&self, kappa: f64) -> Result<PriceBox> {
        if !(kappa >= 0.0) {
            return Err(Error::Config("kappa must be non-negative".into()));
        }
        if kappa.is_infinite() {
            return Ok(PriceBox::full(&self.envelope));
        }
        let env = &self.envelope;
        let m = self.mean.len();
        let mut alpha = Vec::with_capacity(m);
        let mut beta = Vec::with_capacity(m);
        for j in 0..m {
            let half = kappa * self.sd[j];
            // Clipping the centre keeps lo ≤ hi under rounding.
            let center = env.clip(j, self.mean[j]);
            alpha.push(env.pmin[j].max(center - half));
            beta.push(env.pmax[j].min(center + half));
        }
        PriceBox::new(alpha, beta, env.clone())
    }
}

/// Runs the replicates. Each one draws from its own seed stream, so the
/// result does not depend on how many threads evaluate them.
pub fn bootstrap_replicates(
    data: &PriceDemandDataset,
    env: &Envelope,
    n_bootstrap: usize,
    qp: &QpSolverConfig,
    seed: u64,
) -> Result<BootstrapReplicates> {
    let (n, m) = (data.n(), data.m());
    if n < 2 {
        return Err(Error::contract("bootstrap needs at least two instances"));
    }
    if env.m() != m {
        return Err(Error::contract("envelope and dataset dimensions differ"));
    }
    if n_bootstrap < 2 {
        return Err(Error::Config("n_bootstrap must be at least 2".into()));
    }
    qp.validate()?;

    let prices = (0..n_bootstrap)
        .into_par_iter()
        .map(|b| {
            let mut rng = seed::child_rng(seed, &[b as u64, 0]);
            let indices: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let theta = fit_ols(&data.select(&indices)?)?;
            RevenueMaximizer::new(&theta).solve(
                &env.pmin,
                &env.pmax,
                qp,
                seed::derive(seed, &[b as u64, 1]),
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let count = n_bootstrap as f64;
    let mean: Vec<f64> = (0..m)
        .map(|j| prices.iter().map(|p| p[j]).sum::<f64>() / count)
        .collect();
    let sd = (0..m)
        .map(|j| {
            let ss: f64 = prices.iter().map(|p| (p[j] - mean[j]).powi(2)).sum();
            (ss / (count - 1.0)).sqrt()
        })
        .collect();
    Ok(BootstrapReplicates {
        prices,
        mean,
        sd,
        envelope: env.clone(),
    })
}

pub fn bootstrap_bounds(
    data: &PriceDemandDataset,
    env: &Envelope,
    cfg: &BootstrapConfig,
    qp: &QpSolverConfig,
    seed: u64,
) -> Result<PriceBox> {
    cfg.validate()?;
    bootstrap_replicates(data, env, cfg.n_bootstrap, qp, seed)?.bounds(cfg.kappa)
}
