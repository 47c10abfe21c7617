//! One seeded trial: generate data, compute the oracle optimum, then score
//! every method and sweep value against the ground truth.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, GridPoint, Method};
use crate::bounds::{
    bootstrap_replicates, cv_bounds_search, quantile_bounds, CvConfig, QuantileConfig,
};
use crate::error::{Error, Result};
use crate::evaluation::{average_width, per_item_r2};
use crate::model::{eval_revenue, CoeffMatrix, Envelope, PriceBox, PriceDemandDataset};
use crate::ols::fit_ols;
use crate::optimizer::RevenueMaximizer;
use crate::seed;
use crate::synthetic::{generate_dataset, oracle_optimal_prices, SyntheticSpec};

/// Floats as 17-digit text, so NaN and infinities survive JSON and every
/// value reads back bit for bit.
mod exact {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::harness::output::fmt_float;

    fn parse<E: serde::de::Error>(s: &str) -> Result<f64, E> {
        s.parse()
            .map_err(|_| E::custom(format!("not a number: {s:?}")))
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_float(*x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        parse(&String::deserialize(d)?)
    }

    pub mod vec {
        use serde::ser::SerializeSeq;
        use serde::{Deserialize, Deserializer, Serializer};

        use crate::harness::output::fmt_float;

        pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&fmt_float(*x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|s| super::parse(s))
                .collect()
        }
    }
}

/// One line of the results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub m: usize,
    pub n: usize,
    #[serde(with = "exact")]
    pub delta: f64,
    pub method: Method,
    #[serde(with = "exact")]
    pub sweep_value: f64,
    pub trial: usize,
    pub seed: u64,
    #[serde(with = "exact")]
    pub rel_revenue: f64,
    #[serde(with = "exact")]
    pub avg_width: f64,
    #[serde(with = "exact")]
    pub time_bounds_s: f64,
    #[serde(with = "exact::vec")]
    pub r2: Vec<f64>,
    /// Per-item range widths; written to the scatter file only.
    #[serde(default, with = "exact::vec")]
    pub widths: Vec<f64>,
}

/// Everything that one trial produced, including why it produced no rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub grid_index: usize,
    pub point: GridPoint,
    pub trial: usize,
    pub seed: u64,
    pub rows: Vec<ResultRow>,
    /// Ground-truth optimum was not positive; no rows recorded.
    pub flagged: bool,
    pub error: Option<String>,
}

/// Seed of a trial, a pure function of the master seed and trial coordinates.
pub fn trial_seed(master_seed: u64, point: &GridPoint, trial: usize) -> u64 {
    seed::derive(
        master_seed,
        &[
            point.m as u64,
            point.n as u64,
            point.delta.to_bits(),
            trial as u64,
        ],
    )
}

pub fn method_seed(trial_seed: u64, method: Method) -> u64 {
    seed::derive(trial_seed, &[seed::label(method.name())])
}

/// Data and shared quantities of one trial.
pub struct TrialContext<'a> {
    cfg: &'a ExperimentConfig,
    point: GridPoint,
    trial: usize,
    seed: u64,
    envelope: Envelope,
    theta_star: CoeffMatrix,
    data: PriceDemandDataset,
    best_revenue: f64,
    inner: RevenueMaximizer,
    r2: Vec<f64>,
}

impl<'a> TrialContext<'a> {
    pub fn new(cfg: &'a ExperimentConfig, point: GridPoint, trial: usize) -> Result<Self> {
        let seed = trial_seed(cfg.master_seed, &point, trial);
        let mut spec = SyntheticSpec::new(point.m, point.n, point.delta, seed);
        spec.noise = cfg.noise;
        let (theta_star, data) = generate_dataset(&spec)?;
        let envelope = cfg.envelope.for_items(point.m)?;
        let p_star = oracle_optimal_prices(
            &theta_star,
            &envelope,
            &cfg.qp,
            seed::derive(seed, &[seed::label("oracle")]),
        )?;
        let best_revenue = eval_revenue(&theta_star, &p_star)?;
        let theta_hat = fit_ols(&data)?;
        let r2 = per_item_r2(&theta_hat, &data)?;
        Ok(Self {
            cfg,
            point,
            trial,
            seed,
            envelope,
            theta_star,
            data,
            best_revenue,
            inner: RevenueMaximizer::new(&theta_hat),
            r2,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn data(&self) -> &PriceDemandDataset {
        &self.data
    }

    pub fn theta_star(&self) -> &CoeffMatrix {
        &self.theta_star
    }

    /// Ground-truth revenue of the oracle prices.
    pub fn best_revenue(&self) -> f64 {
        self.best_revenue
    }

    pub fn is_flagged(&self) -> bool {
        !(self.best_revenue > 0.0)
    }

    /// Solves the full-data inner problem on `bounds` and scores it.
    fn score(
        &self,
        method: Method,
        sweep_value: f64,
        bounds: &PriceBox,
        started: Instant,
    ) -> Result<ResultRow> {
        if self.is_flagged() {
            return Err(Error::NonPositiveOptimum(self.best_revenue));
        }
        let p_hat = self.inner.solve(
            bounds.alpha(),
            bounds.beta(),
            &self.cfg.qp,
            seed::derive(self.seed, &[seed::label("inner")]),
        )?;
        let elapsed = started.elapsed().as_secs_f64();
        Ok(ResultRow {
            m: self.point.m,
            n: self.point.n,
            delta: self.point.delta,
            method,
            sweep_value,
            trial: self.trial,
            seed: self.seed,
            rel_revenue: eval_revenue(&self.theta_star, &p_hat)? / self.best_revenue,
            avg_width: average_width(bounds),
            time_bounds_s: if self.cfg.record_timing { elapsed } else { 0.0 },
            r2: self.r2.clone(),
            widths: bounds.widths(),
        })
    }

    pub fn quantile_rows(&self, qs: &[f64]) -> Result<Vec<ResultRow>> {
        qs.iter()
            .map(|&q| {
                let started = Instant::now();
                let bounds = quantile_bounds(&self.data, &self.envelope, &QuantileConfig { q })?;
                self.score(Method::Quantile, q, &bounds, started)
            })
            .collect()
    }

    /// The replicate set is shared by every `κ`, so its cost is added to
    /// each row's time.
    pub fn bootstrap_rows(&self, kappas: &[f64]) -> Result<Vec<ResultRow>> {
        let sweep = self
            .cfg
            .bootstrap
            .as_ref()
            .ok_or_else(|| Error::Config("bootstrap not configured".into()))?;
        let started = Instant::now();
        let replicates = bootstrap_replicates(
            &self.data,
            &self.envelope,
            sweep.n_bootstrap,
            &self.cfg.qp,
            method_seed(self.seed, Method::Bootstrap),
        )?;
        let shared = started.elapsed();
        kappas
            .iter()
            .map(|&kappa| {
                let own = Instant::now();
                let bounds = replicates.bounds(kappa)?;
                let mut row = self.score(Method::Bootstrap, kappa, &bounds, own)?;
                if self.cfg.record_timing {
                    row.time_bounds_s += shared.as_secs_f64();
                }
                Ok(row)
            })
            .collect()
    }

    pub fn cv_rows(&self, gammas: &[f64]) -> Result<Vec<ResultRow>> {
        let sweep = self
            .cfg
            .cross_validation
            .as_ref()
            .ok_or_else(|| Error::Config("cross-validation not configured".into()))?;
        gammas
            .iter()
            .map(|&gamma| {
                let started = Instant::now();
                let cv = CvConfig {
                    k_folds: sweep.k_folds,
                    gamma,
                    lambda1: sweep.lambda1,
                    lambda2: sweep.lambda2,
                    nm: sweep.nm,
                    qp: self.cfg.qp,
                };
                let bounds = cv_bounds_search(
                    &self.data,
                    &self.envelope,
                    &cv,
                    method_seed(self.seed, Method::CrossValidation),
                )?;
                self.score(Method::CrossValidation, gamma, &bounds, started)
            })
            .collect()
    }

    pub fn rows(&self, method: Method, sweep: &[f64]) -> Result<Vec<ResultRow>> {
        match method {
            Method::Quantile => self.quantile_rows(sweep),
            Method::Bootstrap => self.bootstrap_rows(sweep),
            Method::CrossValidation => self.cv_rows(sweep),
        }
    }
}

pub fn run_trial(
    cfg: &ExperimentConfig,
    grid_index: usize,
    point: GridPoint,
    trial: usize,
) -> TrialRecord {
    let seed = trial_seed(cfg.master_seed, &point, trial);
    let mut record = TrialRecord {
        grid_index,
        point,
        trial,
        seed,
        rows: Vec::new(),
        flagged: false,
        error: None,
    };
    let outcome = TrialContext::new(cfg, point, trial).and_then(|ctx| {
        if ctx.is_flagged() {
            return Err(Error::NonPositiveOptimum(ctx.best_revenue()));
        }
        let mut rows = Vec::new();
        for method in cfg.methods() {
            rows.extend(ctx.rows(method, &cfg.sweep(method))?);
        }
        Ok(rows)
    });
    match outcome {
        Ok(rows) => record.rows = rows,
        Err(Error::NonPositiveOptimum(v)) => {
            log::warn!(
                "trial {trial} at m={} n={} delta={} (seed {seed}) flagged: optimum revenue {v}",
                point.m,
                point.n,
                point.delta
            );
            record.flagged = true;
        }
        Err(e) => {
            log::error!(
                "trial {trial} at m={} n={} delta={} (seed {seed}) failed: {e}",
                point.m,
                point.n,
                point.delta
            );
            record.error = Some(e.to_string());
        }
    }
    record
}
