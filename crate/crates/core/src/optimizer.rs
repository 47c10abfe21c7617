//! Box-constrained revenue maximization.
//!
//! Revenue is a quadratic `pᵀAp + bᵀp`; with realistic coefficients `A` is
//! negative definite and the problem is concave. The solver runs projected
//! gradient ascent with a backtracking step from several starting points and
//! keeps the best stationary point. When a Cholesky factorization proves `-A`
//! positive definite the maximizer is unique and a single start is enough.
//!
//! [`grid_oracle`] is an exhaustive grid search used only to check the solver.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{quadratic_coeffs, CoeffMatrix, PriceBox, QuadraticForm};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QpSolverConfig {
    /// Number of starting points tried when the objective is not provably concave.
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop once the projected gradient step `‖P(p + ∇f) − p‖∞` is below this.
    pub step_tol: f64,
    /// A later restart replaces the incumbent only if it beats it by more than this.
    pub value_tol: f64,
}

impl Default for QpSolverConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_iters: 500,
            step_tol: 1e-8,
            value_tol: 1e-9,
        }
    }
}

impl QpSolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::Config(
                "restarts and max_iters must be positive".into(),
            ));
        }
        if !(self.step_tol > 0.0 && self.step_tol.is_finite())
            || !(self.value_tol > 0.0 && self.value_tol.is_finite())
        {
            return Err(Error::Config(
                "solver tolerances must be positive and finite".into(),
            ));
        }
        Ok(())
    }
}

/// A revenue model prepared for repeated solves over different boxes.
#[derive(Debug, Clone)]
pub struct RevenueMaximizer {
    form: QuadraticForm,
    concave: bool,
    lipschitz: f64,
}

impl RevenueMaximizer {
    pub fn new(theta: &CoeffMatrix) -> Self {
        let form = quadratic_coeffs(theta);
        let m = form.m();
        let neg = DMatrix::from_fn(m, m, |r, c| -form.a(r, c));
        let concave = neg.cholesky().is_some();
        // Gershgorin bound on the spectral radius of the Hessian 2A.
        let lipschitz = (0..m)
            .map(|r| 2.0 * (0..m).map(|c| form.a(r, c).abs()).sum::<f64>())
            .fold(0.0, f64::max);
        Self {
            form,
            concave,
            lipschitz,
        }
    }

    pub fn is_concave(&self) -> bool {
        self.concave
    }

    pub fn revenue(&self, p: &[f64]) -> f64 {
        self.form.value(p)
    }

    pub fn solve(
        &self,
        lower: &[f64],
        upper: &[f64],
        cfg: &QpSolverConfig,
        seed: u64,
    ) -> Result<Vec<f64>> {
        let m = self.form.m();
        if lower.len() != m || upper.len() != m {
            return Err(Error::contract(format!("box must have {m} coordinates")));
        }
        for j in 0..m {
            if !(lower[j] <= upper[j]) {
                return Err(Error::InfeasibleBox {
                    item: j,
                    lower: lower[j],
                    upper: upper[j],
                });
            }
        }

        let starts = if self.concave { 1 } else { cfg.restarts };
        let mut best: Option<(Vec<f64>, f64)> = None;
        for r in 0..starts {
            let start = start_point(r, lower, upper, seed);
            let (p, value) = self.ascend(start, lower, upper, cfg);
            match &best {
                Some((_, incumbent)) if value <= incumbent + cfg.value_tol => {}
                _ => best = Some((p, value)),
            }
        }
        Ok(best.map(|(p, _)| p).unwrap_or_else(|| lower.to_vec()))
    }

    fn ascend(
        &self,
        mut p: Vec<f64>,
        lower: &[f64],
        upper: &[f64],
        cfg: &QpSolverConfig,
    ) -> (Vec<f64>, f64) {
        let m = p.len();
        let base_step = if self.lipschitz > 0.0 {
            1.0 / self.lipschitz
        } else {
            1.0
        };
        let mut step = base_step;
        let mut grad = vec![0.0; m];
        let mut trial = vec![0.0; m];
        let mut value = self.form.value(&p);
        self.form.gradient(&p, &mut grad);

        for _ in 0..cfg.max_iters {
            let stationarity = (0..m)
                .map(|k| ((p[k] + grad[k]).clamp(lower[k], upper[k]) - p[k]).abs())
                .fold(0.0, f64::max);
            if stationarity <= cfg.step_tol {
                break;
            }
            let mut accepted = false;
            while step > 1e-16 * base_step {
                for k in 0..m {
                    trial[k] = (p[k] + step * grad[k]).clamp(lower[k], upper[k]);
                }
                let trial_value = self.form.value(&trial);
                let (mut lin, mut sq) = (0.0, 0.0);
                for k in 0..m {
                    let d = trial[k] - p[k];
                    lin += grad[k] * d;
                    sq += d * d;
                }
                if trial_value >= value + lin - sq / (2.0 * step) {
                    accepted = true;
                    std::mem::swap(&mut p, &mut trial);
                    value = trial_value;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
            self.form.gradient(&p, &mut grad);
            step = (step * 2.0).min(8.0 * base_step);
        }
        (p, value)
    }
}

fn start_point(restart: usize, lower: &[f64], upper: &[f64], seed: u64) -> Vec<f64> {
    let m = lower.len();
    match restart {
        0 => (0..m).map(|k| 0.5 * (lower[k] + upper[k])).collect(),
        1 => lower.to_vec(),
        2 => upper.to_vec(),
        3 => (0..m)
            .map(|k| if k % 2 == 0 { lower[k] } else { upper[k] })
            .collect(),
        4 => (0..m)
            .map(|k| if k % 2 == 0 { upper[k] } else { lower[k] })
            .collect(),
        r => {
            let mut rng = seed::child_rng(seed, &[r as u64]);
            (0..m)
                .map(|k| lower[k] + rng.random::<f64>() * (upper[k] - lower[k]))
                .collect()
        }
    }
}

/// Maximizes revenue under `theta` over `[lower, upper]`.
pub fn maximize_revenue(
    theta: &CoeffMatrix,
    lower: &[f64],
    upper: &[f64],
    cfg: &QpSolverConfig,
    seed: u64,
) -> Result<Vec<f64>> {
    RevenueMaximizer::new(theta).solve(lower, upper, cfg, seed)
}

/// Maximizes revenue under `theta` over the `[α, β]` bounds of a box.
pub fn maximize_revenue_boxed(
    theta: &CoeffMatrix,
    bounds: &PriceBox,
    cfg: &QpSolverConfig,
    seed: u64,
) -> Result<Vec<f64>> {
    maximize_revenue(theta, bounds.alpha(), bounds.beta(), cfg, seed)
}

pub const GRID_ORACLE_MAX_ITEMS: usize = 4;

/// Best point of the axis-aligned grid with spacing `resolution` over
/// `[α, β]`, endpoints included on every axis.
pub fn grid_oracle(theta: &CoeffMatrix, bounds: &PriceBox, resolution: f64) -> Result<Vec<f64>> {
    let m = theta.m();
    if m > GRID_ORACLE_MAX_ITEMS {
        return Err(Error::GridTooLarge {
            m,
            limit: GRID_ORACLE_MAX_ITEMS,
        });
    }
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::contract("grid resolution must be positive"));
    }
    if bounds.m() != m {
        return Err(Error::contract("box and model dimensions differ"));
    }
    let axes: Vec<Vec<f64>> = (0..m)
        .map(|k| axis_points(bounds.alpha()[k], bounds.beta()[k], resolution))
        .collect();
    let form = quadratic_coeffs(theta);
    let last = m - 1;
    let a_last = form.a(last, last);

    let mut idx = vec![0usize; last];
    let mut point: Vec<f64> = axes.iter().map(|a| a[0]).collect();
    let mut best = (point.clone(), f64::NEG_INFINITY);
    loop {
        for k in 0..last {
            point[k] = axes[k][idx[k]];
        }
        // f restricted to the last axis is a_last·x² + slope·x + constant.
        let mut constant = 0.0;
        let mut slope = form.b()[last];
        for r in 0..last {
            let mut row = form.b()[r];
            for c in 0..last {
                row += form.a(r, c) * point[c];
            }
            constant += point[r] * row;
            slope += 2.0 * form.a(r, last) * point[r];
        }
        for &x in &axes[last] {
            let value = constant + x * (slope + a_last * x);
            if value > best.1 {
                point[last] = x;
                best = (point.clone(), value);
            }
        }
        // odometer over the leading axes
        let mut k = 0;
        loop {
            if k == last {
                return Ok(best.0);
            }
            idx[k] += 1;
            if idx[k] < axes[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn axis_points(lo: f64, hi: f64, resolution: f64) -> Vec<f64> {
    let steps = ((hi - lo) / resolution + 1e-9).floor() as usize;
    let mut pts: Vec<f64> = (0..=steps).map(|i| lo + i as f64 * resolution).collect();
    if let Some(end) = pts.last_mut() {
        if *end > hi {
            *end = hi;
        }
    }
    if pts.last().is_some_and(|&x| x < hi - 1e-12) {
        pts.push(hi);
    }
    pts
}
