//! Cross-validated revenue estimation and the penalized bound search.
//!
//! The K-fold estimate fits one demand model on the training part and one on
//! the held-out fold, optimizes prices inside `[α, β]` with the training
//! model, and scores them with the validation model. The folds and their
//! fits depend only on the data and the seed, so they are computed once and
//! the estimate becomes a fixed deterministic function of `(α, β)`. That
//! function is searched with Nelder–Mead, with the width budget and the
//! ordering `α ≤ β` enforced through quadratic penalties.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{revenue_unchecked, CoeffMatrix, Envelope, PriceBox, PriceDemandDataset};
use crate::nelder_mead::{nm_maximize, NmConfig};
use crate::ols::fit_ols;
use crate::optimizer::{QpSolverConfig, RevenueMaximizer};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CvConfig {
    pub k_folds: usize,
    /// Budget on the summed width `Σ(β_j − α_j)`.
    pub gamma: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub nm: NmConfig,
    pub qp: QpSolverConfig,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            k_folds: 5,
            gamma: 2.5,
            lambda1: 1.0,
            lambda2: 1.0,
            nm: NmConfig::default(),
            qp: QpSolverConfig::default(),
        }
    }
}

impl CvConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_folds < 2 {
            return Err(Error::Config("k_folds must be at least 2".into()));
        }
        for (name, v) in [
            ("gamma", self.gamma),
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!(
                    "{name} must be finite and non-negative"
                )));
            }
        }
        self.nm.validate()?;
        self.qp.validate()
    }
}

/// One-sided quadratic penalty `max(x, 0)²`.
pub fn penalty(x: f64) -> f64 {
    let v = x.max(0.0);
    v * v
}

/// Splits `0..n` into `k` disjoint folds after a seeded shuffle. Fold sizes
/// differ by at most one; indices inside a fold are sorted.
pub fn fold_partition(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 || k > n {
        return Err(Error::contract(format!(
            "need 2 <= K <= n for K-fold splitting, got K = {k}, n = {n}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed::child_rng(seed, &[seed::label("folds")]));
    let (base, extra) = (n / k, n % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        let mut fold = order[start..start + len].to_vec();
        fold.sort_unstable();
        folds.push(fold);
        start += len;
    }
    Ok(folds)
}

struct Fold {
    train: RevenueMaximizer,
    valid: CoeffMatrix,
    qp_seed: u64,
}

/// Precomputed K-fold fits for repeated revenue estimates on one dataset.
pub struct CvRevenueEstimator {
    m: usize,
    folds: Vec<Fold>,
    partition: Vec<Vec<usize>>,
    qp: QpSolverConfig,
}

impl CvRevenueEstimator {
    pub fn new(
        data: &PriceDemandDataset,
        k_folds: usize,
        qp: &QpSolverConfig,
        seed: u64,
    ) -> Result<Self> {
        qp.validate()?;
        let n = data.n();
        let partition = fold_partition(n, k_folds, seed)?;
        let folds = partition
            .iter()
            .enumerate()
            .map(|(k, held_out)| {
                let mut in_fold = vec![false; n];
                held_out.iter().for_each(|&i| in_fold[i] = true);
                let train_idx: Vec<usize> = (0..n).filter(|&i| !in_fold[i]).collect();
                let train = fit_ols(&data.select(&train_idx)?)?;
                let valid = fit_ols(&data.select(held_out)?)?;
                Ok(Fold {
                    train: RevenueMaximizer::new(&train),
                    valid,
                    qp_seed: seed::derive(seed, &[seed::label("qp"), k as u64]),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            m: data.m(),
            folds,
            partition,
            qp: *qp,
        })
    }

    pub fn partition(&self) -> &[Vec<usize>] {
        &self.partition
    }

    pub fn k_folds(&self) -> usize {
        self.folds.len()
    }

    /// Average over folds of the validation-model revenue at the
    /// training-model optimum inside `[lower, upper]`.
    pub fn estimate(&self, lower: &[f64], upper: &[f64]) -> Result<f64> {
        if lower.len() != self.m || upper.len() != self.m {
            return Err(Error::contract("bounds do not match the item count"));
        }
        let revenues = self
            .folds
            .par_iter()
            .map(|fold| {
                let p = fold.train.solve(lower, upper, &self.qp, fold.qp_seed)?;
                Ok(revenue_unchecked(&fold.valid, &p))
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(revenues.iter().sum::<f64>() / revenues.len() as f64)
    }

    /// Penalized objective over the concatenated vector `(α, β)`.
    ///
    /// Items with `α_j > β_j` are collapsed to their midpoint for the inner
    /// solve, while the ordering penalty still sees the original values.
    pub fn penalized(&self, alphabeta: &[f64], gamma: f64, lambda1: f64, lambda2: f64) -> f64 {
        let m = self.m;
        if alphabeta.len() != 2 * m {
            return f64::NEG_INFINITY;
        }
        let (alpha, beta) = alphabeta.split_at(m);
        let mut lower = alpha.to_vec();
        let mut upper = beta.to_vec();
        for j in 0..m {
            if lower[j] > upper[j] {
                let mid = 0.5 * (lower[j] + upper[j]);
                lower[j] = mid;
                upper[j] = mid;
            }
        }
        let cv = match self.estimate(&lower, &upper) {
            Ok(v) if v.is_finite() => v,
            _ => return f64::NEG_INFINITY,
        };
        let total: f64 = (0..m).map(|j| beta[j] - alpha[j]).sum();
        let order: f64 = (0..m).map(|j| penalty(alpha[j] - beta[j])).sum();
        cv - lambda1 * penalty(total - gamma) - lambda2 * order
    }
}

pub fn cv_revenue_estimate(
    data: &PriceDemandDataset,
    bounds: &PriceBox,
    cfg: &CvConfig,
    seed: u64,
) -> Result<f64> {
    CvRevenueEstimator::new(data, cfg.k_folds, &cfg.qp, seed)?
        .estimate(bounds.alpha(), bounds.beta())
}

pub fn cv_penalized_objective(
    data: &PriceDemandDataset,
    alphabeta: &[f64],
    cfg: &CvConfig,
    seed: u64,
) -> Result<f64> {
    if alphabeta.len() != 2 * data.m() {
        return Err(Error::contract("alphabeta must have length 2m"));
    }
    let est = CvRevenueEstimator::new(data, cfg.k_folds, &cfg.qp, seed)?;
    Ok(est.penalized(alphabeta, cfg.gamma, cfg.lambda1, cfg.lambda2))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvSearchResult {
    /// Feasible bounds after order repair and width scaling.
    pub bounds: PriceBox,
    /// Best penalized objective found by the simplex search.
    pub objective: f64,
    /// Cross-validated revenue of the returned bounds.
    pub cv_revenue: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Shrinks every item's range about its midpoint by a common factor so the
/// summed width is at most `gamma`.
fn fit_width_budget(alpha: &mut [f64], beta: &mut [f64], gamma: f64) {
    let total: f64 = alpha.iter().zip(beta.iter()).map(|(a, b)| b - a).sum();
    if total <= gamma {
        return;
    }
    let scale = if total > 0.0 { gamma / total } else { 0.0 };
    for j in 0..alpha.len() {
        let mid = 0.5 * (alpha[j] + beta[j]);
        let half = 0.5 * (beta[j] - alpha[j]) * scale;
        alpha[j] = (mid - half).max(alpha[j]);
        beta[j] = (mid + half).min(beta[j]).max(alpha[j]);
    }
}

/// Turns a raw search point into a valid box: midpoint repair of inverted
/// items, then uniform width scaling down to the budget.
pub fn project_to_feasible(alphabeta: &[f64], env: &Envelope, gamma: f64) -> Result<PriceBox> {
    let m = env.m();
    if alphabeta.len() != 2 * m {
        return Err(Error::contract("alphabeta must have length 2m"));
    }
    let mut alpha: Vec<f64> = (0..m).map(|j| env.clip(j, alphabeta[j])).collect();
    let mut beta: Vec<f64> = (0..m).map(|j| env.clip(j, alphabeta[m + j])).collect();
    for j in 0..m {
        if alpha[j] > beta[j] {
            let mid = 0.5 * (alpha[j] + beta[j]);
            alpha[j] = mid;
            beta[j] = mid;
        }
    }
    fit_width_budget(&mut alpha, &mut beta, gamma);
    PriceBox::new(alpha, beta, env.clone())
}

/// Penalized Nelder–Mead search over `(α, β)` inside the envelope.
pub fn cv_bounds_search_detailed(
    data: &PriceDemandDataset,
    env: &Envelope,
    cfg: &CvConfig,
    seed: u64,
) -> Result<CvSearchResult> {
    cfg.validate()?;
    let m = data.m();
    if env.m() != m {
        return Err(Error::contract("envelope and dataset dimensions differ"));
    }
    let estimator = CvRevenueEstimator::new(data, cfg.k_folds, &cfg.qp, seed)?;

    let mut alpha: Vec<f64> = (0..m).map(|j| env.pmin[j] + 0.25 * env.width(j)).collect();
    let mut beta: Vec<f64> = (0..m).map(|j| env.pmax[j] - 0.25 * env.width(j)).collect();
    fit_width_budget(&mut alpha, &mut beta, cfg.gamma);
    let start: Vec<f64> = alpha.into_iter().chain(beta).collect();
    let lower: Vec<f64> = env.pmin.iter().chain(&env.pmin).copied().collect();
    let upper: Vec<f64> = env.pmax.iter().chain(&env.pmax).copied().collect();

    let outcome = nm_maximize(
        |x| estimator.penalized(x, cfg.gamma, cfg.lambda1, cfg.lambda2),
        &lower,
        &upper,
        &start,
        &cfg.nm,
        seed::derive(seed, &[seed::label("nelder_mead")]),
    )?;
    let bounds = project_to_feasible(&outcome.point, env, cfg.gamma)?;
    let cv_revenue = estimator.estimate(bounds.alpha(), bounds.beta())?;
    Ok(CvSearchResult {
        bounds,
        objective: outcome.value,
        cv_revenue,
        evaluations: outcome.evaluations,
        converged: outcome.converged,
    })
}

pub fn cv_bounds_search(
    data: &PriceDemandDataset,
    env: &Envelope,
    cfg: &CvConfig,
    seed: u64,
) -> Result<PriceBox> {
    Ok(cv_bounds_search_detailed(data, env, cfg, seed)?.bounds)
}
