//! Linear demand model, total revenue, and the shared domain types.
//!
//! Demand for item `j` is `θ_j0 + Σ_ℓ θ_jℓ p_ℓ` and total revenue is the sum
//! of demand times price over all items. Item indices are zero-based
//! throughout the crate; coefficient index `0` is the intercept and index
//! `ℓ + 1` is the effect of the price of item `ℓ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Demand coefficients for `m` items, stored one row of `m + 1` entries per
/// item with the intercept first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffMatrix {
    m: usize,
    entries: Vec<f64>,
}

impl CoeffMatrix {
    /// Builds a matrix from per-item rows laid out back to back:
    /// `[θ_00, θ_01, …, θ_0m, θ_10, …]`.
    pub fn new(m: usize, entries: Vec<f64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::contract(
                "coefficient matrix needs at least one item",
            ));
        }
        if entries.len() != m * (m + 1) {
            return Err(Error::contract(format!(
                "expected {} coefficients for m = {m}, got {}",
                m * (m + 1),
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::contract("coefficients must be finite"));
        }
        Ok(Self { m, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        Self::new(m, rows.iter().flatten().copied().collect())
    }

    pub fn zeros(m: usize) -> Self {
        Self {
            m,
            entries: vec![0.0; m * (m + 1)],
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Coefficient `θ_{item, ell}`; `ell = 0` is the intercept.
    #[inline]
    pub fn get(&self, item: usize, ell: usize) -> f64 {
        self.entries[item * (self.m + 1) + ell]
    }

    #[inline]
    pub fn set(&mut self, item: usize, ell: usize, value: f64) {
        self.entries[item * (self.m + 1) + ell] = value;
    }

    pub fn intercept(&self, item: usize) -> f64 {
        self.get(item, 0)
    }

    /// Price-effect coefficient of item `on` on the demand of item `item`.
    pub fn price_effect(&self, item: usize, on: usize) -> f64 {
        self.get(item, on + 1)
    }

    /// The `m + 1` coefficients of one item.
    pub fn item(&self, item: usize) -> &[f64] {
        let w = self.m + 1;
        &self.entries[item * w..(item + 1) * w]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn max_abs_diff(&self, other: &CoeffMatrix) -> f64 {
        assert_eq!(self.m, other.m, "dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn check_prices(theta: &CoeffMatrix, p: &[f64]) -> Result<()> {
    if p.len() != theta.m() {
        return Err(Error::contract(format!(
            "price vector has length {}, model has {} items",
            p.len(),
            theta.m()
        )));
    }
    Ok(())
}

#[inline]
pub(crate) fn demand_unchecked(theta: &CoeffMatrix, p: &[f64], item: usize) -> f64 {
    let row = theta.item(item);
    row[0] + row[1..].iter().zip(p).map(|(t, x)| t * x).sum::<f64>()
}

#[inline]
pub(crate) fn revenue_unchecked(theta: &CoeffMatrix, p: &[f64]) -> f64 {
    (0..theta.m())
        .map(|j| demand_unchecked(theta, p, j) * p[j])
        .sum()
}

/// Predicted demand of `item` at prices `p`. Negative demand is returned as
/// is; the model is not clamped.
pub fn eval_demand(theta: &CoeffMatrix, p: &[f64], item: usize) -> Result<f64> {
    check_prices(theta, p)?;
    if item >= theta.m() {
        return Err(Error::contract(format!(
            "item index {item} out of range for m = {}",
            theta.m()
        )));
    }
    Ok(demand_unchecked(theta, p, item))
}

/// Total revenue `Σ_j d_j(p) p_j`.
pub fn eval_revenue(theta: &CoeffMatrix, p: &[f64]) -> Result<f64> {
    check_prices(theta, p)?;
    Ok(revenue_unchecked(theta, p))
}

/// Revenue written as the quadratic `pᵀ A p + bᵀ p` with symmetric `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    m: usize,
    /// Row-major `m × m`.
    a: Vec<f64>,
    b: Vec<f64>,
}

impl QuadraticForm {
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn a(&self, row: usize, col: usize) -> f64 {
        self.a[row * self.m + col]
    }

    pub fn a_entries(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn value(&self, p: &[f64]) -> f64 {
        let m = self.m;
        let mut total = 0.0;
        for j in 0..m {
            let row = &self.a[j * m..(j + 1) * m];
            let ap: f64 = row.iter().zip(p).map(|(a, x)| a * x).sum();
            total += p[j] * (ap + self.b[j]);
        }
        total
    }

    /// Writes `2 A p + b` into `out`.
    pub fn gradient(&self, p: &[f64], out: &mut [f64]) {
        let m = self.m;
        for (j, g) in out.iter_mut().enumerate().take(m) {
            let row = &self.a[j * m..(j + 1) * m];
            let ap: f64 = row.iter().zip(p).map(|(a, x)| a * x).sum();
            *g = 2.0 * ap + self.b[j];
        }
    }
}

/// Canonical quadratic form of the revenue function:
/// `A_jℓ = (θ_jℓ + θ_ℓj) / 2`, `b_j = θ_j0`.
pub fn quadratic_coeffs(theta: &CoeffMatrix) -> QuadraticForm {
    let m = theta.m();
    let mut a = vec![0.0; m * m];
    for j in 0..m {
        for l in 0..m {
            a[j * m + l] = 0.5 * (theta.price_effect(j, l) + theta.price_effect(l, j));
        }
    }
    let b = (0..m).map(|j| theta.intercept(j)).collect();
    QuadraticForm { m, a, b }
}

/// `n` paired observations of a price vector and a demand vector.
/// Stored row-major as two flat `n × m` buffers.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceDemandDataset {
    m: usize,
    prices: Vec<f64>,
    demands: Vec<f64>,
}

impl PriceDemandDataset {
    pub fn new(m: usize, prices: Vec<f64>, demands: Vec<f64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::contract("dataset needs at least one item"));
        }
        if prices.is_empty() {
            return Err(Error::contract(
                "dataset must contain at least one instance",
            ));
        }
        if prices.len() % m != 0 || prices.len() != demands.len() {
            return Err(Error::contract(format!(
                "price buffer ({}) and demand buffer ({}) must both be n × {m}",
                prices.len(),
                demands.len()
            )));
        }
        if prices.iter().chain(&demands).any(|v| !v.is_finite()) {
            return Err(Error::contract("dataset entries must be finite"));
        }
        Ok(Self { m, prices, demands })
    }

    pub fn from_rows(rows: &[(Vec<f64>, Vec<f64>)]) -> Result<Self> {
        let m = rows.first().map(|(p, _)| p.len()).unwrap_or(0);
        if rows.iter().any(|(p, d)| p.len() != m || d.len() != m) {
            return Err(Error::contract("all rows must have the same item count"));
        }
        let prices = rows.iter().flat_map(|(p, _)| p.iter().copied()).collect();
        let demands = rows.iter().flat_map(|(_, d)| d.iter().copied()).collect();
        Self::new(m, prices, demands)
    }

    pub fn n(&self) -> usize {
        self.prices.len() / self.m
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn price(&self, i: usize) -> &[f64] {
        &self.prices[i * self.m..(i + 1) * self.m]
    }

    pub fn demand(&self, i: usize) -> &[f64] {
        &self.demands[i * self.m..(i + 1) * self.m]
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn demands(&self) -> &[f64] {
        &self.demands
    }

    /// All observed prices of one item.
    pub fn item_prices(&self, item: usize) -> Vec<f64> {
        (0..self.n())
            .map(|i| self.prices[i * self.m + item])
            .collect()
    }

    /// New dataset made of the given instances, in the given order.
    /// Indices may repeat (bootstrap resampling).
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::contract("cannot select an empty subset"));
        }
        let mut prices = Vec::with_capacity(indices.len() * self.m);
        let mut demands = Vec::with_capacity(indices.len() * self.m);
        for &i in indices {
            if i >= self.n() {
                return Err(Error::contract(format!("instance {i} out of range")));
            }
            prices.extend_from_slice(self.price(i));
            demands.extend_from_slice(self.demand(i));
        }
        Ok(Self {
            m: self.m,
            prices,
            demands,
        })
    }
}

/// Hard outer limits `p^min ≤ p ≤ p^max` on admissible prices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub pmin: Vec<f64>,
    pub pmax: Vec<f64>,
}

impl Envelope {
    pub fn new(pmin: Vec<f64>, pmax: Vec<f64>) -> Result<Self> {
        if pmin.is_empty() || pmin.len() != pmax.len() {
            return Err(Error::contract(
                "envelope bounds must be non-empty and equal length",
            ));
        }
        for (j, (lo, hi)) in pmin.iter().zip(&pmax).enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::contract("envelope bounds must be finite"));
            }
            if lo > hi {
                return Err(Error::InfeasibleBox {
                    item: j,
                    lower: *lo,
                    upper: *hi,
                });
            }
        }
        Ok(Self { pmin, pmax })
    }

    /// Same `[lo, hi]` for every item.
    pub fn uniform(m: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; m], vec![hi; m])
    }

    pub fn m(&self) -> usize {
        self.pmin.len()
    }

    pub fn width(&self, item: usize) -> f64 {
        self.pmax[item] - self.pmin[item]
    }

    pub fn clip(&self, item: usize, value: f64) -> f64 {
        value.clamp(self.pmin[item], self.pmax[item])
    }
}

/// Per-item price bounds `α ≤ β` inside an envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceBox {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    envelope: Envelope,
}

impl PriceBox {
    /// Validates `p^min ≤ α ≤ β ≤ p^max` elementwise.
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, envelope: Envelope) -> Result<Self> {
        let m = envelope.m();
        if alpha.len() != m || beta.len() != m {
            return Err(Error::contract(format!(
                "bounds must have length {m} to match the envelope"
            )));
        }
        for j in 0..m {
            let (a, b) = (alpha[j], beta[j]);
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::contract("bounds must be finite"));
            }
            if a > b {
                return Err(Error::InfeasibleBox {
                    item: j,
                    lower: a,
                    upper: b,
                });
            }
            if a < envelope.pmin[j] || b > envelope.pmax[j] {
                return Err(Error::contract(format!(
                    "item {j}: bounds [{a}, {b}] leave the envelope [{}, {}]",
                    envelope.pmin[j], envelope.pmax[j]
                )));
            }
        }
        Ok(Self {
            alpha,
            beta,
            envelope,
        })
    }

    /// The whole envelope as a box.
    pub fn full(envelope: &Envelope) -> Self {
        Self {
            alpha: envelope.pmin.clone(),
            beta: envelope.pmax.clone(),
            envelope: envelope.clone(),
        }
    }

    pub fn m(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn envelope(&self) -> &Envelope {
        &self.envelope
    }

    pub fn widths(&self) -> Vec<f64> {
        self.alpha
            .iter()
            .zip(&self.beta)
            .map(|(a, b)| b - a)
            .collect()
    }

    pub fn total_width(&self) -> f64 {
        self.widths().iter().sum()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.m()
            && p.iter()
                .zip(self.alpha.iter().zip(&self.beta))
                .all(|(x, (a, b))| a <= x && x <= b)
    }

    /// `true` when `self` lies inside `other` item by item.
    pub fn is_within(&self, other: &PriceBox) -> bool {
        (0..self.m()).all(|j| other.alpha[j] <= self.alpha[j] && self.beta[j] <= other.beta[j])
    }
}
