//! Ordinary least squares for the per-item linear demand model.
//!
//! All items share the design matrix `[1, p_i1, …, p_im]`, so a single SVD
//! of the design solves every item at once. Small singular values are
//! truncated, which yields the minimum-norm solution when the design is
//! rank-deficient (bootstrap resamples and small folds can be).

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{CoeffMatrix, PriceDemandDataset};

pub fn fit_ols(data: &PriceDemandDataset) -> Result<CoeffMatrix> {
    let (n, m) = (data.n(), data.m());
    if n == 0 {
        return Err(Error::contract("cannot fit an empty dataset"));
    }
    if data
        .prices()
        .iter()
        .chain(data.demands())
        .any(|v| !v.is_finite())
    {
        return Err(Error::contract("dataset contains non-finite values"));
    }
    let p = m + 1;
    let design = DMatrix::from_fn(n, p, |i, c| if c == 0 { 1.0 } else { data.price(i)[c - 1] });
    let response = DMatrix::from_fn(n, m, |i, j| data.demand(i)[j]);

    let svd = design.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    let eps = sigma_max * (n.max(p) as f64) * f64::EPSILON;
    let solve = |rhs: &DMatrix<f64>| {
        svd.solve(rhs, eps)
            .map_err(|e| Error::contract(format!("least-squares solve failed: {e}")))
    };
    let mut solution = solve(&response)?;
    // Refinement against the residual recovers the digits the bidiagonal
    // iteration leaves behind. Corrections stay in the row space, so the
    // minimum-norm property is kept.
    for _ in 0..2 {
        let residual = &response - &design * &solution;
        solution += solve(&residual)?;
    }

    // solution is p × m: column j holds the coefficients of item j.
    let entries = (0..m)
        .flat_map(|j| (0..p).map(move |c| (j, c)))
        .map(|(j, c)| solution[(c, j)])
        .collect();
    CoeffMatrix::new(m, entries)
}
