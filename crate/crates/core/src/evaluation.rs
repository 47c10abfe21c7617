//! Trial metrics: relative revenue, average range width, and in-sample R².

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{demand_unchecked, eval_revenue, CoeffMatrix, PriceBox, PriceDemandDataset};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub relative_revenue: f64,
    pub average_width: f64,
    /// `NaN` where an item's demand has zero variance.
    pub per_item_r2: Vec<f64>,
    pub wall_time_bounds_s: f64,
    pub wall_time_total_s: f64,
}

/// Ground-truth revenue at `p_hat` divided by the ground-truth optimum.
pub fn relative_revenue(theta_star: &CoeffMatrix, p_hat: &[f64], p_star: &[f64]) -> Result<f64> {
    let best = eval_revenue(theta_star, p_star)?;
    if !(best > 0.0) {
        return Err(Error::NonPositiveOptimum(best));
    }
    Ok(eval_revenue(theta_star, p_hat)? / best)
}

pub fn average_width(bounds: &PriceBox) -> f64 {
    bounds.total_width() / bounds.m() as f64
}

/// `1 − SSE/SST` per item on the given data.
pub fn per_item_r2(theta_hat: &CoeffMatrix, data: &PriceDemandDataset) -> Result<Vec<f64>> {
    let (n, m) = (data.n(), data.m());
    if n < 2 {
        return Err(Error::contract("R² needs at least two instances"));
    }
    if theta_hat.m() != m {
        return Err(Error::contract("model and dataset dimensions differ"));
    }
    Ok((0..m)
        .map(|j| {
            let mean = (0..n).map(|i| data.demand(i)[j]).sum::<f64>() / n as f64;
            let (mut sse, mut sst) = (0.0, 0.0);
            for i in 0..n {
                let d = data.demand(i)[j];
                sse += (d - demand_unchecked(theta_hat, data.price(i), j)).powi(2);
                sst += (d - mean).powi(2);
            }
            if sst > 0.0 {
                1.0 - sse / sst
            } else {
                f64::NAN
            }
        })
        .collect())
}

/// Mean and standard error of the mean (sample sd / √n). The standard error
/// is `NaN` for fewer than two values.
pub fn mean_and_sem(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    // Shifted by the first value so constant inputs come out exact.
    let shift = values[0];
    let mean = shift + values.iter().map(|v| v - shift).sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties. Pairs where
/// either value is `NaN` are dropped.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (xs, ys): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(y)
        .filter(|(a, b)| !a.is_nan() && !b.is_nan())
        .map(|(a, b)| (*a, *b))
        .unzip();
    if xs.len() < 2 {
        return f64::NAN;
    }
    let (rx, ry) = (ranks(&xs), ranks(&ys));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}
