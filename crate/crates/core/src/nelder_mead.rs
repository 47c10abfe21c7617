//! Nelder–Mead simplex search for maximizing a black-box function over a box.
//!
//! Every candidate vertex is clipped into `[lower, upper]` before it is
//! evaluated. Non-finite objective values rank as the worst possible value.
//! The search stops when both the simplex diameter (∞-norm, around the best
//! vertex) is at most `x_tol` and the spread of vertex values is at most
//! `f_tol`, or when the evaluation budget runs out.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NmConfig {
    /// Evaluation budget; `None` means `400 · d`.
    pub max_evals: Option<usize>,
    pub x_tol: f64,
    pub f_tol: f64,
    /// Initial simplex edge as a fraction of the box width on each axis.
    pub init_step: f64,
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
}

impl Default for NmConfig {
    fn default() -> Self {
        Self {
            max_evals: None,
            x_tol: 1e-4,
            f_tol: 1e-6,
            init_step: 0.1,
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
        }
    }
}

impl NmConfig {
    pub fn budget(&self, dim: usize) -> usize {
        self.max_evals.unwrap_or(400 * dim)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if self.max_evals == Some(0) {
            return Err(Error::Config("max_evals must be positive".into()));
        }
        if ![self.x_tol, self.f_tol, self.init_step]
            .into_iter()
            .all(positive)
        {
            return Err(Error::Config(
                "NM tolerances and init_step must be positive".into(),
            ));
        }
        if ![
            self.reflection,
            self.expansion,
            self.contraction,
            self.shrink,
        ]
        .into_iter()
        .all(positive)
        {
            return Err(Error::Config("NM coefficients must be positive".into()));
        }
        if self.expansion <= self.reflection {
            return Err(Error::Config("expansion must exceed reflection".into()));
        }
        if self.contraction >= 1.0 || self.shrink >= 1.0 {
            return Err(Error::Config(
                "contraction and shrink must be below 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NmOutcome {
    pub point: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
    /// Best value seen so far, recorded once per iteration.
    pub trace: Vec<f64>,
}

struct Search<'a, F> {
    objective: F,
    lower: &'a [f64],
    upper: &'a [f64],
    budget: usize,
    evaluations: usize,
    best: Option<(Vec<f64>, f64)>,
}

impl<F: FnMut(&[f64]) -> f64> Search<'_, F> {
    /// Evaluates a clipped point and returns the value to minimize, or
    /// `None` when the budget is spent.
    fn cost(&mut self, x: &[f64]) -> Option<f64> {
        if self.evaluations >= self.budget {
            return None;
        }
        self.evaluations += 1;
        let raw = (self.objective)(x);
        let value = if raw.is_finite() {
            raw
        } else {
            f64::NEG_INFINITY
        };
        if self.best.as_ref().is_none_or(|(_, b)| value > *b) {
            self.best = Some((x.to_vec(), value));
        }
        Some(-value)
    }

    fn clip(&self, x: &mut [f64]) -> bool {
        let mut clipped = false;
        for (k, v) in x.iter_mut().enumerate() {
            let c = v.clamp(self.lower[k], self.upper[k]);
            if c != *v {
                clipped = true;
                *v = c;
            }
        }
        clipped
    }
}

/// Maximizes `objective` over `[lower, upper]` starting from `start`.
pub fn nm_maximize<F>(
    objective: F,
    lower: &[f64],
    upper: &[f64],
    start: &[f64],
    cfg: &NmConfig,
    seed: u64,
) -> Result<NmOutcome>
where
    F: FnMut(&[f64]) -> f64,
{
    cfg.validate()?;
    let d = start.len();
    if d == 0 || lower.len() != d || upper.len() != d {
        return Err(Error::contract(
            "start, lower and upper must share a positive dimension",
        ));
    }
    for k in 0..d {
        if !(lower[k] <= start[k] && start[k] <= upper[k]) {
            return Err(Error::contract(format!(
                "start coordinate {k} = {} lies outside [{}, {}]",
                start[k], lower[k], upper[k]
            )));
        }
    }

    let mut rng = seed::rng(seed);
    let mut search = Search {
        objective,
        lower,
        upper,
        budget: cfg.budget(d),
        evaluations: 0,
        best: None,
    };
    let widths: Vec<f64> = (0..d).map(|k| upper[k] - lower[k]).collect();

    let mut points = vec![start.to_vec()];
    for k in 0..d {
        let mut v = start.to_vec();
        let step = cfg.init_step * widths[k];
        v[k] = if v[k] + step <= upper[k] {
            v[k] + step
        } else {
            v[k] - step
        };
        search.clip(&mut v);
        points.push(v);
    }
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    for p in points {
        match search.cost(&p) {
            Some(c) => simplex.push((p, c)),
            None => return Ok(finish(search, 0, false, Vec::new())),
        }
    }
    let max_repairs = 2 * d;
    let mut repairs = 0;
    if is_degenerate(&simplex, &widths) {
        for idx in 1..=d {
            if !repair(&mut search, &mut simplex, idx, &widths, &mut rng) {
                return Ok(finish(search, 0, false, Vec::new()));
            }
        }
    }

    let (rho, chi, psi, sigma) = (cfg.reflection, cfg.expansion, cfg.contraction, cfg.shrink);
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let mut centroid = vec![0.0; d];

    'outer: loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        trace.push(search.best.as_ref().map_or(f64::NEG_INFINITY, |b| b.1));

        let (x0, f0) = (&simplex[0].0, simplex[0].1);
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(x0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let spread = simplex[1..]
            .iter()
            .map(|(_, f)| if *f == f0 { 0.0 } else { (f - f0).abs() })
            .fold(0.0, f64::max);
        if diameter <= cfg.x_tol && spread <= cfg.f_tol {
            converged = true;
            break;
        }
        if search.evaluations >= search.budget {
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for (x, _) in &simplex[..d] {
            for k in 0..d {
                centroid[k] += x[k] / d as f64;
            }
        }
        let worst = simplex[d].clone();
        let toward = |coef: f64| -> Vec<f64> {
            (0..d)
                .map(|k| centroid[k] + coef * (centroid[k] - worst.0[k]))
                .collect()
        };

        let mut xr = toward(rho);
        let clipped_r = search.clip(&mut xr);
        let Some(fr) = search.cost(&xr) else { break };

        let mut accepted: Option<(Vec<f64>, f64, bool)> = None;
        if fr < simplex[0].1 {
            let mut xe = toward(rho * chi);
            let clipped_e = search.clip(&mut xe);
            let Some(fe) = search.cost(&xe) else { break };
            accepted = Some(if fe < fr {
                (xe, fe, clipped_e)
            } else {
                (xr, fr, clipped_r)
            });
        } else if fr < simplex[d - 1].1 {
            accepted = Some((xr, fr, clipped_r));
        } else {
            let outside = fr < worst.1;
            let mut xc = if outside {
                toward(psi * rho)
            } else {
                toward(-psi)
            };
            let clipped_c = search.clip(&mut xc);
            let Some(fc) = search.cost(&xc) else { break };
            let threshold = if outside { fr } else { worst.1 };
            if (outside && fc <= threshold) || (!outside && fc < threshold) {
                accepted = Some((xc, fc, clipped_c));
            }
        }

        match accepted {
            Some((x, f, clipped)) => {
                simplex[d] = (x, f);
                if clipped && repairs < max_repairs && is_degenerate(&simplex, &widths) {
                    repairs += 1;
                    if !repair(&mut search, &mut simplex, d, &widths, &mut rng) {
                        break;
                    }
                }
            }
            None => {
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let mut x: Vec<f64> = (0..d)
                        .map(|k| best[k] + sigma * (vertex.0[k] - best[k]))
                        .collect();
                    search.clip(&mut x);
                    let Some(f) = search.cost(&x) else {
                        break 'outer;
                    };
                    *vertex = (x, f);
                }
            }
        }
    }

    Ok(finish(search, iterations, converged, trace))
}

fn finish<F>(
    search: Search<'_, F>,
    iterations: usize,
    converged: bool,
    trace: Vec<f64>,
) -> NmOutcome {
    let (point, value) = search
        .best
        .unwrap_or_else(|| (search.lower.to_vec(), f64::NEG_INFINITY));
    NmOutcome {
        point,
        value,
        evaluations: search.evaluations,
        iterations,
        converged,
        trace,
    }
}

/// Whether the simplex has collapsed into a lower-dimensional affine set
/// along the axes that have room to move.
fn is_degenerate(simplex: &[(Vec<f64>, f64)], widths: &[f64]) -> bool {
    let active: Vec<usize> = (0..widths.len()).filter(|&k| widths[k] > 0.0).collect();
    if active.is_empty() {
        return false;
    }
    let base = &simplex[0].0;
    let edges = DMatrix::from_fn(active.len(), simplex.len() - 1, |r, c| {
        let k = active[r];
        (simplex[c + 1].0[k] - base[k]) / widths[k]
    });
    let mut sv: Vec<f64> = edges.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let hi = sv[0];
    let rank_needed = active.len().min(simplex.len() - 1);
    hi == 0.0 || sv[rank_needed - 1] <= 1e-10 * hi
}

/// Moves vertex `idx` by a seeded jitter of about 1% of the box width toward
/// the interior and re-evaluates it. Returns `false` if the budget ran out.
fn repair<F: FnMut(&[f64]) -> f64>(
    search: &mut Search<'_, F>,
    simplex: &mut [(Vec<f64>, f64)],
    idx: usize,
    widths: &[f64],
    rng: &mut seed::Rng,
) -> bool {
    let mut x = simplex[idx].0.clone();
    for k in 0..x.len() {
        let magnitude = 0.01 * widths[k] * (0.5 + 0.5 * rng.random::<f64>());
        let room_up = search.upper[k] - x[k];
        let room_down = x[k] - search.lower[k];
        x[k] += if room_up >= room_down {
            magnitude
        } else {
            -magnitude
        };
    }
    search.clip(&mut x);
    match search.cost(&x) {
        Some(f) => {
            simplex[idx] = (x, f);
            true
        }
        None => false,
    }
}
