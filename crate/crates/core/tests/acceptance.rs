//! Acceptance suite. Runs each criterion in sequence, prints one PASS/FAIL
//! line per criterion and exits non-zero if any failed.
//!
//! Select criteria by number: `cargo test --test acceptance -- 2 4`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::Rng;

use pricebounds::bounds::{
    bootstrap_bounds, bootstrap_replicates, cv_bounds_search, cv_revenue_estimate, quantile_bounds,
    BootstrapConfig, CvConfig, QuantileConfig,
};
use pricebounds::evaluation::{mean_and_sem, spearman};
use pricebounds::harness::{
    run_experiment, BootstrapSweep, CvSweep, ExperimentConfig, Method, QuantileSweep, ResultRow,
};
use pricebounds::model::{eval_revenue, Envelope, PriceBox};
use pricebounds::nelder_mead::NmConfig;
use pricebounds::ols::fit_ols;
use pricebounds::optimizer::{
    grid_oracle, maximize_revenue, maximize_revenue_boxed, QpSolverConfig,
};
use pricebounds::seed;
use pricebounds::synthetic::{
    calibrate_noise_sigma, generate_dataset, realized_noise_level, sample_ground_truth,
    sample_prices, SyntheticSpec,
};

type Outcome = Result<(bool, String), String>;

fn config_file(name: &str) -> ExperimentConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name);
    let mut cfg = ExperimentConfig::from_json_file(&path).expect("config file");
    cfg.output_dir = None;
    cfg
}

fn fmt_err(e: pricebounds::Error) -> String {
    e.to_string()
}

fn rows_for(rows: &[ResultRow], method: Method, sweep: f64) -> Vec<&ResultRow> {
    rows.iter()
        .filter(|r| r.method == method && r.sweep_value == sweep)
        .collect()
}

fn optimality_bound() -> Outcome {
    let mut cfg = config_file("desk_grid.json");
    cfg.record_timing = false;
    let result = run_experiment(&cfg).map_err(fmt_err)?;
    let rows = result.rows();
    let failed = result.failed().count();
    let flagged = result.flagged().count();
    let per_trial = cfg.expected_rows() / (cfg.grid().len() * cfg.trials);
    let expected = cfg.expected_rows() - flagged * per_trial;
    let worst = rows
        .iter()
        .map(|r| r.rel_revenue)
        .fold(f64::NEG_INFINITY, f64::max);
    let violations = rows
        .iter()
        .filter(|r| !(r.rel_revenue <= 1.0 + 1e-9))
        .count();
    Ok((
        violations == 0 && failed == 0 && rows.len() == expected,
        format!(
            "{} rows ({} expected, {flagged} flagged, {failed} failed trials), max relative revenue {worst:.12}, {violations} above 1 + 1e-9",
            rows.len(),
            expected
        ),
    ))
}

fn oracle_equivalence() -> Outcome {
    let qp = QpSolverConfig::default();
    let mut rng = seed::rng(seed::label("oracle-equivalence"));
    let mut worst_gap = f64::NEG_INFINITY;
    let mut failures = 0;
    for k in 0..50u64 {
        let m = 1 + (k % 3) as usize;
        let spec = SyntheticSpec::new(m, 20, 0.75, seed::derive(11, &[k]));
        // Alternate ground truths (concave) with noisy small-sample fits,
        // which are often indefinite.
        let theta = if k % 2 == 0 {
            sample_ground_truth(&spec).map_err(fmt_err)?
        } else {
            fit_ols(&generate_dataset(&spec).map_err(fmt_err)?.1).map_err(fmt_err)?
        };
        let env = Envelope::uniform(m, 0.5, 1.1).map_err(fmt_err)?;
        let (mut alpha, mut beta) = (Vec::new(), Vec::new());
        for _ in 0..m {
            let a: f64 = rng.random_range(0.5..1.1);
            let b: f64 = rng.random_range(0.5..1.1);
            alpha.push(a.min(b));
            beta.push(a.max(b));
        }
        let bounds = PriceBox::new(alpha, beta, env).map_err(fmt_err)?;
        let p = maximize_revenue_boxed(&theta, &bounds, &qp, k).map_err(fmt_err)?;
        let g = grid_oracle(&theta, &bounds, 1e-3).map_err(fmt_err)?;
        let gap = eval_revenue(&theta, &g).map_err(fmt_err)?
            - eval_revenue(&theta, &p).map_err(fmt_err)?;
        worst_gap = worst_gap.max(gap);
        if gap > 1e-3 {
            failures += 1;
        }
    }
    Ok((
        failures == 0,
        format!("50 instances, largest grid-minus-solver revenue {worst_gap:.3e} (limit 1e-3), {failures} failures"),
    ))
}

fn noise_free_degeneracy() -> Outcome {
    let qp = QpSolverConfig::default();
    let (mut coef_err, mut sd_max, mut cv_err) = (0.0f64, 0.0f64, 0.0f64);
    for (k, &(m, n)) in [(1, 50), (2, 50), (2, 300), (5, 300), (5, 1000)]
        .iter()
        .enumerate()
    {
        let spec = SyntheticSpec::new(m, n, 0.0, seed::derive(33, &[k as u64]));
        let (theta, data) = generate_dataset(&spec).map_err(fmt_err)?;
        let env = Envelope::uniform(m, 0.5, 1.1).map_err(fmt_err)?;
        coef_err = coef_err.max(fit_ols(&data).map_err(fmt_err)?.max_abs_diff(&theta));
        let reps = bootstrap_replicates(&data, &env, 100, &qp, k as u64).map_err(fmt_err)?;
        sd_max = reps.sd().iter().copied().fold(sd_max, f64::max);
        let full = PriceBox::full(&env);
        let cv =
            cv_revenue_estimate(&data, &full, &CvConfig::default(), k as u64).map_err(fmt_err)?;
        let p_hat = maximize_revenue(&theta, &env.pmin, &env.pmax, &qp, 0).map_err(fmt_err)?;
        cv_err = cv_err.max((cv - eval_revenue(&theta, &p_hat).map_err(fmt_err)?).abs());
    }
    Ok((
        coef_err <= 1e-8 && sd_max <= 1e-8 && cv_err <= 1e-8,
        format!(
            "(a) coefficient error {coef_err:.2e}, (b) max bootstrap sd {sd_max:.2e}, (c) CV revenue error {cv_err:.2e} (limit 1e-8 each)"
        ),
    ))
}

fn noise_calibration() -> Outcome {
    let mut worst = 0.0f64;
    let mut checked = 0;
    for &delta in &[0.25, 0.5, 0.75] {
        for &(m, n) in &[(5, 1000), (10, 500), (2, 2500), (1, 5000)] {
            for s in 0..5u64 {
                let spec = SyntheticSpec::new(
                    m,
                    n,
                    delta,
                    seed::derive(44, &[m as u64, s, delta.to_bits()]),
                );
                let theta = sample_ground_truth(&spec).map_err(fmt_err)?;
                let sigma =
                    calibrate_noise_sigma(&theta, &sample_prices(&spec).map_err(fmt_err)?, delta)
                        .map_err(fmt_err)?;
                let (_, data) = generate_dataset(&spec).map_err(fmt_err)?;
                let realized = realized_noise_level(sigma, &data);
                worst = worst.max((realized - delta).abs() / delta);
                checked += 1;
            }
        }
    }
    Ok((
        worst <= 0.05,
        format!("{checked} datasets with nm >= 5000, largest relative noise-level error {worst:.4} (limit 0.05)"),
    ))
}

fn quantile_beaten_at_matched_width() -> Outcome {
    let cfg = ExperimentConfig {
        m: vec![5],
        n: vec![1000],
        delta: vec![0.25],
        trials: 30,
        master_seed: 5,
        quantile: Some(QuantileSweep {
            q: (0..=8).map(|i| 0.6 + 0.05 * i as f64).collect(),
        }),
        bootstrap: Some(BootstrapSweep {
            kappa: vec![1.645],
            ..BootstrapSweep::default()
        }),
        cross_validation: Some(CvSweep {
            gamma: vec![1.25],
            ..CvSweep::default()
        }),
        record_timing: false,
        ..ExperimentConfig::default()
    };
    let result = run_experiment(&cfg).map_err(fmt_err)?;
    let rows = result.rows();
    let stats = |rs: &[&ResultRow]| {
        let widths: Vec<f64> = rs.iter().map(|r| r.avg_width).collect();
        let revenue: Vec<f64> = rs.iter().map(|r| r.rel_revenue).collect();
        (mean_and_sem(&widths).0, mean_and_sem(&revenue))
    };
    let quantile: Vec<(f64, f64, (f64, f64))> = cfg
        .sweep(Method::Quantile)
        .into_iter()
        .map(|q| {
            let (w, rev) = stats(&rows_for(&rows, Method::Quantile, q));
            (q, w, rev)
        })
        .collect();
    let mut pass = result.failed().count() == 0;
    let mut detail = Vec::new();
    for (method, sweep) in [(Method::Bootstrap, 1.645), (Method::CrossValidation, 1.25)] {
        let rs = rows_for(&rows, method, sweep);
        let (w, (mean, sem)) = stats(&rs);
        let &(q, qw, (qmean, qsem)) = quantile
            .iter()
            .min_by(|a, b| (a.1 - w).abs().total_cmp(&(b.1 - w).abs()))
            .expect("quantile sweep");
        let se = (sem * sem + qsem * qsem).sqrt();
        let ok = rs.len() == cfg.trials && mean - qmean > 2.0 * se;
        pass &= ok;
        detail.push(format!(
            "{} width {w:.3} revenue {mean:.4} vs q={q:.2} width {qw:.3} revenue {qmean:.4}: diff {:.4}, 2SE {:.4}",
            method.name(),
            mean - qmean,
            2.0 * se
        ));
    }
    Ok((pass, detail.join("; ")))
}

fn r2_width_correlation() -> Outcome {
    let mut cfg = config_file("r2_width.json");
    cfg.delta = vec![0.75];
    cfg.record_timing = false;
    let result = run_experiment(&cfg).map_err(fmt_err)?;
    let rows = result.rows();
    let mut rho = BTreeMap::new();
    for method in [Method::Bootstrap, Method::CrossValidation] {
        let (mut r2, mut width) = (Vec::new(), Vec::new());
        for row in rows.iter().filter(|r| r.method == method) {
            for (a, b) in row.r2.iter().zip(&row.widths) {
                if a.is_finite() {
                    r2.push(*a);
                    width.push(*b);
                }
            }
        }
        rho.insert(method, (spearman(&r2, &width), r2.len()));
    }
    let (b, nb) = rho[&Method::Bootstrap];
    let (c, nc) = rho[&Method::CrossValidation];
    Ok((
        c >= 0.2 && b <= -0.2,
        format!("Spearman(R², width) at delta 0.75: cross_validation {c:+.3} over {nc} items (need >= +0.2), bootstrap {b:+.3} over {nb} items (need <= -0.2)"),
    ))
}

fn timing_growth() -> Outcome {
    let mut cfg = config_file("timing.json");
    cfg.m = vec![2, 10];
    cfg.n = vec![300];
    cfg.delta = vec![0.5];
    cfg.trials = 10;
    cfg.workers = Some(1);
    cfg.record_timing = true;
    let result = run_experiment(&cfg).map_err(fmt_err)?;
    let rows = result.rows();
    let mean_time = |method: Method, m: usize| {
        let t: Vec<f64> = rows
            .iter()
            .filter(|r| r.method == method && r.m == m)
            .map(|r| r.time_bounds_s)
            .collect();
        mean_and_sem(&t).0
    };
    let ratio = |method| mean_time(method, 10) / mean_time(method, 2);
    let (cv, bs) = (ratio(Method::CrossValidation), ratio(Method::Bootstrap));
    Ok((
        cv > bs,
        format!("time(m=10)/time(m=2): cross_validation {cv:.1}x, bootstrap {bs:.1}x"),
    ))
}

fn feasibility() -> Outcome {
    let qp = QpSolverConfig::default();
    let mut rng = seed::rng(seed::label("feasibility"));
    let mut violations = [0usize; 3];
    let mut errors = 0usize;
    for k in 0..1000u64 {
        let m = rng.random_range(1..=4);
        let n = rng.random_range(10..=120);
        let delta = rng.random_range(0.0..0.9);
        let (_, data) = generate_dataset(&SyntheticSpec::new(m, n, delta, seed::derive(88, &[k])))
            .map_err(fmt_err)?;
        let lo: f64 = rng.random_range(0.3..0.9);
        let pmin: Vec<f64> = (0..m).map(|_| lo + rng.random_range(0.0..0.1)).collect();
        let pmax: Vec<f64> = pmin
            .iter()
            .map(|p| p + rng.random_range(0.0..0.8))
            .collect();
        let env = Envelope::new(pmin, pmax).map_err(fmt_err)?;
        let contained = |b: &PriceBox| {
            (0..m).all(|j| {
                env.pmin[j] <= b.alpha()[j]
                    && b.alpha()[j] <= b.beta()[j]
                    && b.beta()[j] <= env.pmax[j]
            })
        };

        let q = rng.random_range(0.01..=1.0);
        match quantile_bounds(&data, &env, &QuantileConfig { q }) {
            Ok(b) if contained(&b) => {}
            Ok(_) => violations[0] += 1,
            Err(_) => errors += 1,
        }

        let kappa = if k % 10 == 0 {
            f64::INFINITY
        } else {
            rng.random_range(0.0..4.0)
        };
        let cfg = BootstrapConfig {
            n_bootstrap: rng.random_range(2..=20),
            kappa,
        };
        match bootstrap_bounds(&data, &env, &cfg, &qp, k) {
            Ok(b) if contained(&b) => {}
            Ok(_) => violations[1] += 1,
            Err(_) => errors += 1,
        }

        let total: f64 = (0..m).map(|j| env.width(j)).sum();
        let gamma = rng.random_range(0.0..=1.2 * total);
        let cfg = CvConfig {
            k_folds: rng.random_range(2..=5),
            gamma,
            nm: NmConfig {
                max_evals: Some(60 * m),
                ..NmConfig::default()
            },
            ..CvConfig::default()
        };
        match cv_bounds_search(&data, &env, &cfg, k) {
            Ok(b) if contained(&b) && b.total_width() <= gamma + 1e-6 => {}
            Ok(_) => violations[2] += 1,
            Err(_) => errors += 1,
        }
    }
    Ok((
        violations.iter().sum::<usize>() == 0 && errors == 0,
        format!(
            "1000 invocations per method; violations quantile {}, bootstrap {}, cross_validation {}; {errors} errors",
            violations[0], violations[1], violations[2]
        ),
    ))
}

fn determinism() -> Outcome {
    let base = ExperimentConfig {
        m: vec![2, 3],
        n: vec![60],
        delta: vec![0.0, 0.5],
        trials: 3,
        master_seed: 99,
        quantile: Some(QuantileSweep { q: vec![0.6, 1.0] }),
        bootstrap: Some(BootstrapSweep {
            n_bootstrap: 20,
            confidence: vec![90, 100],
            kappa: vec![],
        }),
        cross_validation: Some(CvSweep {
            gamma: vec![0.5, 1.5],
            ..CvSweep::default()
        }),
        record_timing: false,
        ..ExperimentConfig::default()
    };
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for (tag, workers) in [("a", 1), ("b", 4), ("c", 1), ("d", 3)] {
        let dir = tmp.path().join(tag);
        let cfg = ExperimentConfig {
            output_dir: Some(dir.clone()),
            workers: Some(workers),
            ..base.clone()
        };
        run_experiment(&cfg).map_err(fmt_err)?;
        let read = |f: &str| std::fs::read(dir.join(f)).map_err(|e| e.to_string());
        outputs.push((workers, read("results.csv")?, read("scatter.csv")?));
    }
    let identical = outputs
        .iter()
        .all(|(_, r, s)| *r == outputs[0].1 && *s == outputs[0].2);

    // With wall-clock timing on, every other column still matches.
    let timed = |workers| {
        run_experiment(&ExperimentConfig {
            record_timing: true,
            workers: Some(workers),
            ..base.clone()
        })
        .map(|r| {
            r.rows()
                .into_iter()
                .map(|row| ResultRow {
                    time_bounds_s: 0.0,
                    ..row
                })
                .collect::<Vec<_>>()
        })
        .map_err(fmt_err)
    };
    let timed_equal = timed(1)? == timed(4)?;
    Ok((
        identical && timed_equal,
        format!(
            "{} runs at worker counts {:?}: results and scatter CSVs byte-identical {identical}; timed runs equal apart from time {timed_equal}",
            outputs.len(),
            outputs.iter().map(|o| o.0).collect::<Vec<_>>()
        ),
    ))
}

struct Criterion {
    id: u32,
    title: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion {
            id: 1,
            title: "relative revenue never exceeds 1 on the desk grid",
            budget: Duration::from_secs(600),
            run: optimality_bound,
        },
        Criterion {
            id: 2,
            title: "solver matches the grid oracle",
            budget: Duration::from_secs(120),
            run: oracle_equivalence,
        },
        Criterion {
            id: 3,
            title: "noise-free data is reproduced exactly",
            budget: Duration::from_secs(60),
            run: noise_free_degeneracy,
        },
        Criterion {
            id: 4,
            title: "realized noise level matches the target",
            budget: Duration::from_secs(60),
            run: noise_calibration,
        },
        Criterion {
            id: 5,
            title: "bootstrap and CV beat quantile at matched width",
            budget: Duration::from_secs(1800),
            run: quantile_beaten_at_matched_width,
        },
        Criterion {
            id: 6,
            title: "width tracks forecast accuracy in opposite directions",
            budget: Duration::from_secs(1800),
            run: r2_width_correlation,
        },
        Criterion {
            id: 7,
            title: "CV time grows faster with item count than bootstrap",
            budget: Duration::from_secs(1200),
            run: timing_growth,
        },
        Criterion {
            id: 8,
            title: "every produced box is feasible",
            budget: Duration::from_secs(300),
            run: feasibility,
        },
        Criterion {
            id: 9,
            title: "results are identical across reruns and worker counts",
            budget: Duration::from_secs(600),
            run: determinism,
        },
    ];
    let selected: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let list_only = std::env::args().any(|a| a == "--list");
    let mut failed = Vec::new();
    let mut out = std::io::stdout();
    for c in criteria
        .iter()
        .filter(|c| selected.is_empty() || selected.contains(&c.id))
    {
        if list_only {
            let _ = writeln!(out, "criterion_{}: test", c.id);
            continue;
        }
        let started = Instant::now();
        let outcome = (c.run)();
        let elapsed = started.elapsed();
        let in_time = elapsed <= c.budget;
        let (pass, detail) = match outcome {
            Ok((pass, detail)) => (pass && in_time, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let _ = writeln!(
            out,
            "criterion {} [{}] {}: {}; {:.1} s (budget {} s)",
            c.id,
            if pass { "PASS" } else { "FAIL" },
            c.title,
            detail,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
        let _ = out.flush();
        if !pass {
            failed.push(c.id);
        }
    }
    if !failed.is_empty() {
        let _ = writeln!(out, "failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
