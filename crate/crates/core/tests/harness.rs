use std::fs;
use std::io::Write;

use pricebounds::bounds::{
    bootstrap_replicates, cv_bounds_search, quantile_bounds, CvConfig, QuantileConfig,
};
use pricebounds::harness::{
    emit_plot_series, load_run, method_seed, replay_row, run_experiment, run_trial, BootstrapSweep,
    CvSweep, ExperimentConfig, Method, QuantileSweep, ResultRow, TrialContext,
};
use pricebounds::model::Envelope;
use pricebounds::optimizer::maximize_revenue;

fn small_config() -> ExperimentConfig {
    ExperimentConfig {
        m: vec![2, 3],
        n: vec![50],
        delta: vec![0.5],
        trials: 3,
        master_seed: 17,
        quantile: Some(QuantileSweep { q: vec![0.6, 0.9] }),
        bootstrap: Some(BootstrapSweep {
            n_bootstrap: 15,
            confidence: vec![90, 100],
            kappa: vec![0.5],
        }),
        cross_validation: Some(CvSweep {
            gamma: vec![0.75],
            ..CvSweep::default()
        }),
        record_timing: false,
        ..ExperimentConfig::default()
    }
}

#[test]
fn row_count_and_seeds() {
    let cfg = small_config();
    let result = run_experiment(&cfg).unwrap();
    let rows = result.rows();
    assert_eq!(rows.len(), cfg.expected_rows());
    assert_eq!(rows.len(), 2 * 3 * (2 + 3 + 1));
    assert!(rows
        .iter()
        .all(|r| r.seed != 0 && r.r2.len() == r.m && r.widths.len() == r.m));
}

#[test]
fn resume_after_interruption_gives_same_files() {
    let tmp = tempfile::tempdir().unwrap();
    let full_dir = tmp.path().join("full");
    let cfg = ExperimentConfig {
        output_dir: Some(full_dir.clone()),
        ..small_config()
    };
    run_experiment(&cfg).unwrap();
    assert!(!full_dir.join("results.partial.jsonl").exists());

    // An interrupted run: some trials on disk, the last line torn.
    let dir = tmp.path().join("resumed");
    fs::create_dir_all(&dir).unwrap();
    fs::copy(full_dir.join("config.json"), dir.join("config.json")).unwrap();
    let mut partial = fs::File::create(dir.join("results.partial.jsonl")).unwrap();
    let grid = cfg.grid();
    for (g, t) in [(1, 2), (0, 0)] {
        let rec = run_trial(&cfg, g, grid[g], t);
        writeln!(partial, "{}", serde_json::to_string(&rec).unwrap()).unwrap();
    }
    write!(partial, "{{\"grid_index\": 0, \"tri").unwrap();
    drop(partial);

    let resumed = ExperimentConfig {
        output_dir: Some(dir.clone()),
        workers: Some(2),
        ..small_config()
    };
    run_experiment(&resumed).unwrap();
    for f in ["results.csv", "scatter.csv", "summary.json"] {
        assert_eq!(
            fs::read(full_dir.join(f)).unwrap(),
            fs::read(dir.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn resume_refuses_a_different_configuration() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        output_dir: Some(tmp.path().to_path_buf()),
        ..small_config()
    };
    fs::write(
        tmp.path().join("config.json"),
        serde_json::to_string(&small_config()).unwrap(),
    )
    .unwrap();
    let rec = run_trial(&cfg, 0, cfg.grid()[0], 0);
    fs::write(
        tmp.path().join("results.partial.jsonl"),
        serde_json::to_string(&rec).unwrap() + "\n",
    )
    .unwrap();
    let changed = ExperimentConfig {
        master_seed: 18,
        ..cfg
    };
    assert!(run_experiment(&changed).is_err());
}

#[test]
fn unwritable_output_fails_before_running() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("not_a_dir");
    fs::write(&file, "x").unwrap();
    let cfg = ExperimentConfig {
        output_dir: Some(file.join("out")),
        ..small_config()
    };
    assert!(run_experiment(&cfg).is_err());
}

#[test]
fn every_row_replays_from_its_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        output_dir: Some(tmp.path().to_path_buf()),
        record_timing: true,
        ..small_config()
    };
    run_experiment(&cfg).unwrap();
    let (loaded, rows) = load_run(&tmp.path().join("results.csv"), None).unwrap();
    assert_eq!(rows.len(), cfg.expected_rows());
    for row in &rows {
        let outcome = replay_row(&loaded, row).unwrap();
        assert!(
            outcome.matches(1e-12),
            "{row:?} differs by {}",
            outcome.max_abs_diff
        );
    }
}

#[test]
fn trials_are_independent_of_each_other() {
    let strip = |rows: Vec<ResultRow>, keep: usize| -> Vec<ResultRow> {
        rows.into_iter().filter(|r| r.trial < keep).collect()
    };
    let three = run_experiment(&small_config()).unwrap().rows();
    let two = run_experiment(&ExperimentConfig {
        trials: 2,
        ..small_config()
    })
    .unwrap()
    .rows();
    assert_eq!(strip(three, 2), two);
}

#[test]
fn noise_free_grid_is_optimal_when_the_optimum_is_inside() {
    let cfg = ExperimentConfig {
        m: vec![2],
        n: vec![50],
        delta: vec![0.0],
        trials: 5,
        ..small_config()
    };
    let rows = run_experiment(&cfg).unwrap().rows();
    let env = Envelope::uniform(2, 0.5, 1.1).unwrap();
    let mut checked = 0;
    for t in 0..cfg.trials {
        let point = cfg.grid()[0];
        let ctx = TrialContext::new(&cfg, point, t).unwrap();
        let p_star = maximize_revenue(ctx.theta_star(), &env.pmin, &env.pmax, &cfg.qp, 0).unwrap();
        for row in rows.iter().filter(|r| r.trial == t) {
            let bounds = match row.method {
                Method::Quantile => {
                    quantile_bounds(ctx.data(), &env, &QuantileConfig { q: row.sweep_value })
                        .unwrap()
                }
                Method::Bootstrap => bootstrap_replicates(
                    ctx.data(),
                    &env,
                    15,
                    &cfg.qp,
                    method_seed(ctx.seed(), Method::Bootstrap),
                )
                .unwrap()
                .bounds(row.sweep_value)
                .unwrap(),
                Method::CrossValidation => cv_bounds_search(
                    ctx.data(),
                    &env,
                    &CvConfig {
                        gamma: row.sweep_value,
                        ..CvConfig::default()
                    },
                    method_seed(ctx.seed(), Method::CrossValidation),
                )
                .unwrap(),
            };
            assert!((bounds.widths().iter().sum::<f64>() / 2.0 - row.avg_width).abs() < 1e-12);
            if bounds.contains(&p_star) {
                assert!(row.rel_revenue >= 1.0 - 1e-6, "{row:?}");
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn headline_grid_yields_one_curve_file_per_group() {
    let cfg = ExperimentConfig {
        m: vec![5, 10],
        n: vec![300, 1000],
        delta: vec![0.25, 0.5, 0.75],
        ..ExperimentConfig::default()
    };
    let mut rows = Vec::new();
    for point in cfg.grid() {
        for (method, sweep) in [
            (Method::Quantile, 0.8),
            (Method::Bootstrap, 1.645),
            (Method::CrossValidation, 2.5),
        ] {
            for trial in 0..2 {
                rows.push(ResultRow {
                    m: point.m,
                    n: point.n,
                    delta: point.delta,
                    method,
                    sweep_value: sweep,
                    trial,
                    seed: 1,
                    rel_revenue: 0.9,
                    avg_width: 0.2,
                    time_bounds_s: 0.1,
                    r2: vec![0.5; point.m],
                    widths: vec![],
                });
            }
        }
    }
    let tmp = tempfile::tempdir().unwrap();
    let files = emit_plot_series(&rows, tmp.path()).unwrap();
    let curves = files
        .iter()
        .filter(|p| {
            p.file_name()
                .unwrap()
                .to_string_lossy()
                .starts_with("curve_")
        })
        .count();
    assert_eq!(curves, 12 * 3);
    assert!(emit_plot_series(&[], tmp.path()).is_err());
}

#[test]
fn resumed_runs_keep_completed_trials() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        output_dir: Some(tmp.path().to_path_buf()),
        ..small_config()
    };
    let canonical = ExperimentConfig {
        output_dir: None,
        ..small_config()
    };
    fs::write(
        tmp.path().join("config.json"),
        serde_json::to_string(&canonical).unwrap(),
    )
    .unwrap();
    let mut rec = run_trial(&cfg, 1, cfg.grid()[1], 1);
    rec.rows[0].rel_revenue = 0.125;
    fs::write(
        tmp.path().join("results.partial.jsonl"),
        serde_json::to_string(&rec).unwrap() + "\n",
    )
    .unwrap();
    let rows = run_experiment(&cfg).unwrap().rows();
    assert_eq!(rows.len(), cfg.expected_rows());
    assert_eq!(rows.iter().filter(|r| r.rel_revenue == 0.125).count(), 1);
}
