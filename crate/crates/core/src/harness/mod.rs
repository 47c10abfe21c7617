//! Seeded experiment grid runner.
//!
//! Trials are the unit of work. Each trial's seed is a pure function of the
//! master seed and its `(m, n, δ, trial)` coordinates, so trials can run in
//! any order and on any number of threads. Completed trials are appended to
//! `results.partial.jsonl` as they finish; a rerun with the same
//! configuration skips them. At the end the rows are sorted by grid point,
//! trial, method and sweep position and written as `results.csv`,
//! `scatter.csv` and `summary.json`.

mod config;
mod output;
mod plots;
mod trial;

use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;

use rayon::prelude::*;
use serde::Serialize;

pub use config::{
    BootstrapSweep, CvSweep, ExperimentConfig, GridPoint, Method, QuantileSweep, UniformEnvelope,
};
pub use output::{
    fmt_float, read_results_csv, results_header, write_results_csv, write_scatter_csv,
};
pub use plots::{
    curve_series, emit_plot_series, timing_series, CurveKey, CurvePoint, TimingKey, TimingPoint,
};
pub use trial::{method_seed, run_trial, trial_seed, ResultRow, TrialContext, TrialRecord};

use crate::error::{Error, Result};

pub const RESULTS_FILE: &str = "results.csv";
pub const SCATTER_FILE: &str = "scatter.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const CONFIG_FILE: &str = "config.json";
const PARTIAL_FILE: &str = "results.partial.jsonl";

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    /// Sorted by grid point, then trial.
    pub records: Vec<TrialRecord>,
}

#[derive(Debug, Serialize)]
struct TrialNote<'a> {
    m: usize,
    n: usize,
    delta: f64,
    trial: usize,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    rows: usize,
    expected_rows: usize,
    trials: usize,
    flagged: Vec<TrialNote<'a>>,
    failed: Vec<TrialNote<'a>>,
}

impl ExperimentResult {
    pub fn rows(&self) -> Vec<ResultRow> {
        self.records
            .iter()
            .flat_map(|r| r.rows.iter().cloned())
            .collect()
    }

    pub fn flagged(&self) -> impl Iterator<Item = &TrialRecord> {
        self.records.iter().filter(|r| r.flagged)
    }

    pub fn failed(&self) -> impl Iterator<Item = &TrialRecord> {
        self.records.iter().filter(|r| r.error.is_some())
    }

    fn summary(&self) -> Summary<'_> {
        fn note(r: &TrialRecord) -> TrialNote<'_> {
            TrialNote {
                m: r.point.m,
                n: r.point.n,
                delta: r.point.delta,
                trial: r.trial,
                seed: r.seed,
                error: r.error.as_deref(),
            }
        }
        Summary {
            rows: self.records.iter().map(|r| r.rows.len()).sum(),
            expected_rows: self.config.expected_rows(),
            trials: self.records.len(),
            flagged: self.flagged().map(note).collect(),
            failed: self.failed().map(note).collect(),
        }
    }

    /// Writes `results.csv`, `scatter.csv`, `summary.json` and `config.json`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let rows = self.rows();
        let results = dir.join(RESULTS_FILE);
        write_results_csv(create(&results)?, &rows, self.config.max_items())?;
        write_scatter_csv(create(&dir.join(SCATTER_FILE))?, &rows)?;
        let summary = dir.join(SUMMARY_FILE);
        let mut w = create(&summary)?;
        serde_json::to_writer_pretty(&mut w, &self.summary())?;
        writeln!(w).map_err(|e| Error::io(&summary, e))?;
        write_config(&dir.join(CONFIG_FILE), &self.config)
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// The configuration without settings that cannot change results.
fn canonical(cfg: &ExperimentConfig) -> ExperimentConfig {
    ExperimentConfig {
        output_dir: None,
        workers: None,
        ..cfg.clone()
    }
}

fn write_config(path: &Path, cfg: &ExperimentConfig) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, &canonical(cfg))?;
    writeln!(w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads completed trial records; a torn last line from an interrupted run
/// is ignored.
fn load_partial(path: &Path) -> Result<Vec<TrialRecord>> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(Error::io(path, e)),
    };
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        match serde_json::from_str::<TrialRecord>(&line) {
            Ok(rec) => out.push(rec),
            Err(_) => log::warn!("ignoring incomplete line in {}", path.display()),
        }
    }
    Ok(out)
}

fn prepare_output(dir: &Path, cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let partial = dir.join(PARTIAL_FILE);
    let config_path = dir.join(CONFIG_FILE);
    let done = load_partial(&partial)?;
    if !done.is_empty() {
        let text = std::fs::read_to_string(&config_path).map_err(|e| Error::io(&config_path, e))?;
        let previous: ExperimentConfig = serde_json::from_str(&text)?;
        if canonical(&previous) != canonical(cfg) {
            return Err(Error::Config(format!(
                "{} holds an interrupted run with a different configuration",
                dir.display()
            )));
        }
        log::info!("resuming: {} trials already complete", done.len());
    }
    write_config(&config_path, cfg)?;
    // Probe writability before any work starts.
    OpenOptions::new()
        .create(true)
        .append(true)
        .open(&partial)
        .map_err(|e| Error::io(&partial, e))?;
    Ok(done)
}

/// Runs every trial of the grid. With an output directory, results are
/// streamed to disk and the final tables are written there.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let out_dir: Option<PathBuf> = cfg.output_dir.clone();
    let mut records = match &out_dir {
        Some(dir) => prepare_output(dir, cfg)?,
        None => Vec::new(),
    };
    let done: HashSet<(usize, usize)> = records.iter().map(|r| (r.grid_index, r.trial)).collect();

    let jobs: Vec<(usize, GridPoint, usize)> = cfg
        .grid()
        .into_iter()
        .enumerate()
        .flat_map(|(g, point)| (0..cfg.trials).map(move |t| (g, point, t)))
        .filter(|(g, _, t)| !done.contains(&(*g, *t)))
        .collect();

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cfg.workers.filter(|&w| w > 0) {
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;

    let mut sink = match &out_dir {
        Some(dir) => {
            let path = dir.join(PARTIAL_FILE);
            let file = OpenOptions::new()
                .append(true)
                .open(&path)
                .map_err(|e| Error::io(&path, e))?;
            Some((path, BufWriter::new(file)))
        }
        None => None,
    };
    let mut write_error: Option<Error> = None;

    let (tx, rx) = mpsc::channel::<TrialRecord>();
    std::thread::scope(|scope| {
        let jobs = &jobs;
        scope.spawn(move || {
            pool.install(|| {
                jobs.par_iter().for_each_with(tx, |tx, &(g, point, t)| {
                    let _ = tx.send(run_trial(cfg, g, point, t));
                });
            });
        });
        for record in rx {
            if let (Some((path, w)), None) = (sink.as_mut(), write_error.as_ref()) {
                let line = serde_json::to_string(&record).map_err(Error::from);
                let res = line.and_then(|l| {
                    writeln!(w, "{l}")
                        .and_then(|_| w.flush())
                        .map_err(|e| Error::io(path.as_path(), e))
                });
                if let Err(e) = res {
                    write_error = Some(e);
                }
            }
            records.push(record);
        }
    });
    if let Some(e) = write_error {
        return Err(e);
    }

    records.sort_by_key(|r| (r.grid_index, r.trial));
    let result = ExperimentResult {
        config: cfg.clone(),
        records,
    };
    if let Some(dir) = &out_dir {
        result.write_to(dir)?;
        let partial = dir.join(PARTIAL_FILE);
        std::fs::remove_file(&partial).map_err(|e| Error::io(&partial, e))?;
    }
    Ok(result)
}

#[derive(Debug, Clone)]
pub struct ReplayOutcome {
    pub recorded: ResultRow,
    pub replayed: ResultRow,
    /// Largest absolute difference over relative revenue, width and R².
    pub max_abs_diff: f64,
}

impl ReplayOutcome {
    pub fn matches(&self, tol: f64) -> bool {
        self.max_abs_diff <= tol
    }
}

/// Recomputes one recorded row from its seed and the run configuration.
pub fn replay_row(cfg: &ExperimentConfig, recorded: &ResultRow) -> Result<ReplayOutcome> {
    let point = GridPoint {
        m: recorded.m,
        n: recorded.n,
        delta: recorded.delta,
    };
    if trial_seed(cfg.master_seed, &point, recorded.trial) != recorded.seed {
        return Err(Error::Config(
            "row seed does not match the configuration's master seed".into(),
        ));
    }
    let ctx = TrialContext::new(cfg, point, recorded.trial)?;
    let replayed = ctx
        .rows(recorded.method, &[recorded.sweep_value])?
        .pop()
        .ok_or_else(|| Error::Config("replay produced no row".into()))?;
    let mut diff = (replayed.rel_revenue - recorded.rel_revenue)
        .abs()
        .max((replayed.avg_width - recorded.avg_width).abs());
    for (a, b) in replayed.r2.iter().zip(&recorded.r2) {
        if !(a.is_nan() && b.is_nan()) {
            diff = diff.max((a - b).abs());
        }
    }
    if diff.is_nan() {
        diff = f64::INFINITY;
    }
    Ok(ReplayOutcome {
        recorded: recorded.clone(),
        replayed,
        max_abs_diff: diff,
    })
}

/// Loads `results.csv` and the `config.json` beside it (or `config`).
pub fn load_run(
    results: &Path,
    config: Option<&Path>,
) -> Result<(ExperimentConfig, Vec<ResultRow>)> {
    let file = File::open(results).map_err(|e| Error::io(results, e))?;
    let rows = read_results_csv(BufReader::new(file))?;
    let config_path = match config {
        Some(p) => p.to_path_buf(),
        None => results
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .join(CONFIG_FILE),
    };
    let cfg = ExperimentConfig::from_json_file(&config_path)?;
    Ok((cfg, rows))
}
