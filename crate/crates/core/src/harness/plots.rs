//! Aggregated plot data: width/revenue trade-off curves per grid point and
//! method, and computation time as a function of the item count.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use super::config::Method;
use super::output::fmt_float;
use super::trial::ResultRow;
use crate::error::{Error, Result};
use crate::evaluation::mean_and_sem;

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub sweep_value: f64,
    pub mean_avg_width: f64,
    pub sem_avg_width: f64,
    pub mean_rel_revenue: f64,
    pub sem_rel_revenue: f64,
    pub n_trials: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CurveKey {
    pub m: usize,
    pub n: usize,
    delta_bits: u64,
    pub method: Method,
}

impl CurveKey {
    pub fn delta(&self) -> f64 {
        f64::from_bits(self.delta_bits)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct TimingKey {
    pub n: usize,
    delta_bits: u64,
    pub method: Method,
    sweep_bits: u64,
}

impl TimingKey {
    pub fn delta(&self) -> f64 {
        f64::from_bits(self.delta_bits)
    }

    pub fn sweep_value(&self) -> f64 {
        f64::from_bits(self.sweep_bits)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingPoint {
    pub m: usize,
    pub mean_time_s: f64,
    pub sem_time_s: f64,
}

/// Groups values by `key`, keeping sub-keys in order of first appearance.
fn group<K: Ord, S: PartialEq + Copy>(
    rows: &[ResultRow],
    key: impl Fn(&ResultRow) -> K,
    sub: impl Fn(&ResultRow) -> S,
) -> BTreeMap<K, Vec<(S, Vec<&ResultRow>)>> {
    let mut out: BTreeMap<K, Vec<(S, Vec<&ResultRow>)>> = BTreeMap::new();
    for row in rows {
        let entry = out.entry(key(row)).or_default();
        let s = sub(row);
        match entry.iter_mut().find(|(k, _)| *k == s) {
            Some((_, v)) => v.push(row),
            None => entry.push((s, vec![row])),
        }
    }
    out
}

pub fn curve_series(rows: &[ResultRow]) -> BTreeMap<CurveKey, Vec<CurvePoint>> {
    group(
        rows,
        |r| CurveKey {
            m: r.m,
            n: r.n,
            delta_bits: r.delta.to_bits(),
            method: r.method,
        },
        |r| r.sweep_value.to_bits(),
    )
    .into_iter()
    .map(|(k, subs)| {
        let points = subs
            .into_iter()
            .map(|(bits, rs)| {
                let widths: Vec<f64> = rs.iter().map(|r| r.avg_width).collect();
                let revenue: Vec<f64> = rs.iter().map(|r| r.rel_revenue).collect();
                let (mean_avg_width, sem_avg_width) = mean_and_sem(&widths);
                let (mean_rel_revenue, sem_rel_revenue) = mean_and_sem(&revenue);
                CurvePoint {
                    sweep_value: f64::from_bits(bits),
                    mean_avg_width,
                    sem_avg_width,
                    mean_rel_revenue,
                    sem_rel_revenue,
                    n_trials: rs.len(),
                }
            })
            .collect();
        (k, points)
    })
    .collect()
}

pub fn timing_series(rows: &[ResultRow]) -> BTreeMap<TimingKey, Vec<TimingPoint>> {
    group(
        rows,
        |r| TimingKey {
            n: r.n,
            delta_bits: r.delta.to_bits(),
            method: r.method,
            sweep_bits: r.sweep_value.to_bits(),
        },
        |r| r.m,
    )
    .into_iter()
    .map(|(k, subs)| {
        let mut points: Vec<TimingPoint> = subs
            .into_iter()
            .map(|(m, rs)| {
                let times: Vec<f64> = rs.iter().map(|r| r.time_bounds_s).collect();
                let (mean_time_s, sem_time_s) = mean_and_sem(&times);
                TimingPoint {
                    m,
                    mean_time_s,
                    sem_time_s,
                }
            })
            .collect();
        points.sort_by_key(|p| p.m);
        (k, points)
    })
    .collect()
}

fn create(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

/// Writes one curve file per `(m, n, δ, method)` and one timing file per
/// `(n, δ, method, sweep value)`. Returns the paths written.
pub fn emit_plot_series(rows: &[ResultRow], out_dir: &Path) -> Result<Vec<PathBuf>> {
    if rows.is_empty() {
        return Err(Error::Config("no result rows to aggregate".into()));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();

    for (key, points) in curve_series(rows) {
        let path = out_dir.join(format!(
            "curve_m{}_n{}_delta{}_{}.csv",
            key.m,
            key.n,
            key.delta(),
            key.method.name()
        ));
        let mut w = create(&path)?;
        w.write_record([
            "sweep_value",
            "mean_avg_width",
            "sem_avg_width",
            "mean_rel_revenue",
            "sem_rel_revenue",
            "n_trials",
        ])?;
        for p in points {
            w.write_record([
                fmt_float(p.sweep_value),
                fmt_float(p.mean_avg_width),
                fmt_float(p.sem_avg_width),
                fmt_float(p.mean_rel_revenue),
                fmt_float(p.sem_rel_revenue),
                p.n_trials.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }

    for (key, points) in timing_series(rows) {
        let path = out_dir.join(format!(
            "timing_n{}_delta{}_{}_{}{}.csv",
            key.n,
            key.delta(),
            key.method.name(),
            key.method.sweep_param(),
            key.sweep_value()
        ));
        let mut w = create(&path)?;
        w.write_record(["m", "mean_time_s", "sem_time_s"])?;
        for p in points {
            w.write_record([
                p.m.to_string(),
                fmt_float(p.mean_time_s),
                fmt_float(p.sem_time_s),
            ])?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
