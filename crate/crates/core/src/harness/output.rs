//! CSV serialization of result rows. Floats are written with 17 significant
//! digits so every value reads back bit for bit.

use std::io::{Read, Write};

use super::config::Method;
use super::trial::ResultRow;
use crate::error::{Error, Result};

pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn parse_float(s: &str, column: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("column {column}: cannot parse {s:?} as a number")))
}

fn parse_int<T: std::str::FromStr>(s: &str, column: &str) -> Result<T> {
    s.trim()
        .parse::<T>()
        .map_err(|_| Error::Config(format!("column {column}: cannot parse {s:?} as an integer")))
}

pub const RESULT_COLUMNS: [&str; 11] = [
    "m",
    "n",
    "delta",
    "method",
    "sweep_param",
    "sweep_value",
    "trial",
    "seed",
    "rel_revenue",
    "avg_width",
    "time_bounds_s",
];

pub fn results_header(max_items: usize) -> Vec<String> {
    RESULT_COLUMNS
        .iter()
        .map(|s| s.to_string())
        .chain((0..max_items).map(|j| format!("r2_item_{j}")))
        .collect()
}

/// Writes the main results table. R² columns beyond a row's item count are
/// left empty.
pub fn write_results_csv<W: Write>(out: W, rows: &[ResultRow], max_items: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(results_header(max_items))?;
    for row in rows {
        let mut rec = vec![
            row.m.to_string(),
            row.n.to_string(),
            fmt_float(row.delta),
            row.method.name().to_string(),
            row.method.sweep_param().to_string(),
            fmt_float(row.sweep_value),
            row.trial.to_string(),
            row.seed.to_string(),
            fmt_float(row.rel_revenue),
            fmt_float(row.avg_width),
            fmt_float(row.time_bounds_s),
        ];
        rec.extend(
            (0..max_items).map(|j| row.r2.get(j).map(|&v| fmt_float(v)).unwrap_or_default()),
        );
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("results csv", e))?;
    Ok(())
}

pub fn read_results_csv<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Config(format!("results file lacks column {name}")))
    };
    let idx: Vec<usize> = RESULT_COLUMNS
        .iter()
        .map(|c| col(c))
        .collect::<Result<_>>()?;
    let r2_cols: Vec<usize> = headers
        .iter()
        .enumerate()
        .filter(|(_, h)| h.starts_with("r2_item_"))
        .map(|(i, _)| i)
        .collect();

    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let get = |k: usize| rec.get(idx[k]).unwrap_or("");
        let m: usize = parse_int(get(0), "m")?;
        let r2 = r2_cols
            .iter()
            .take(m)
            .map(|&c| parse_float(rec.get(c).unwrap_or(""), "r2"))
            .collect::<Result<Vec<_>>>()?;
        rows.push(ResultRow {
            m,
            n: parse_int(get(1), "n")?,
            delta: parse_float(get(2), "delta")?,
            method: Method::parse(get(3))?,
            sweep_value: parse_float(get(5), "sweep_value")?,
            trial: parse_int(get(6), "trial")?,
            seed: parse_int(get(7), "seed")?,
            rel_revenue: parse_float(get(8), "rel_revenue")?,
            avg_width: parse_float(get(9), "avg_width")?,
            time_bounds_s: parse_float(get(10), "time_bounds_s")?,
            r2,
            widths: Vec::new(),
        });
    }
    Ok(rows)
}

/// Per-item `(R², width)` pairs for scatter plots, one line per item.
pub fn write_scatter_csv<W: Write>(out: W, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "m",
        "n",
        "delta",
        "method",
        "sweep_param",
        "sweep_value",
        "trial",
        "item",
        "r2",
        "width",
    ])?;
    for row in rows {
        for (j, width) in row.widths.iter().enumerate() {
            let r2 = row.r2.get(j).copied().unwrap_or(f64::NAN);
            if r2.is_nan() {
                continue;
            }
            w.write_record([
                row.m.to_string(),
                row.n.to_string(),
                fmt_float(row.delta),
                row.method.name().to_string(),
                row.method.sweep_param().to_string(),
                fmt_float(row.sweep_value),
                row.trial.to_string(),
                j.to_string(),
                fmt_float(r2),
                fmt_float(*width),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io("scatter csv", e))?;
    Ok(())
}
