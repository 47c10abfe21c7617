//! CSV exchange of datasets and ground-truth coefficients.
//!
//! Datasets are long-format, one line per `(instance, item)`:
//! `trial,i,item,price,demand`. Several trials may share a file. Ground
//! truth is `item,ell,theta` with `ell = 0` the intercept and `ell = k` the
//! effect of item `k − 1`'s price.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CoeffMatrix, PriceDemandDataset};

#[derive(Debug, Serialize, Deserialize)]
struct Cell {
    trial: usize,
    i: usize,
    item: usize,
    price: f64,
    demand: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct CoeffEntry {
    item: usize,
    ell: usize,
    theta: f64,
}

pub fn write_datasets_csv<W: Write>(
    out: W,
    datasets: &[(usize, &PriceDemandDataset)],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for &(trial, data) in datasets {
        for i in 0..data.n() {
            for (item, (&price, &demand)) in data.price(i).iter().zip(data.demand(i)).enumerate() {
                w.serialize(Cell {
                    trial,
                    i,
                    item,
                    price,
                    demand,
                })?;
            }
        }
    }
    w.flush().map_err(|e| Error::io("dataset csv", e))
}

/// Reads every trial in the file, keyed by trial id. Each trial must list
/// every `(i, item)` cell of a dense `n × m` table exactly once, in any
/// order.
pub fn read_datasets_csv<R: Read>(input: R) -> Result<BTreeMap<usize, PriceDemandDataset>> {
    let mut cells: BTreeMap<usize, BTreeMap<(usize, usize), (f64, f64)>> = BTreeMap::new();
    for rec in csv::Reader::from_reader(input).deserialize::<Cell>() {
        let c = rec?;
        let prior = cells
            .entry(c.trial)
            .or_default()
            .insert((c.i, c.item), (c.price, c.demand));
        if prior.is_some() {
            return Err(Error::Config(format!(
                "trial {} lists instance {} item {} twice",
                c.trial, c.i, c.item
            )));
        }
    }
    let mut out = BTreeMap::new();
    for (trial, table) in cells {
        let n = table.keys().map(|k| k.0).max().map_or(0, |v| v + 1);
        let m = table.keys().map(|k| k.1).max().map_or(0, |v| v + 1);
        if table.len() != n * m {
            return Err(Error::Config(format!(
                "trial {trial}: {} cells do not fill a {n} x {m} table",
                table.len()
            )));
        }
        // BTreeMap order is row-major in (i, item).
        let (prices, demands) = table.into_values().unzip();
        out.insert(trial, PriceDemandDataset::new(m, prices, demands)?);
    }
    Ok(out)
}

pub fn write_ground_truth_csv<W: Write>(out: W, theta: &CoeffMatrix) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for item in 0..theta.m() {
        for ell in 0..=theta.m() {
            w.serialize(CoeffEntry {
                item,
                ell,
                theta: theta.get(item, ell),
            })?;
        }
    }
    w.flush().map_err(|e| Error::io("ground truth csv", e))
}

pub fn read_ground_truth_csv<R: Read>(input: R) -> Result<CoeffMatrix> {
    let mut entries: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for rec in csv::Reader::from_reader(input).deserialize::<CoeffEntry>() {
        let e = rec?;
        if entries.insert((e.item, e.ell), e.theta).is_some() {
            return Err(Error::Config(format!(
                "coefficient ({}, {}) listed twice",
                e.item, e.ell
            )));
        }
    }
    let m = entries.keys().map(|k| k.0).max().map_or(0, |v| v + 1);
    if m == 0 || entries.len() != m * (m + 1) || entries.keys().any(|k| k.1 > m) {
        return Err(Error::Config(format!(
            "{} coefficients do not form an {m}-item model",
            entries.len()
        )));
    }
    CoeffMatrix::new(m, entries.into_values().collect())
}
