//! Price ranges for data-driven multi-item price optimization.
//!
//! A linear demand model is fitted by least squares to historical
//! `(prices, demands)` observations and the fitted revenue is maximized over
//! a box of admissible prices. How wide that box should be is the question
//! this crate answers, with three estimators:
//!
//! * [`bounds::quantile_bounds`]: central quantiles of the observed prices.
//! * [`bounds::bootstrap_bounds`]: mean ± `κ`·sd of the optimal prices over
//!   bootstrap refits.
//! * [`bounds::cv_bounds_search`]: the box maximizing a K-fold
//!   cross-validated revenue estimate under a total-width budget, searched
//!   with a box-constrained Nelder–Mead.
//!
//! [`synthetic`] generates ground-truth instances at a controlled noise
//! level, [`evaluation`] scores estimated boxes against the truth, and
//! [`harness`] runs seeded experiment grids.
//!
//! ```
//! use pricebounds::bounds::{bootstrap_bounds, BootstrapConfig};
//! use pricebounds::model::Envelope;
//! use pricebounds::optimizer::QpSolverConfig;
//! use pricebounds::synthetic::{generate_dataset, SyntheticSpec};
//!
//! let (_, data) = generate_dataset(&SyntheticSpec::new(2, 200, 0.5, 7)).unwrap();
//! let env = Envelope::uniform(2, 0.5, 1.1).unwrap();
//! let cfg = BootstrapConfig { n_bootstrap: 20, kappa: 1.645 };
//! let bounds = bootstrap_bounds(&data, &env, &cfg, &QpSolverConfig::default(), 1).unwrap();
//! assert!(bounds.total_width() <= env.width(0) + env.width(1));
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod dataset_csv;
pub mod error;
pub mod evaluation;
pub mod harness;
pub mod model;
pub mod nelder_mead;
pub mod ols;
pub mod optimizer;
pub mod seed;
pub mod synthetic;

pub use error::{Error, Result};
pub use model::{CoeffMatrix, Envelope, PriceBox, PriceDemandDataset};
