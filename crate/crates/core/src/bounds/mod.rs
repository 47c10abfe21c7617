//! Price-bound estimators: the bootstrap interval around optimal prices, the
//! cross-validated Nelder–Mead search, and the historical-quantile baseline.

pub mod bootstrap;
pub mod cv;
pub mod quantile;

pub use bootstrap::{
    bootstrap_bounds, bootstrap_replicates, kappa_for_confidence, BootstrapConfig,
    BootstrapReplicates,
};
pub use cv::{
    cv_bounds_search, cv_bounds_search_detailed, cv_penalized_objective, cv_revenue_estimate,
    fold_partition, penalty, project_to_feasible, CvConfig, CvRevenueEstimator, CvSearchResult,
};
pub use quantile::{quantile_bounds, QuantileConfig};
