//! Monte Carlo engine for the corridor hedging strategies: exact GBM paths
//! absorbed at the corridor edges, the five single-rebalance strategies,
//! tracking-error statistics and brute-force oracles for the analytic layer.
//!
//! Every estimate is a deterministic function of `(seed, n_paths, dt)`:
//! per-path streams are fixed by [`rng`], paths are evaluated in parallel and
//! reduced sequentially in path order.

pub mod compare;
pub mod config;
pub mod error;
pub mod oracle;
pub mod path;
pub mod rng;
pub mod stats;
pub mod strategy;
pub mod superhedge;

pub use compare::{compare, csv_string, write_csv, CompareRow, Sweep, CSV_HEADER};
pub use config::{with_threads, SimConfig, TRUNCATION};
pub use error::{Result, SimError};
pub use oracle::{mc_functional, mc_stopping_cost, mc_threshold_grid, Stop, StoppingRule, ThresholdGrid};
pub use path::{simulate_exit, Exit, Side};
pub use stats::{Estimate, Moments};
pub use strategy::{
    estimate, estimate_all, path_errors, run_strategy, simulate_path, PathOutcome, Plans,
    StrategyStats, STRATEGIES,
};
pub use superhedge::{
    mc_half_line_payoff, simulate_superhedge, SuperhedgeReport, QUANTILE_LEVELS,
};
