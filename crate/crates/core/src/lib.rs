//! Variance-optimal single-rebalance hedging of a perpetual American put
//! under Black-Scholes dynamics.
//!
//! The analytic layer is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below are what most callers want.

pub mod boundary;
pub mod error;
pub mod half_line;
pub mod holding;
pub mod market;
pub mod numerics;
pub mod payoff;
mod scalar;

pub use boundary::{
    boundary_curvature, boundary_curves, candidate_value, particular_terms, solve_boundaries,
    solve_with, value, BoundaryCurves, BoundarySolution, Candidate, CurveRow,
};
pub use error::{Error, Result};
pub use half_line::{
    payoff_infinite, sign_function_infinite, solve_boundary_infinite, superhedge_plan,
    HalfLinePayoff, HalfLineSolution, SuperhedgePlan,
};
pub use holding::{
    dV_dh, gamma_hat, optimal_initial_holding, scalar_value, HedgePlan, HoldingOptimizer,
};
pub use market::{
    characteristic_roots, put_delta, put_price, resolvent, Corridor, FundamentalPair,
    MarketParams, Source,
};
pub use payoff::{
    classify_case, gamma_functions, gamma_post_trade, running_cost, sign_function,
    stopping_payoff, x_gamma, x_p, Case, CaseClassification, CorridorPayoff, GammaCoefficients,
    PayoffJet, PostTrade,
};
pub use scalar::Real;

pub type Market64 = MarketParams<f64>;
pub type Corridor64 = Corridor<f64>;
pub type Payoff64 = CorridorPayoff<f64>;
pub type Market32 = MarketParams<f32>;
pub type Corridor32 = Corridor<f32>;
