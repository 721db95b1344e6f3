//! Half-line (`b = ∞`) simulations: the static superhedge and the
//! zero-mean stopping payoff.

use corridor_hedge::{superhedge_plan, SuperhedgePlan};
use rayon::prelude::*;

use crate::config::SimConfig;
use crate::error::Result;
use crate::oracle::mc_functional;
use crate::path::{first_event, Monitor, Stepper};
use crate::stats::{Estimate, Moments};

/// Discounted tracking error of one superhedge path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperhedgePath {
    /// Rebalance time `τ*` (first time `e^{-rt}S_t ≤ ŝ`), if before the cap.
    pub tau_star: Option<f64>,
    /// `τ_a`, if before the cap.
    pub tau_a: Option<f64>,
    /// Discounted portfolio minus discounted option price at `min(τ_a, T)`.
    pub error: f64,
    /// `τ_a` was detected in a step where `τ*` had not fired yet; `τ*` is then
    /// placed at `τ_a`.
    pub forced: bool,
}

/// Summary of a superhedge experiment.
#[derive(Debug, Clone)]
pub struct SuperhedgeReport {
    pub plan: SuperhedgePlan<f64>,
    pub n: usize,
    /// Paths with `τ* ≤ T`.
    pub tau_star_hits: usize,
    /// Paths with `τ_a ≤ T`.
    pub tau_a_hits: usize,
    /// Paths where `τ*` had to be placed at `τ_a`.
    pub forced: usize,
    /// Paths whose error is below `-tolerance`.
    pub negative: usize,
    /// Of those, paths that had rebalanced by the cap.
    pub negative_after_rebalance: usize,
    /// Paths with `τ_a ≤ T` whose error is not zero to within `tolerance`.
    pub nonzero_at_exit: usize,
    pub tolerance: f64,
    pub moments: Moments,
    pub min: f64,
    pub max: f64,
    /// 1%, 5%, 25%, 50%, 75%, 95%, 99% quantiles.
    pub quantiles: [f64; 7],
}

impl SuperhedgeReport {
    pub fn tau_star_frequency(&self) -> f64 {
        self.tau_star_hits as f64 / self.n as f64
    }
}

pub const QUANTILE_LEVELS: [f64; 7] = [0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99];

/// Simulate one path of the static superhedge from `cfg.x` with lower
/// threshold `plan.a` (the corridor's `b` is ignored).
///
/// The discounted bond stays at `m₀` until `τ*`; there the discounted
/// portfolio equals `h₁ŝ` and the position switches to `h₁` shares.
/// `τ*` is a first passage of `ln S` below the line `ln ŝ + rt`, monitored
/// with the same bridge correction as fixed barriers.
pub fn simulate_superhedge_path(index: u64, cfg: &SimConfig, plan: &SuperhedgePlan<f64>) -> SuperhedgePath {
    let r = cfg.market.r();
    let var = cfg.market.sigma().powi(2) * cfg.dt;
    let ln_hat = plan.s_hat.ln();
    let mut st = Stepper::new(cfg, index, cfg.x);
    let mut mon = Monitor::new(&[plan.a], &[], cfg.bridge);
    let mut events = Vec::with_capacity(1);
    let mut tau_star: Option<f64> = None;
    mon.start(st.y, &mut events);
    let discounted_price = |t: f64, s: f64| (-r * t).exp() * cfg.market.price(s);

    loop {
        if let Some(e) = first_event(&events) {
            let forced = tau_star.is_none();
            let ts = tau_star.unwrap_or(e.t);
            let disc = (-r * e.t).exp();
            // h₁ shares of the discounted price `e^{-rτ}a`, no bond
            let port = plan.h1 * disc * plan.a;
            return SuperhedgePath {
                tau_star: Some(ts),
                tau_a: Some(e.t),
                error: port - discounted_price(e.t, plan.a),
                forced,
            };
        }
        if st.t >= cfg.t_max {
            let s = st.y.exp();
            let s_disc = (-r * st.t).exp() * s;
            let port = match tau_star {
                Some(_) => plan.h1 * s_disc,
                None => plan.m0 + plan.h * s_disc,
            };
            return SuperhedgePath {
                tau_star,
                tau_a: None,
                error: port - discounted_price(st.t, s),
                forced: false,
            };
        }
        let (y0, y1, t0) = st.step();
        if tau_star.is_none() {
            let d0 = y0 - (ln_hat + r * t0);
            let d1 = y1 - (ln_hat + r * st.t);
            if d1 <= 0.0 {
                tau_star = Some(t0 + st.dt() * d0 / (d0 - d1));
            } else if cfg.bridge {
                let e = 2.0 * d0 * d1 / var;
                if e < 37.0 && st.uniform() <= (-e).exp() {
                    tau_star = Some(t0 + 0.5 * st.dt());
                }
            }
        }
        mon.advance(&mut st, y0, y1, t0, &mut events);
    }
}

/// Run the superhedge on `cfg.n_paths` paths with lower threshold `a`.
pub fn simulate_superhedge(cfg: &SimConfig, a: f64) -> Result<SuperhedgeReport> {
    cfg.validate()?;
    let plan = superhedge_plan(cfg.x, a, &cfg.market)?;
    let paths: Vec<SuperhedgePath> = (0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|i| simulate_superhedge_path(i, cfg, &plan))
        .collect();
    let tolerance = 1e-9 * cfg.market.strike();
    let errors: Vec<f64> = paths.iter().map(|p| p.error).collect();
    let mut sorted = errors.clone();
    sorted.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let pos = p * (sorted.len() - 1) as f64;
        let (i, w) = (pos.floor() as usize, pos.fract());
        let j = (i + 1).min(sorted.len() - 1);
        sorted[i] * (1.0 - w) + sorted[j] * w
    };
    Ok(SuperhedgeReport {
        plan,
        n: paths.len(),
        tau_star_hits: paths.iter().filter(|p| p.tau_star.is_some()).count(),
        tau_a_hits: paths.iter().filter(|p| p.tau_a.is_some()).count(),
        forced: paths.iter().filter(|p| p.forced).count(),
        negative: errors.iter().filter(|&&e| e < -tolerance).count(),
        negative_after_rebalance: paths
            .iter()
            .filter(|p| p.tau_star.is_some() && p.error < -tolerance)
            .count(),
        nonzero_at_exit: paths
            .iter()
            .filter(|p| p.tau_a.is_some() && p.error.abs() > tolerance)
            .count(),
        tolerance,
        moments: Moments::from_slice(&errors),
        min: sorted[0],
        max: sorted[sorted.len() - 1],
        quantiles: QUANTILE_LEVELS.map(q),
    })
}

/// Truncated Monte Carlo of `M∞(x) = E[∫₀^{τ_a∧T} e^{-2ru} P'(S_u)²σ²S_u² du]`.
pub fn mc_half_line_payoff(cfg: &SimConfig, a: f64) -> Result<Estimate> {
    let p = cfg.market;
    let s2 = p.sigma() * p.sigma();
    let [e] = mc_functional(
        cfg,
        a,
        f64::INFINITY,
        2.0 * p.r(),
        |s| {
            let d = p.delta(s);
            [d * d * s2 * s * s]
        },
        |_| [0.0],
    )?;
    Ok(e)
}
