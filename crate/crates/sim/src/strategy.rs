//! The five single-rebalance hedging strategies and their tracking errors.

use corridor_hedge::{HedgePlan, HoldingOptimizer, Payoff64};
use rayon::prelude::*;

use crate::config::SimConfig;
use crate::error::{Result, SimError};
use crate::path::{Exit, Monitor, Side, Stepper};
use crate::stats::Moments;

/// Strategies 1-3 rebalance once; 4 and 5 are static.
pub const STRATEGIES: [u8; 5] = [1, 2, 3, 4, 5];

/// Inputs shared by every path of one experiment.
#[derive(Debug, Clone)]
pub struct Plans {
    pub x: f64,
    pub price: f64,
    /// Initial holding per strategy.
    pub initial: [f64; 5],
    /// Rebalance triggers `(lower, upper)` in price for strategies 1-3.
    pub triggers: [(f64, f64); 3],
    /// Post-trade holding at the lower and upper trigger for strategies 1-3.
    pub post_trade: [(f64, f64); 3],
    pub hedge: HedgePlan<f64>,
}

impl Plans {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        let opt = HoldingOptimizer::new(&cfg.corridor, &cfg.market)?;
        Self::with_optimizer(cfg, &opt)
    }

    pub fn with_optimizer(cfg: &SimConfig, opt: &HoldingOptimizer<f64>) -> Result<Self> {
        let p = &cfg.market;
        let (a, b, x) = (cfg.corridor.a(), cfg.corridor.b(), cfg.x);
        if !(x > a && x < b) {
            return Err(SimError::Config(format!("spot {x} must lie inside ({a}, {b})")));
        }
        let hedge = opt.optimal_initial_holding(x)?;
        let payoff: &Payoff64 = opt.payoff();
        let delta_x = p.delta(x);
        let gamma_x = payoff.post_trade(x);

        let t1 = (hedge.solution.x1, hedge.solution.x2);
        let t2 = (0.5 * (a + x), 0.5 * (b + x));
        let t3 = (
            p.delta_inverse(0.5 * (p.delta(a) + delta_x))?,
            p.delta_inverse(0.5 * (p.delta(b) + delta_x))?,
        );
        let post1 = (payoff.post_trade(t1.0), payoff.post_trade(t1.1));
        let post2 = (p.delta(t2.0), p.delta(t2.1));
        let post3 = (p.delta(t3.0), p.delta(t3.1));
        Ok(Self {
            x,
            price: p.price(x),
            initial: [hedge.h_star, delta_x, delta_x, gamma_x, delta_x],
            triggers: [t1, t2, t3],
            post_trade: [post1, post2, post3],
            hedge,
        })
    }
}

/// Corridor exit plus the first trigger exit of each rebalancing strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathOutcome {
    pub exit: Exit,
    pub triggers: [Option<(f64, Side)>; 3],
}

/// Simulate one path against all barriers of the experiment.
pub fn simulate_path(index: u64, cfg: &SimConfig, plans: &Plans) -> PathOutcome {
    let (a, b) = (cfg.corridor.a(), cfg.corridor.b());
    // owner 3 is the corridor itself
    let mut lower: Vec<(f64, usize)> = vec![(a, 3)];
    let mut upper: Vec<(f64, usize)> = vec![(b, 3)];
    for (k, &(l, u)) in plans.triggers.iter().enumerate() {
        lower.push((l, k));
        upper.push((u, k));
    }
    // outer barrier last among equal levels
    lower.sort_by(|p, q| q.0.total_cmp(&p.0).then(p.1.cmp(&q.1)));
    upper.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)));
    let lv: Vec<f64> = lower.iter().map(|l| l.0).collect();
    let uv: Vec<f64> = upper.iter().map(|l| l.0).collect();

    let mut st = Stepper::new(cfg, index, cfg.x);
    let mut mon = Monitor::new(&lv, &uv, cfg.bridge);
    let mut triggers = [None; 3];
    let mut events = Vec::with_capacity(8);
    mon.start(st.y, &mut events);
    loop {
        events.sort_by(|p, q| p.t.total_cmp(&q.t));
        for e in events.drain(..) {
            let owner = match e.side {
                Side::Lower => lower[e.index].1,
                Side::Upper => upper[e.index].1,
            };
            if owner == 3 {
                let s = if e.side == Side::Lower { a } else { b };
                return PathOutcome {
                    exit: Exit {
                        tau: e.t,
                        side: e.side,
                        s,
                        censored: false,
                    },
                    triggers,
                };
            }
            if triggers[owner].is_none() {
                triggers[owner] = Some((e.t, e.side));
            }
        }
        if st.t >= cfg.t_max {
            return PathOutcome {
                exit: Exit {
                    tau: st.t,
                    side: Side::Upper,
                    s: st.y.exp(),
                    censored: true,
                },
                triggers,
            };
        }
        let (y0, y1, t0) = st.step();
        mon.advance(&mut st, y0, y1, t0, &mut events);
    }
}

/// Discounted tracking error of one strategy on one simulated path:
/// `P(x) + h₀(S̃_c - x) + h₁(S̃_τ - S̃_c) - e^{-rτ}P(S_τ)` with `S̃ = e^{-rt}S`.
pub fn run_strategy(id: u8, path: &PathOutcome, cfg: &SimConfig, plans: &Plans) -> Result<f64> {
    if !(1..=5).contains(&id) {
        return Err(SimError::UnknownStrategy(id));
    }
    let r = cfg.market.r();
    let exit = &path.exit;
    let disc_exit = (-r * exit.tau).exp();
    let s_tau = disc_exit * exit.s;
    let h0 = plans.initial[id as usize - 1];
    let mut err = plans.price - disc_exit * cfg.market.price(exit.s);
    let trade = match id {
        1..=3 => path.triggers[id as usize - 1].filter(|&(t, _)| t <= exit.tau),
        _ => None,
    };
    match trade {
        Some((t, side)) => {
            let k = id as usize - 1;
            let (level, h1) = match side {
                Side::Lower => (plans.triggers[k].0, plans.post_trade[k].0),
                Side::Upper => (plans.triggers[k].1, plans.post_trade[k].1),
            };
            let s_c = (-r * t).exp() * level;
            err += h0 * (s_c - plans.x) + h1 * (s_tau - s_c);
        }
        None => err += h0 * (s_tau - plans.x),
    }
    Ok(err)
}

/// Tracking-error statistics of one strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyStats {
    pub strategy: u8,
    pub n: usize,
    pub seed: u64,
    pub mean: f64,
    pub mean_se: f64,
    pub variance: f64,
    pub var_se: f64,
    pub censored: usize,
}

/// Per-path errors of all five strategies, in path order; `None` for censored paths.
pub fn path_errors(cfg: &SimConfig, plans: &Plans) -> Vec<Option<[f64; 5]>> {
    (0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let path = simulate_path(i, cfg, plans);
            if path.exit.censored {
                return None;
            }
            let mut out = [0.0; 5];
            for id in STRATEGIES {
                out[id as usize - 1] = run_strategy(id, &path, cfg, plans).expect("valid id");
            }
            Some(out)
        })
        .collect()
}

/// Statistics of all five strategies on the same paths.
pub fn estimate_all(cfg: &SimConfig, plans: &Plans) -> Result<[StrategyStats; 5]> {
    cfg.validate()?;
    let errors = path_errors(cfg, plans);
    let censored = errors.iter().filter(|e| e.is_none()).count();
    if censored as f64 > 1e-4 * cfg.n_paths as f64 {
        return Err(SimError::Censoring {
            censored,
            n: cfg.n_paths,
        });
    }
    let mut out = [None; 5];
    for id in STRATEGIES {
        let k = id as usize - 1;
        let v: Vec<f64> = errors.iter().flatten().map(|e| e[k]).collect();
        let m = Moments::from_slice(&v);
        out[k] = Some(StrategyStats {
            strategy: id,
            n: m.n,
            seed: cfg.seed,
            mean: m.mean,
            mean_se: m.mean_se,
            variance: m.variance,
            var_se: m.var_se,
            censored,
        });
    }
    Ok(out.map(|s| s.unwrap()))
}

/// Statistics of a single strategy.
pub fn estimate(id: u8, cfg: &SimConfig, plans: &Plans) -> Result<StrategyStats> {
    if !(1..=5).contains(&id) {
        return Err(SimError::UnknownStrategy(id));
    }
    Ok(estimate_all(cfg, plans)?[id as usize - 1])
}
