//! Optimal initial holding: the fixed point `h* = Γ̂_{h*}(x)`.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::boundary::{solve_with, BoundarySolution};
use crate::error::{Error, Result};
use crate::market::{Corridor, MarketParams};
use crate::numerics::brent;
use crate::payoff::CorridorPayoff;
use crate::scalar::Real;

/// Points of the holding scan.
pub const HOLDING_SCAN: usize = 256;
const MEMO_QUANTUM: f64 = 1e-12;

/// Boundary solves for one (corridor, market) pair, memoised by holding.
///
/// The cache sits behind a mutex so a shared optimizer can be queried from
/// several threads; results do not depend on the order of queries.
#[derive(Debug)]
pub struct HoldingOptimizer<T: Real> {
    payoff: CorridorPayoff<T>,
    cache: Mutex<HashMap<i64, BoundarySolution<T>>>,
}

/// Optimal initial position at one spot.
#[derive(Debug, Clone)]
pub struct HedgePlan<T: Real> {
    pub x: T,
    pub h_star: T,
    pub solution: BoundarySolution<T>,
    /// `𝒱(x) = V(x, h*)`.
    pub value: T,
    /// `|h* - Γ̂_{h*}(x)|`.
    pub residual: T,
    /// Every fixed point found by the scan (ascending), `h*` among them.
    pub fixed_points: Vec<T>,
    payoff: CorridorPayoff<T>,
}

impl<T: Real> HedgePlan<T> {
    /// Post-trade holding `Γ(s)` on the full corridor.
    pub fn post_trade(&self, s: T) -> T {
        self.payoff.post_trade(s)
    }
    pub fn payoff(&self) -> &CorridorPayoff<T> {
        &self.payoff
    }
    pub fn lower_trigger(&self) -> T {
        self.solution.x1
    }
    pub fn upper_trigger(&self) -> T {
        self.solution.x2
    }
}

impl<T: Real> HoldingOptimizer<T> {
    pub fn new(c: &Corridor<T>, p: &MarketParams<T>) -> Result<Self> {
        Ok(Self::from_payoff(CorridorPayoff::new(c, p)?))
    }

    pub fn from_payoff(payoff: CorridorPayoff<T>) -> Self {
        Self {
            payoff,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn payoff(&self) -> &CorridorPayoff<T> {
        &self.payoff
    }

    /// Holding range `[P'(a), P'(b)]`.
    pub fn holding_range(&self) -> (T, T) {
        let c = self.payoff.corridor();
        let p = self.payoff.market();
        (p.delta(c.a()), p.delta(c.b()))
    }

    /// Boundary solution at `h`, memoised.
    pub fn solve(&self, h: T) -> Result<BoundarySolution<T>> {
        let key = (h.to_f64_lossy() / MEMO_QUANTUM).round() as i64;
        if let Some(s) = self.cache.lock().unwrap().get(&key) {
            return Ok(s.clone());
        }
        let sol = solve_with(h, &self.payoff)?;
        self.cache.lock().unwrap().insert(key, sol.clone());
        Ok(sol)
    }

    fn sub_payoff(&self, sol: &BoundarySolution<T>) -> Result<CorridorPayoff<T>> {
        let c = self.payoff.corridor();
        if sol.x1 == c.a() && sol.x2 == c.b() {
            return Ok(self.payoff.clone());
        }
        CorridorPayoff::new(&Corridor::sub(sol.x1, sol.x2), self.payoff.market())
    }

    /// `(γ̂₁(x), Γ̂_h(x))` on the continuation set of `h`; `None` outside it.
    fn hat(&self, x: T, sol: &BoundarySolution<T>) -> Result<Option<(T, T)>> {
        if !(x >= sol.x1 && x <= sol.x2) {
            return Ok(None);
        }
        let sub = self.sub_payoff(sol)?;
        let g1 = if x == sol.x1 || x == sol.x2 {
            T::zero()
        } else {
            sub.gammas(x)[0]
        };
        Ok(Some((g1, sub.post_trade(x))))
    }

    /// `Γ̂_h(x)`: Γ computed on `(x₁*(h), x₂*(h))`.
    pub fn gamma_hat(&self, x: T, h: T) -> Result<T> {
        let sol = self.solve(h)?;
        match self.hat(x, &sol)? {
            Some((_, g)) => Ok(g),
            None => Err(Error::Domain {
                what: "spot (stopping region)",
                value: x.to_f64_lossy(),
                lower: sol.x1.to_f64_lossy(),
                upper: sol.x2.to_f64_lossy(),
            }),
        }
    }

    /// `∂ₕV(x, h) = 2γ̂₁(x)(h - Γ̂_h(x))`, zero in the stopping region.
    pub fn dv_dh(&self, x: T, h: T) -> Result<T> {
        let sol = self.solve(h)?;
        Ok(match self.hat(x, &sol)? {
            Some((g1, g)) if sol.continues(x) => T::lit(2.0) * g1 * (h - g),
            _ => T::zero(),
        })
    }

    /// `V(x, h)`.
    pub fn value(&self, x: T, h: T) -> Result<T> {
        Ok(self.solve(h)?.value(x, &self.payoff))
    }

    /// `h - Γ̂_h(x)`, `None` when `x` is in the stopping region of `h`.
    fn gap(&self, x: T, h: T) -> Result<Option<T>> {
        let sol = self.solve(h)?;
        if !sol.continues(x) {
            return Ok(None);
        }
        Ok(self.hat(x, &sol)?.map(|(_, g)| h - g))
    }

    /// Scan `h ↦ h - Γ̂_h(x)` over the interior of the holding range, refine
    /// every sign change and keep the root with the smallest `V(x, ·)`.
    pub fn optimal_initial_holding(&self, x: T) -> Result<HedgePlan<T>> {
        let c = self.payoff.corridor();
        c.require_open(x, "spot")?;
        let (lo, hi) = self.holding_range();
        let n = HOLDING_SCAN;
        let step = (hi - lo) / T::lit(n as f64 + 1.0);
        let mut prev: Option<(T, T)> = None;
        let mut roots = Vec::new();
        for i in 1..=n {
            let h = lo + step * T::lit(i as f64);
            let Some(g) = self.gap(x, h)? else {
                prev = None;
                continue;
            };
            if g == T::zero() {
                roots.push(h);
            } else if let Some((hp, gp)) = prev {
                if gp.signum() != g.signum() && gp != T::zero() {
                    roots.push(self.refine(x, hp, h)?);
                }
            }
            prev = Some((h, g));
        }
        if roots.is_empty() {
            return Err(Error::Numerical(format!(
                "no fixed point of h - Γ̂_h({}) on the holding range",
                x.to_f64_lossy()
            )));
        }
        let mut best: Option<(T, T)> = None;
        for &h in &roots {
            let v = self.value(x, h)?;
            if best.map_or(true, |(_, bv)| v < bv) {
                best = Some((h, v));
            }
        }
        let (h_star, value) = best.unwrap();
        let solution = self.solve(h_star)?;
        let residual = self.gap(x, h_star)?.map_or(T::infinity(), |g| g.abs());
        Ok(HedgePlan {
            x,
            h_star,
            solution,
            value,
            residual,
            fixed_points: roots,
            payoff: self.payoff.clone(),
        })
    }

    fn refine(&self, x: T, lo: T, hi: T) -> Result<T> {
        let f = |h: T| match self.gap(x, h) {
            Ok(Some(g)) => g,
            _ => T::nan(),
        };
        brent(f, lo, hi, T::tol(1e-14), "fixed point")
    }

    /// `𝒱(x) = inf_h V(x, h)`, zero at the corridor edges.
    pub fn scalar_value(&self, x: T) -> Result<T> {
        let c = self.payoff.corridor();
        c.require_closed(x, "spot")?;
        if x == c.a() || x == c.b() {
            return Ok(T::zero());
        }
        Ok(self.optimal_initial_holding(x)?.value)
    }
}

pub fn gamma_hat<T: Real>(x: T, h: T, c: &Corridor<T>, p: &MarketParams<T>) -> Result<T> {
    HoldingOptimizer::new(c, p)?.gamma_hat(x, h)
}

#[allow(non_snake_case)]
pub fn dV_dh<T: Real>(x: T, h: T, c: &Corridor<T>, p: &MarketParams<T>) -> Result<T> {
    c.require_open(x, "spot")?;
    HoldingOptimizer::new(c, p)?.dv_dh(x, h)
}

pub fn optimal_initial_holding<T: Real>(
    x: T,
    c: &Corridor<T>,
    p: &MarketParams<T>,
) -> Result<HedgePlan<T>> {
    HoldingOptimizer::new(c, p)?.optimal_initial_holding(x)
}

pub fn scalar_value<T: Real>(x: T, c: &Corridor<T>, p: &MarketParams<T>) -> Result<T> {
    HoldingOptimizer::new(c, p)?.scalar_value(x)
}
