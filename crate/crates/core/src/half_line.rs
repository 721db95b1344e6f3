//! Corridors without an upper edge (`b = ∞`): the zero-mean formulation with
//! a one-sided boundary and the superhedge built from a price threshold.

use crate::boundary::Candidate;
use crate::error::{Error, Result};
use crate::market::{FundamentalPair, MarketParams};
use crate::numerics::{brent, PowerTerm};
use crate::scalar::{pow, Real};

/// `E_x[∫_0^{τ_a} e^{-2ru} g(S_u) du]` on `(a, ∞)` for a power-law source.
///
/// Each term `c·z^p` needs `q₂ + p + d - 2 < -1` for the tail integral against
/// the speed density to converge.
pub fn half_line_resolvent<T: Real>(
    x: T,
    g: &[PowerTerm<T>],
    a: T,
    p: &MarketParams<T>,
) -> Result<T> {
    let pair = FundamentalPair::half_line(a, p);
    let m = p.speed_term();
    let phi = PowerTerm::new(T::one(), p.q2());
    let mut lower = T::zero();
    let mut upper = T::zero();
    for t in g {
        let tm = t.times(&m);
        let tail = phi.times(&tm);
        if !(tail.power < -T::one()) {
            return Err(Error::DivergentIntegral {
                exponent: tail.power.to_f64_lossy(),
            });
        }
        // ∫_x^∞ z^e dz = -x^{e+1}/(e+1)
        upper = upper - tail.coef * pow(x, tail.power + T::one()) / (tail.power + T::one());
        for s in pair.psi_terms() {
            lower = lower + s.times(&tm).integral(a, x);
        }
    }
    Ok((pair.phi(x) * lower + pair.psi(x) * upper) / pair.wronskian())
}

/// `M∞(x) = E_x[∫_0^{τ_a} e^{-2ru}(P'(S_u))²σ²S_u² du]` in closed form:
/// `u(x) - u(a)(x/a)^{q₂}` with `u(x) = -d⁻²â^{2+2d}x^{-2d}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfLinePayoff<T> {
    market: MarketParams<T>,
    a: T,
    particular: PowerTerm<T>,
    homogeneous: PowerTerm<T>,
}

impl<T: Real> HalfLinePayoff<T> {
    pub fn new(a: T, p: &MarketParams<T>) -> Result<Self> {
        let slack = p.a_hat() * T::tol(1e-12);
        if !(a >= p.a_hat() - slack) || !a.is_finite() {
            return Err(Error::InvalidParameter {
                name: "a",
                value: a.to_f64_lossy(),
                reason: "lower threshold must satisfy a >= exercise boundary",
            });
        }
        let a = a.max(p.a_hat());
        let d = p.d();
        let two = T::lit(2.0);
        let source = PowerTerm::new(
            p.sigma() * p.sigma() * pow(p.a_hat(), two + two * d),
            -two * d,
        );
        // convergence check on the actual source term
        half_line_resolvent(a, &[source], a, p)?;
        let particular = PowerTerm::new(-pow(p.a_hat(), two + two * d) / (d * d), -two * d);
        let homogeneous = PowerTerm::new(-particular.eval(a) * pow(a, -p.q2()), p.q2());
        Ok(Self {
            market: *p,
            a,
            particular,
            homogeneous,
        })
    }

    pub fn a(&self) -> T {
        self.a
    }
    pub fn market(&self) -> &MarketParams<T> {
        &self.market
    }

    /// `n`-th derivative of `M∞`.
    pub fn derivative(&self, n: usize, x: T) -> T {
        let nth = |t: &PowerTerm<T>| {
            let mut c = t.coef;
            let mut q = t.power;
            for _ in 0..n {
                c = c * q;
                q = q - T::one();
            }
            c * pow(x, q)
        };
        nth(&self.particular) + nth(&self.homogeneous)
    }

    pub fn eval(&self, x: T) -> T {
        if x <= self.a {
            return T::zero();
        }
        self.derivative(0, x)
    }

    /// Source `(P')²σ²x²` as a power term (valid on `[â, ∞)`).
    pub fn source(&self) -> PowerTerm<T> {
        let p = &self.market;
        let two = T::lit(2.0);
        PowerTerm::new(
            p.sigma() * p.sigma() * pow(p.a_hat(), two + two * p.d()),
            -two * p.d(),
        )
    }
}

/// `G∞(x, h) = σ²x²h(h - 2P'(x))`.
pub fn sign_function_infinite<T: Real>(x: T, h: T, p: &MarketParams<T>) -> T {
    p.sigma() * p.sigma() * x * x * h * (h - T::lit(2.0) * p.delta(x))
}

/// `M∞(x)` for `x ≥ a`.
pub fn payoff_infinite<T: Real>(x: T, a: T, p: &MarketParams<T>) -> Result<T> {
    let m = HalfLinePayoff::new(a, p)?;
    if !(x >= m.a()) {
        return Err(Error::Domain {
            what: "spot",
            value: x.to_f64_lossy(),
            lower: m.a().to_f64_lossy(),
            upper: f64::INFINITY,
        });
    }
    Ok(m.eval(x))
}

/// Continuation set `(a, x*)`; rebalancing clears the stock position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfLineSolution<T> {
    pub h: T,
    pub x_star: T,
    pub c1: T,
    pub c2: T,
    /// Unique root `x_p(h/2)` of `G∞(·, h)`.
    pub x_g: T,
    candidate: Candidate<T>,
    payoff: HalfLinePayoff<T>,
}

impl<T: Real> HalfLineSolution<T> {
    /// Holding after the rebalance.
    pub fn post_trade_holding(&self) -> T {
        T::zero()
    }

    pub fn value(&self, x: T) -> T {
        if x > self.payoff.a() && x < self.x_star {
            self.candidate.eval(x)
        } else {
            self.payoff.eval(x)
        }
    }

    pub fn payoff(&self) -> &HalfLinePayoff<T> {
        &self.payoff
    }
}

/// Solve `v(a) = 0`, `v(x*) = M∞(x*)`, `v'(x*) = M∞'(x*)`.
pub fn solve_boundary_infinite<T: Real>(
    h: T,
    a: T,
    p: &MarketParams<T>,
) -> Result<HalfLineSolution<T>> {
    let payoff = HalfLinePayoff::new(a, p)?;
    let a = payoff.a();
    let lo = p.delta(a);
    if h == T::zero() {
        return Err(Error::Degenerate(
            "h = 0 makes the sign function vanish identically; stop immediately",
        ));
    }
    if !(h >= lo - T::tol(1e-12) && h < T::zero()) {
        return Err(Error::Domain {
            what: "holding",
            value: h.to_f64_lossy(),
            lower: lo.to_f64_lossy(),
            upper: 0.0,
        });
    }
    let x_g = p.delta_inverse(h * T::lit(0.5))?;
    let candidate = |x: T| Candidate::matching(h, a, T::zero(), x, payoff.eval(x), p);
    let residual = |x: T| candidate(x).derivative(1, x) - payoff.derivative(1, x);

    let mut hi = x_g * T::lit(2.0);
    let mut tries = 0;
    while residual(hi) >= T::zero() {
        hi = hi * T::lit(2.0);
        tries += 1;
        if tries > 60 || !hi.is_finite() {
            return Err(Error::NoBracket {
                what: "half-line boundary",
                lower: x_g.to_f64_lossy(),
                upper: hi.to_f64_lossy(),
                f_lower: residual(x_g).to_f64_lossy(),
                f_upper: residual(hi).to_f64_lossy(),
            });
        }
    }
    let x_star = brent(residual, x_g, hi, T::tol(1e-13) * hi, "half-line boundary")?;
    let v = candidate(x_star);
    let sol = HalfLineSolution {
        h,
        x_star,
        c1: v.c1(),
        c2: v.c2(),
        x_g,
        candidate: v,
        payoff,
    };

    let scale = payoff.eval(x_star).abs().max(T::tol(1e-300));
    let fail = |reason, worst: T| Error::VerificationFailed {
        h: h.to_f64_lossy(),
        x1: a.to_f64_lossy(),
        x2: x_star.to_f64_lossy(),
        reason,
        worst: worst.to_f64_lossy(),
    };
    let slope = payoff.derivative(1, x_star);
    let paste = (v.derivative(1, x_star) - slope).abs() / slope.abs().max(scale / x_star);
    if paste > T::tol(1e-7) {
        return Err(fail("smooth pasting", paste));
    }
    let n = 512;
    for i in 1..=n {
        let x = a + (x_star - a) * T::lit(i as f64 / (n as f64 + 1.0));
        let e = v.eval(x) - payoff.eval(x);
        if e > T::tol(1e-8) * scale {
            return Err(fail("candidate exceeds stopping payoff", e));
        }
    }
    Ok(sol)
}

/// Static superhedge: hold `P'(a)` until the discounted price first drops to
/// `ŝ`, then switch to `P(a)/a` shares with no bond.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperhedgePlan<T> {
    pub x: T,
    pub a: T,
    /// Initial holding `P'(a)`.
    pub h: T,
    /// Initial bond `P(x) - P'(a)x`.
    pub m0: T,
    /// Discounted-price threshold `m₀/(P(a)/a - P'(a))`.
    pub s_hat: T,
    /// Post-trade holding `P(a)/a`.
    pub h1: T,
}

pub fn superhedge_plan<T: Real>(x: T, a: T, p: &MarketParams<T>) -> Result<SuperhedgePlan<T>> {
    let slack = p.a_hat() * T::tol(1e-12);
    if !(a >= p.a_hat() - slack) || !a.is_finite() {
        return Err(Error::InvalidParameter {
            name: "a",
            value: a.to_f64_lossy(),
            reason: "lower threshold must satisfy a >= exercise boundary",
        });
    }
    let a = a.max(p.a_hat());
    if !(x > a) || !x.is_finite() {
        return Err(Error::Domain {
            what: "spot",
            value: x.to_f64_lossy(),
            lower: a.to_f64_lossy(),
            upper: f64::INFINITY,
        });
    }
    let h = p.delta(a);
    let h1 = p.price(a) / a;
    let m0 = p.price(x) - h * x;
    let s_hat = m0 / (h1 - h);
    let plan = SuperhedgePlan {
        x,
        a,
        h,
        m0,
        s_hat,
        h1,
    };
    if !(m0 > T::zero() && s_hat < x && s_hat > a) {
        return Err(Error::Numerical(format!(
            "superhedge inequalities fail: m0 = {}, s_hat = {}, a = {}, x = {}",
            m0.to_f64_lossy(),
            s_hat.to_f64_lossy(),
            a.to_f64_lossy(),
            x.to_f64_lossy()
        )));
    }
    Ok(plan)
}
