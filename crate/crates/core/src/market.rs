//! Black-Scholes perpetual put and the diffusion toolkit for `dS = rS dt + σS dW`
//! killed at the edges of a price corridor.

use crate::error::{Error, Result};
use crate::numerics::{integrate, PowerTerm};
use crate::scalar::{pow, Real};

/// Market data: risk-free rate, volatility and strike of the perpetual put.
///
/// Derived quantities are cached on construction:
/// `d = 2r/σ²`, the exercise boundary `â = K/(1 + 1/d)` and the roots
/// `q₁ > 0 > q₂` of `q² + (d-1)q - 2d = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams<T> {
    r: T,
    sigma: T,
    strike: T,
    d: T,
    a_hat: T,
    q1: T,
    q2: T,
}

impl<T: Real> MarketParams<T> {
    pub fn new(r: T, sigma: T, strike: T) -> Result<Self> {
        for (name, value) in [("r", r), ("sigma", sigma), ("strike", strike)] {
            if !(value > T::zero()) || !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value: value.to_f64_lossy(),
                    reason: "must be positive and finite",
                });
            }
        }
        let two = T::lit(2.0);
        let d = two * r / (sigma * sigma);
        let a_hat = strike / (T::one() + T::one() / d);
        let (q1, q2) = roots_for(d);
        Ok(Self {
            r,
            sigma,
            strike,
            d,
            a_hat,
            q1,
            q2,
        })
    }

    pub fn r(&self) -> T {
        self.r
    }
    pub fn sigma(&self) -> T {
        self.sigma
    }
    pub fn strike(&self) -> T {
        self.strike
    }
    /// `2r/σ²`.
    pub fn d(&self) -> T {
        self.d
    }
    /// Optimal exercise boundary of the perpetual put.
    pub fn a_hat(&self) -> T {
        self.a_hat
    }
    pub fn q1(&self) -> T {
        self.q1
    }
    pub fn q2(&self) -> T {
        self.q2
    }

    /// Put price; assumes `x >= 0`.
    #[inline]
    pub fn price(&self, x: T) -> T {
        if x <= self.a_hat {
            self.strike - x
        } else {
            pow(self.a_hat, T::one() + self.d) * pow(x, -self.d) / self.d
        }
    }

    /// Put delta `max(-(â/x)^{1+d}, -1)`; assumes `x > 0`.
    #[inline]
    pub fn delta(&self, x: T) -> T {
        if x <= self.a_hat {
            -T::one()
        } else {
            -pow(self.a_hat / x, T::one() + self.d)
        }
    }

    /// Second derivative of the put price (zero in the exercise region).
    #[inline]
    pub fn gamma(&self, x: T) -> T {
        if x <= self.a_hat {
            T::zero()
        } else {
            (T::one() + self.d) * pow(self.a_hat / x, T::one() + self.d) / x
        }
    }

    /// `(L - 2r)` applied to a function with the given value and derivatives at `x`,
    /// where `L = ½σ²x²∂ₓₓ + rx∂ₓ`.
    #[inline]
    pub fn killed_generator(&self, x: T, v: T, dv: T, d2v: T) -> T {
        let half = T::lit(0.5);
        half * self.sigma * self.sigma * x * x * d2v + self.r * x * dv - T::lit(2.0) * self.r * v
    }

    /// Scale density `s'(x) = x^{-d}` (normalising constant `c = 1`).
    pub fn scale_density(&self, x: T) -> T {
        pow(x, -self.d)
    }

    /// Speed density `m'(x) = 2x^{d-2}/σ²` (normalising constant `c = 1`).
    pub fn speed_density(&self, x: T) -> T {
        T::lit(2.0) * pow(x, self.d - T::lit(2.0)) / (self.sigma * self.sigma)
    }

    /// Speed density as a power term.
    pub fn speed_term(&self) -> PowerTerm<T> {
        PowerTerm::new(
            T::lit(2.0) / (self.sigma * self.sigma),
            self.d - T::lit(2.0),
        )
    }

    /// Wronskian of the monomial pair `x^{q₂}, x^{q₁}` against the scale density.
    pub fn reference_wronskian(&self) -> T {
        self.q1 - self.q2
    }

    /// Inverse delta on `[â, ∞)`: the unique `x` with `P'(x) = h`, for `h ∈ [-1, 0)`.
    pub fn delta_inverse(&self, h: T) -> Result<T> {
        if !(h >= -T::one() && h < T::zero()) {
            return Err(Error::Domain {
                what: "holding",
                value: h.to_f64_lossy(),
                lower: -1.0,
                upper: 0.0,
            });
        }
        Ok(self.a_hat * pow(-h, -T::one() / (T::one() + self.d)))
    }
}

fn roots_for<T: Real>(d: T) -> (T, T) {
    let half = T::lit(0.5);
    let one_minus_d = T::one() - d;
    let disc = (one_minus_d * one_minus_d + T::lit(8.0) * d).sqrt();
    // q₂ directly; q₁ through Vieta to avoid cancellation when d ≫ 1.
    let q2 = half * (one_minus_d - disc);
    let q1 = -T::lit(2.0) * d / q2;
    (q1, q2)
}

/// Perpetual put price. Errors for negative spot.
pub fn put_price<T: Real>(x: T, p: &MarketParams<T>) -> Result<T> {
    if !(x >= T::zero()) {
        return Err(Error::Domain {
            what: "spot",
            value: x.to_f64_lossy(),
            lower: 0.0,
            upper: f64::INFINITY,
        });
    }
    Ok(p.price(x))
}

/// Perpetual put delta. Errors for non-positive spot.
pub fn put_delta<T: Real>(x: T, p: &MarketParams<T>) -> Result<T> {
    if !(x > T::zero()) {
        return Err(Error::Domain {
            what: "spot",
            value: x.to_f64_lossy(),
            lower: 0.0,
            upper: f64::INFINITY,
        });
    }
    Ok(p.delta(x))
}

pub fn characteristic_roots<T: Real>(p: &MarketParams<T>) -> (T, T) {
    (p.q1, p.q2)
}

/// Re-assessment interval `(a, b)`; `b` may be `+∞` for the half-line variants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corridor<T> {
    a: T,
    b: T,
}

impl<T: Real> Corridor<T> {
    /// Validates `â ≤ a < b`. `a` is accepted up to a relative `1e-12` below `â`
    /// (and then snapped to `â`) so that `a = K/(1+1/d)` typed by hand works.
    pub fn new(a: T, b: T, p: &MarketParams<T>) -> Result<Self> {
        let a_hat = p.a_hat();
        let slack = a_hat * T::tol(1e-12);
        if !(a >= a_hat - slack) || !a.is_finite() {
            return Err(Error::InvalidParameter {
                name: "a",
                value: a.to_f64_lossy(),
                reason: "lower threshold must satisfy a >= exercise boundary",
            });
        }
        let a = a.max(a_hat);
        if !(b > a) {
            return Err(Error::InvalidParameter {
                name: "b",
                value: b.to_f64_lossy(),
                reason: "upper threshold must exceed a",
            });
        }
        Ok(Self { a, b })
    }

    /// Interior sub-interval of an already validated corridor (no `â` check).
    pub(crate) fn sub(a: T, b: T) -> Self {
        Self { a, b }
    }

    pub fn a(&self) -> T {
        self.a
    }
    pub fn b(&self) -> T {
        self.b
    }
    pub fn is_finite(&self) -> bool {
        self.b.is_finite()
    }
    pub fn contains(&self, x: T) -> bool {
        x >= self.a && x <= self.b
    }

    pub(crate) fn require_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter {
                name: "b",
                value: f64::INFINITY,
                reason: "operation needs a finite corridor",
            })
        }
    }

    pub(crate) fn require_closed(&self, x: T, what: &'static str) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain {
                what,
                value: x.to_f64_lossy(),
                lower: self.a.to_f64_lossy(),
                upper: self.b.to_f64_lossy(),
            })
        }
    }

    pub(crate) fn require_open(&self, x: T, what: &'static str) -> Result<()> {
        if x > self.a && x < self.b {
            Ok(())
        } else {
            Err(Error::Domain {
                what,
                value: x.to_f64_lossy(),
                lower: self.a.to_f64_lossy(),
                upper: self.b.to_f64_lossy(),
            })
        }
    }
}

/// Increasing and decreasing solutions of `(L - 2r)v = 0` killed at the corridor edges:
/// `ψ(x) = x^{q₁} - a^{q₁-q₂} x^{q₂}` and `φ(x) = x^{q₂} - b^{q₂-q₁} x^{q₁}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalPair<T> {
    corridor: Corridor<T>,
    q1: T,
    q2: T,
    psi_coef: T,
    phi_coef: T,
    wronskian: T,
    reference_wronskian: T,
}

impl<T: Real> FundamentalPair<T> {
    pub fn new(c: &Corridor<T>, p: &MarketParams<T>) -> Result<Self> {
        c.require_finite()?;
        Ok(Self::build(c, p))
    }

    /// Pair for `(a, ∞)`, where `φ(x) = x^{q₂}` and `w = ŵ`.
    pub(crate) fn half_line(a: T, p: &MarketParams<T>) -> Self {
        Self::build(&Corridor::sub(a, T::infinity()), p)
    }

    fn build(c: &Corridor<T>, p: &MarketParams<T>) -> Self {
        let (q1, q2) = (p.q1(), p.q2());
        let spread = q1 - q2;
        let psi_coef = pow(c.a(), spread);
        let (phi_coef, ratio) = if c.is_finite() {
            (pow(c.b(), -spread), pow(c.a() / c.b(), spread))
        } else {
            (T::zero(), T::zero())
        };
        let reference_wronskian = p.reference_wronskian();
        Self {
            corridor: *c,
            q1,
            q2,
            psi_coef,
            phi_coef,
            wronskian: reference_wronskian * (T::one() - ratio),
            reference_wronskian,
        }
    }

    pub fn corridor(&self) -> &Corridor<T> {
        &self.corridor
    }
    pub fn wronskian(&self) -> T {
        self.wronskian
    }
    pub fn reference_wronskian(&self) -> T {
        self.reference_wronskian
    }

    /// `ψ(x) = x^{q₁} - coef·x^{q₂}`: returns `coef`.
    pub fn psi_coefficient(&self) -> T {
        self.psi_coef
    }
    /// `φ(x) = x^{q₂} - coef·x^{q₁}`: returns `coef`.
    pub fn phi_coefficient(&self) -> T {
        self.phi_coef
    }

    pub fn psi(&self, x: T) -> T {
        pow(x, self.q1) - self.psi_coef * pow(x, self.q2)
    }
    pub fn phi(&self, x: T) -> T {
        pow(x, self.q2) - self.phi_coef * pow(x, self.q1)
    }
    pub fn dpsi(&self, x: T) -> T {
        self.q1 * pow(x, self.q1 - T::one()) - self.psi_coef * self.q2 * pow(x, self.q2 - T::one())
    }
    pub fn dphi(&self, x: T) -> T {
        self.q2 * pow(x, self.q2 - T::one()) - self.phi_coef * self.q1 * pow(x, self.q1 - T::one())
    }
    pub fn d2psi(&self, x: T) -> T {
        let two = T::lit(2.0);
        self.q1 * (self.q1 - T::one()) * pow(x, self.q1 - two)
            - self.psi_coef * self.q2 * (self.q2 - T::one()) * pow(x, self.q2 - two)
    }
    pub fn d2phi(&self, x: T) -> T {
        let two = T::lit(2.0);
        self.q2 * (self.q2 - T::one()) * pow(x, self.q2 - two)
            - self.phi_coef * self.q1 * (self.q1 - T::one()) * pow(x, self.q1 - two)
    }

    /// `ψ` as power terms.
    pub fn psi_terms(&self) -> [PowerTerm<T>; 2] {
        [
            PowerTerm::new(T::one(), self.q1),
            PowerTerm::new(-self.psi_coef, self.q2),
        ]
    }
    /// `φ` as power terms (the second vanishes on the half-line).
    pub fn phi_terms(&self) -> [PowerTerm<T>; 2] {
        [
            PowerTerm::new(T::one(), self.q2),
            PowerTerm::new(-self.phi_coef, self.q1),
        ]
    }
}

/// Right-hand side `g` of a resolvent evaluation.
pub enum Source<'a, T> {
    /// `g(z) = Σ coef·z^power`, integrated with exact antiderivatives.
    Powers(&'a [PowerTerm<T>]),
    /// Arbitrary bounded `g`, integrated by adaptive quadrature; `kinks`
    /// are points where `g` is not smooth.
    Function {
        g: &'a dyn Fn(T) -> T,
        kinks: &'a [T],
    },
}

/// Relative tolerance of the quadrature path of [`resolvent`].
pub const RESOLVENT_QUAD_TOL: f64 = 1e-10;

/// `E_x[∫_0^{τ} e^{-2ru} g(S_u) du]` with `τ` the exit time of the pair's corridor:
/// `w⁻¹(φ(x)∫_a^x ψ g m' + ψ(x)∫_x^b φ g m')`.
pub fn resolvent<T: Real>(
    x: T,
    g: &Source<'_, T>,
    pair: &FundamentalPair<T>,
    p: &MarketParams<T>,
) -> Result<T> {
    let c = pair.corridor();
    c.require_finite()?;
    c.require_closed(x, "spot")?;
    let (a, b) = (c.a(), c.b());
    let (lower, upper) = match g {
        Source::Powers(terms) => {
            let m = p.speed_term();
            let mut lower = T::zero();
            let mut upper = T::zero();
            for t in terms.iter() {
                let tm = t.times(&m);
                for s in pair.psi_terms() {
                    lower = lower + s.times(&tm).integral(a, x);
                }
                for s in pair.phi_terms() {
                    upper = upper + s.times(&tm).integral(x, b);
                }
            }
            (lower, upper)
        }
        Source::Function { g, kinks } => {
            let tol = T::tol(RESOLVENT_QUAD_TOL);
            let lower = integrate(
                |z| pair.psi(z) * g(z) * p.speed_density(z),
                a,
                x,
                kinks,
                tol,
            )?;
            let upper = integrate(
                |z| pair.phi(z) * g(z) * p.speed_density(z),
                x,
                b,
                kinks,
                tol,
            )?;
            (lower, upper)
        }
    };
    Ok((pair.phi(x) * lower + pair.psi(x) * upper) / pair.wronskian())
}
