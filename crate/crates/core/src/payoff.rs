//! Closed-form γ-functions on a finite corridor and everything built from them:
//! post-trade holding Γ, stopping payoff M, running cost f, sign function G and
//! the case classifier.

use crate::error::{Error, Result};
use crate::market::{Corridor, FundamentalPair, MarketParams};
use crate::numerics::{brent, PowerTerm};
use crate::scalar::{pow, Real};

/// Normalisers of the γ closed forms.
///
/// `A_i = [a^{q_i-q_j} - b^{q_i-q_j}]⁻¹` and, with `ρ(z) = â/z`,
/// `B_i = d⁻²(ρ(a)^{2+2d}a^{2-q_i} - ρ(b)^{2+2d}b^{2-q_i})`,
/// `C_i = d⁻¹(ρ(a)^{1+d}a^{2-q_i} - ρ(b)^{1+d}b^{2-q_i})`,
/// `D_i = a^{2-q_i} - b^{2-q_i}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaCoefficients<T> {
    pub a: [T; 2],
    pub b: [T; 2],
    pub c: [T; 2],
    pub d: [T; 2],
}

impl<T: Real> GammaCoefficients<T> {
    pub fn new(c: &Corridor<T>, p: &MarketParams<T>) -> Result<Self> {
        c.require_finite()?;
        let (lo, hi) = (c.a(), c.b());
        let q = [p.q1(), p.q2()];
        let d = p.d();
        let two = T::lit(2.0);
        let one_d = T::one() + d;
        let ra = p.a_hat() / lo;
        let rb = p.a_hat() / hi;
        let mut out = Self {
            a: [T::zero(); 2],
            b: [T::zero(); 2],
            c: [T::zero(); 2],
            d: [T::zero(); 2],
        };
        for i in 0..2 {
            let spread = q[i] - q[1 - i];
            out.a[i] = T::one() / (pow(lo, spread) - pow(hi, spread));
            let ea = pow(lo, two - q[i]);
            let eb = pow(hi, two - q[i]);
            out.b[i] = (pow(ra, two * one_d) * ea - pow(rb, two * one_d) * eb) / (d * d);
            out.c[i] = (pow(ra, one_d) * ea - pow(rb, one_d) * eb) / d;
            out.d[i] = ea - eb;
        }
        Ok(out)
    }
}

/// Which shape the stopping set takes for a given initial holding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Case {
    /// `h ∈ [Γ(b⁻), P'(b)]`: G is `+` then `-`; continuation set `(x₁*, b)`.
    A1,
    /// `h ∈ (Γ(a⁺), Γ(b⁻))`: G is `+, -, +`.
    A2,
    /// `h ∈ [P'(a), Γ(a⁺)]`: G is `-` then `+`; continuation set `(a, x₂*)`.
    A3,
}

impl std::fmt::Display for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Case::A1 => "A1",
            Case::A2 => "A2",
            Case::A3 => "A3",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseClassification<T> {
    pub case: Case,
    pub h: T,
    /// Sign-change roots of `G(·, h)` in `(a, b)`, ascending.
    pub roots: Vec<T>,
    /// Points where `|G|` touches zero without changing sign.
    pub tangential: Vec<T>,
}

impl<T: Real> CaseClassification<T> {
    pub fn x_g1(&self) -> T {
        self.roots[0]
    }
    pub fn x_g2(&self) -> Option<T> {
        self.roots.get(1).copied()
    }
    pub fn min_root(&self) -> T {
        self.roots[0]
    }
    pub fn max_root(&self) -> T {
        *self.roots.last().unwrap()
    }
}

/// Value of Γ, flagged when it is an endpoint limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PostTrade<T> {
    pub value: T,
    pub is_limit: bool,
}

/// `M`, `M'`, `M''` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffJet<T> {
    pub value: T,
    pub d1: T,
    pub d2: T,
}

/// Number of points of the log-spaced sign scan.
pub const SCAN_POINTS: usize = 2048;
const TAYLOR_ORDER: usize = 6;

/// Precomputed closed forms for one (corridor, market) pair.
///
/// `γ_k(x) = u_k(x) + α_k x^{q₁} + β_k x^{q₂}` where `u_k` is the particular
/// power term; near the corridor edges Γ and Γ' switch to a Taylor ratio to
/// avoid the 0/0 cancellation.
#[derive(Debug, Clone)]
pub struct CorridorPayoff<T> {
    market: MarketParams<T>,
    corridor: Corridor<T>,
    coefficients: GammaCoefficients<T>,
    terms: [[PowerTerm<T>; 3]; 3],
    taylor_lo: [[T; TAYLOR_ORDER]; 3],
    taylor_hi: [[T; TAYLOR_ORDER]; 3],
    taylor_radius: T,
}

fn term_derivative<T: Real>(t: &PowerTerm<T>, n: usize, x: T) -> T {
    let mut c = t.coef;
    let mut p = t.power;
    for _ in 0..n {
        c = c * p;
        p = p - T::one();
    }
    c * pow(x, p)
}

impl<T: Real> CorridorPayoff<T> {
    pub fn new(c: &Corridor<T>, p: &MarketParams<T>) -> Result<Self> {
        let coefficients = GammaCoefficients::new(c, p)?;
        let (q1, q2, d) = (p.q1(), p.q2(), p.d());
        let k = &coefficients;
        let a_hat = p.a_hat();
        let two = T::lit(2.0);
        let particular = [
            PowerTerm::new(-T::one(), two),
            PowerTerm::new(-pow(a_hat, T::one() + d) / d, T::one() - d),
            PowerTerm::new(-pow(a_hat, two + two * d) / (d * d), -two * d),
        ];
        let homogeneous = [
            (k.a[0] * k.d[1], k.a[1] * k.d[0]),
            (k.a[0] * k.c[1], k.a[1] * k.c[0]),
            (k.a[0] * k.b[1], k.a[1] * k.b[0]),
        ];
        let mut terms = [[PowerTerm::new(T::zero(), T::zero()); 3]; 3];
        for i in 0..3 {
            terms[i] = [
                particular[i],
                PowerTerm::new(homogeneous[i].0, q1),
                PowerTerm::new(homogeneous[i].1, q2),
            ];
        }
        let mut out = Self {
            market: *p,
            corridor: *c,
            coefficients,
            terms,
            taylor_lo: [[T::zero(); TAYLOR_ORDER]; 3],
            taylor_hi: [[T::zero(); TAYLOR_ORDER]; 3],
            taylor_radius: T::lit(2e-3) * (c.b() - c.a()).min(c.a()),
        };
        let mut factorial = T::one();
        for n in 1..=TAYLOR_ORDER {
            factorial = factorial * T::lit(n as f64);
            for i in 0..3 {
                out.taylor_lo[i][n - 1] = out.gamma_derivative(i, n, c.a()) / factorial;
                out.taylor_hi[i][n - 1] = out.gamma_derivative(i, n, c.b()) / factorial;
            }
        }
        Ok(out)
    }

    pub fn market(&self) -> &MarketParams<T> {
        &self.market
    }
    pub fn corridor(&self) -> &Corridor<T> {
        &self.corridor
    }
    pub fn coefficients(&self) -> &GammaCoefficients<T> {
        &self.coefficients
    }

    /// Power-term representation of `γ_{k+1}`.
    pub fn gamma_terms(&self, k: usize) -> &[PowerTerm<T>; 3] {
        &self.terms[k]
    }

    /// `n`-th derivative of `γ_{k+1}`.
    pub fn gamma_derivative(&self, k: usize, n: usize, x: T) -> T {
        self.terms[k]
            .iter()
            .fold(T::zero(), |s, t| s + term_derivative(t, n, x))
    }

    /// `(γ₁, γ₂, γ₃)` without domain checks.
    pub fn gammas(&self, x: T) -> [T; 3] {
        [
            self.gamma_derivative(0, 0, x),
            self.gamma_derivative(1, 0, x),
            self.gamma_derivative(2, 0, x),
        ]
    }

    fn taylor_ratio(&self, x: T) -> Option<(T, T)> {
        let (delta, coefs) = if x - self.corridor.a() < self.taylor_radius {
            (x - self.corridor.a(), &self.taylor_lo)
        } else if self.corridor.b() - x < self.taylor_radius {
            (x - self.corridor.b(), &self.taylor_hi)
        } else {
            return None;
        };
        // γ_k(e+δ)/δ = Σ c_n δ^{n-1}
        let series = |k: usize| {
            let mut v = T::zero();
            let mut dv = T::zero();
            for n in (0..TAYLOR_ORDER).rev() {
                dv = dv * delta + v;
                v = v * delta + coefs[k][n];
            }
            (v, dv)
        };
        let (n, dn) = series(1);
        let (m, dm) = series(0);
        Some((n / m, (dn * m - n * dm) / (m * m)))
    }

    /// `Γ(x)` and `Γ'(x)` on the closed corridor (endpoint values are limits).
    pub fn post_trade_jet(&self, x: T) -> (T, T) {
        if let Some(r) = self.taylor_ratio(x) {
            return r;
        }
        let g1 = self.gamma_derivative(0, 0, x);
        let g2 = self.gamma_derivative(1, 0, x);
        let d1 = self.gamma_derivative(0, 1, x);
        let d2 = self.gamma_derivative(1, 1, x);
        (g2 / g1, (d2 * g1 - g2 * d1) / (g1 * g1))
    }

    /// `Γ(x) = γ₂/γ₁` on the closed corridor.
    pub fn post_trade(&self, x: T) -> T {
        self.post_trade_jet(x).0
    }

    pub fn post_trade_lower_limit(&self) -> T {
        self.taylor_lo[1][0] / self.taylor_lo[0][0]
    }
    pub fn post_trade_upper_limit(&self) -> T {
        self.taylor_hi[1][0] / self.taylor_hi[0][0]
    }

    /// `M̂(x, ζ) = γ₃ - 2ζγ₂ + ζ²γ₁`: cost of holding ζ until exit.
    pub fn holding_cost(&self, x: T, zeta: T) -> T {
        let [g1, g2, g3] = self.gammas(x);
        g3 - T::lit(2.0) * zeta * g2 + zeta * zeta * g1
    }

    /// `M`, `M'`, `M''`.
    pub fn payoff_jet(&self, x: T) -> PayoffJet<T> {
        let two = T::lit(2.0);
        let (gam, dgam) = self.post_trade_jet(x);
        let g = |n| {
            [
                self.gamma_derivative(0, n, x),
                self.gamma_derivative(1, n, x),
                self.gamma_derivative(2, n, x),
            ]
        };
        let (g0, g1, g2) = (g(0), g(1), g(2));
        let quad = |v: [T; 3]| v[2] - two * gam * v[1] + gam * gam * v[0];
        let at_edge = x <= self.corridor.a() || x >= self.corridor.b();
        PayoffJet {
            value: if at_edge { T::zero() } else { quad(g0).max(T::zero()) },
            d1: quad(g1),
            d2: quad(g2) - two * dgam * dgam * g0[0],
        }
    }

    /// `M(x) = γ₃ - γ₂²/γ₁`, zero at the edges.
    pub fn payoff(&self, x: T) -> T {
        self.payoff_jet(x).value
    }

    /// `f(x, θ) = (θ - P'(x))²σ²x²`.
    pub fn running_cost(&self, x: T, theta: T) -> T {
        running_cost_unchecked(x, theta, &self.market)
    }

    /// `G(x, h) = σ²x²((h-P')² - (Γ-P')² - Γ'²γ₁)`; the Γ'² term drops at the edges.
    pub fn sign(&self, x: T, h: T) -> T {
        let p = &self.market;
        let delta = p.delta(x);
        let (gam, dgam) = self.post_trade_jet(x);
        let g1 = if x <= self.corridor.a() || x >= self.corridor.b() {
            T::zero()
        } else {
            self.gamma_derivative(0, 0, x).max(T::zero())
        };
        let s2 = p.sigma() * p.sigma() * x * x;
        let e1 = h - delta;
        let e2 = gam - delta;
        s2 * (e1 * e1 - e2 * e2 - dgam * dgam * g1)
    }

    /// Root of `Γ(·) = h` for `h ∈ (Γ(a⁺), Γ(b⁻))`.
    pub fn x_gamma(&self, h: T) -> Result<T> {
        let lo = self.post_trade_lower_limit();
        let hi = self.post_trade_upper_limit();
        if !(h > lo && h < hi) {
            return Err(Error::Domain {
                what: "holding",
                value: h.to_f64_lossy(),
                lower: lo.to_f64_lossy(),
                upper: hi.to_f64_lossy(),
            });
        }
        let (a, b) = (self.corridor.a(), self.corridor.b());
        brent(
            |x| self.post_trade(x) - h,
            a,
            b,
            T::tol(1e-14) * b,
            "x_gamma",
        )
    }

    /// Log-spaced grid of `n` points spanning `[a, b]` inclusive.
    pub fn log_grid(&self, n: usize) -> Vec<T> {
        log_grid(self.corridor.a(), self.corridor.b(), n)
    }

    /// Classify `h` by the (A.1)-(A.3) rule and locate the roots of `G(·, h)`.
    pub fn classify(&self, h: T) -> Result<CaseClassification<T>> {
        let p = &self.market;
        let (a, b) = (self.corridor.a(), self.corridor.b());
        let lo = p.delta(a);
        let hi = p.delta(b);
        let slack = T::tol(1e-12);
        if !(h >= lo - slack && h <= hi + slack) {
            return Err(Error::Domain {
                what: "holding",
                value: h.to_f64_lossy(),
                lower: lo.to_f64_lossy(),
                upper: hi.to_f64_lossy(),
            });
        }
        let case = if h >= self.post_trade_upper_limit() {
            Case::A1
        } else if h <= self.post_trade_lower_limit() {
            Case::A3
        } else {
            Case::A2
        };

        let xs = self.log_grid(SCAN_POINTS);
        let gs: Vec<T> = xs.iter().map(|&x| self.sign(x, h)).collect();
        let scale = gs.iter().fold(T::zero(), |m, g| m.max(g.abs()));
        let zero_tol = T::tol(1e-12) * scale;
        // Drop endpoints where G vanishes: the root sits on the boundary itself.
        let first = usize::from(gs[0].abs() <= zero_tol);
        let last = xs.len() - usize::from(gs[xs.len() - 1].abs() <= zero_tol);

        let mut roots = Vec::new();
        let mut tangential = Vec::new();
        let xtol = T::tol(1e-10);
        let mut prev: Option<usize> = None;
        for i in first..last {
            if gs[i] == T::zero() {
                continue;
            }
            if let Some(j) = prev {
                if gs[i].signum() != gs[j].signum() {
                    let r = brent(|x| self.sign(x, h), xs[j], xs[i], xtol, "sign root")?;
                    roots.push(r);
                }
            }
            prev = Some(i);
        }
        let touch_tol = T::tol(1e-9) * scale;
        for i in (first + 1)..last.saturating_sub(1) {
            let (l, m, r) = (gs[i - 1], gs[i], gs[i + 1]);
            let local_min = m.abs() <= l.abs() && m.abs() <= r.abs();
            if local_min && m.abs() < touch_tol && l.signum() == r.signum() {
                tangential.push(xs[i]);
            }
        }

        let err = |roots: Vec<T>| Error::AssumptionViolated {
            h: h.to_f64_lossy(),
            roots: roots.iter().map(|r| r.to_f64_lossy()).collect(),
        };
        let expected = match case {
            Case::A2 => 2,
            _ => 1,
        };
        if roots.len() != expected {
            return Err(err(roots));
        }
        let lead = gs[first..last]
            .iter()
            .find(|g| **g != T::zero())
            .copied()
            .unwrap_or(T::zero());
        let lead_positive = lead > T::zero();
        if lead_positive != matches!(case, Case::A1 | Case::A2) {
            return Err(err(roots));
        }
        Ok(CaseClassification {
            case,
            h,
            roots,
            tangential,
        })
    }

    /// Fundamental pair of the corridor.
    pub fn pair(&self) -> FundamentalPair<T> {
        FundamentalPair::new(&self.corridor, &self.market).expect("finite corridor")
    }
}

/// `n` log-spaced points spanning `[lo, hi]` with exact endpoints.
pub fn log_grid<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    let (la, lb) = (lo.ln(), hi.ln());
    let last = T::lit((n - 1) as f64);
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (la + (lb - la) * T::lit(i as f64) / last).exp()
            }
        })
        .collect()
}

fn running_cost_unchecked<T: Real>(x: T, theta: T, p: &MarketParams<T>) -> T {
    let e = theta - p.delta(x);
    e * e * p.sigma() * p.sigma() * x * x
}

/// `(γ₁, γ₂, γ₃)` at `x ∈ [a, b]`.
pub fn gamma_functions<T: Real>(x: T, c: &Corridor<T>, p: &MarketParams<T>) -> Result<[T; 3]> {
    c.require_finite()?;
    c.require_closed(x, "spot")?;
    let payoff = CorridorPayoff::new(c, p)?;
    if x == c.a() || x == c.b() {
        return Ok([T::zero(); 3]);
    }
    Ok(payoff.gammas(x))
}

/// `Γ(x)`, with de l'Hôpital limits at the edges.
pub fn gamma_post_trade<T: Real>(
    x: T,
    c: &Corridor<T>,
    p: &MarketParams<T>,
) -> Result<PostTrade<T>> {
    c.require_closed(x, "spot")?;
    let payoff = CorridorPayoff::new(c, p)?;
    Ok(PostTrade {
        value: payoff.post_trade(x),
        is_limit: x == c.a() || x == c.b(),
    })
}

/// `M(x)`.
pub fn stopping_payoff<T: Real>(x: T, c: &Corridor<T>, p: &MarketParams<T>) -> Result<T> {
    c.require_closed(x, "spot")?;
    Ok(CorridorPayoff::new(c, p)?.payoff(x))
}

/// `f(x, θ) = (θ - P'(x))²σ²x²`.
pub fn running_cost<T: Real>(x: T, theta: T, p: &MarketParams<T>) -> Result<T> {
    if !(x > T::zero()) {
        return Err(Error::Domain {
            what: "spot",
            value: x.to_f64_lossy(),
            lower: 0.0,
            upper: f64::INFINITY,
        });
    }
    Ok(running_cost_unchecked(x, theta, p))
}

/// `G(x, h)` at `x ∈ (a, b)`.
pub fn sign_function<T: Real>(x: T, h: T, c: &Corridor<T>, p: &MarketParams<T>) -> Result<T> {
    c.require_open(x, "spot")?;
    Ok(CorridorPayoff::new(c, p)?.sign(x, h))
}

/// `x_p(h)`: the price where `P'(x) = h`, for `h ∈ [-1, 0)`.
pub fn x_p<T: Real>(h: T, p: &MarketParams<T>) -> Result<T> {
    p.delta_inverse(h)
}

/// Root of `Γ(·) = h`.
pub fn x_gamma<T: Real>(h: T, c: &Corridor<T>, p: &MarketParams<T>) -> Result<T> {
    CorridorPayoff::new(c, p)?.x_gamma(h)
}

pub fn classify_case<T: Real>(
    h: T,
    c: &Corridor<T>,
    p: &MarketParams<T>,
) -> Result<CaseClassification<T>> {
    CorridorPayoff::new(c, p)?.classify(h)
}
