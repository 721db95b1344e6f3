//! Free-boundary solver: optimal trading thresholds `x₁* < x₂*` for an initial
//! holding `h`, from value matching and smooth pasting against `M`.

use crate::error::{Error, Result};
use crate::market::{Corridor, MarketParams};
use crate::numerics::{bisect_predicate, brent, PowerTerm};
use crate::payoff::{Case, CaseClassification, CorridorPayoff};
use crate::scalar::{pow, Real};

/// Points used by the verification pass.
pub const VERIFY_POINTS: usize = 512;

/// Particular solution of `(L - 2r)v = -f(·, h)` as power terms:
/// `-x²(h - d⁻¹(â/x)^{1+d})²`.
pub fn particular_terms<T: Real>(h: T, p: &MarketParams<T>) -> [PowerTerm<T>; 3] {
    let d = p.d();
    let two = T::lit(2.0);
    let k = pow(p.a_hat(), T::one() + d) / d;
    [
        PowerTerm::new(-h * h, two),
        PowerTerm::new(two * h * k, T::one() - d),
        PowerTerm::new(-k * k, -two * d),
    ]
}

fn nth<T: Real>(t: &PowerTerm<T>, n: usize, x: T) -> T {
    let mut c = t.coef;
    let mut q = t.power;
    for _ in 0..n {
        c = c * q;
        q = q - T::one();
    }
    c * pow(x, q)
}

/// `v(x) = C₁x^{q₁} + C₂x^{q₂} + particular(x)` with its derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate<T> {
    terms: [PowerTerm<T>; 5],
}

impl<T: Real> Candidate<T> {
    pub fn new(h: T, c1: T, c2: T, p: &MarketParams<T>) -> Self {
        let [u1, u2, u3] = particular_terms(h, p);
        Self {
            terms: [
                PowerTerm::new(c1, p.q1()),
                PowerTerm::new(c2, p.q2()),
                u1,
                u2,
                u3,
            ],
        }
    }

    pub fn c1(&self) -> T {
        self.terms[0].coef
    }
    pub fn c2(&self) -> T {
        self.terms[1].coef
    }

    /// `n`-th derivative at `x`.
    pub fn derivative(&self, n: usize, x: T) -> T {
        self.terms.iter().fold(T::zero(), |s, t| s + nth(t, n, x))
    }

    pub fn eval(&self, x: T) -> T {
        self.derivative(0, x)
    }

    /// Coefficients making `v(x₁) = y₁`, `v(x₂) = y₂`, solved in the scaled
    /// basis `(x/x₂)^{q₁}, (x/x₁)^{q₂}` which stays well conditioned.
    pub fn matching(h: T, x1: T, y1: T, x2: T, y2: T, p: &MarketParams<T>) -> Self {
        let base = Self::new(h, T::zero(), T::zero(), p);
        let (q1, q2) = (p.q1(), p.q2());
        let r1 = y1 - base.eval(x1);
        let r2 = y2 - base.eval(x2);
        let s = pow(x1 / x2, q1);
        let t = pow(x2 / x1, q2);
        let det = s * t - T::one();
        let k1 = (t * r1 - r2) / det;
        let k2 = (s * r2 - r1) / det;
        Self::new(h, k1 * pow(x2, -q1), k2 * pow(x1, -q2), p)
    }
}

/// `C₁x^{q₁} + C₂x^{q₂} - x²(h - d⁻¹(â/x)^{1+d})²`.
pub fn candidate_value<T: Real>(x: T, h: T, c1: T, c2: T, p: &MarketParams<T>) -> T {
    Candidate::new(h, c1, c2, p).eval(x)
}

/// Optimal thresholds and the candidate solution between them.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySolution<T> {
    pub h: T,
    pub x1: T,
    pub x2: T,
    pub c1: T,
    pub c2: T,
    pub classification: CaseClassification<T>,
    candidate: Candidate<T>,
}

impl<T: Real> BoundarySolution<T> {
    pub fn case(&self) -> Case {
        self.classification.case
    }

    pub fn candidate(&self) -> &Candidate<T> {
        &self.candidate
    }

    /// Whether `x` lies in the continuation set `(x₁*, x₂*)`.
    pub fn continues(&self, x: T) -> bool {
        x > self.x1 && x < self.x2
    }

    /// `V(x, h)`: candidate inside `(x₁*, x₂*)`, `M` elsewhere.
    pub fn value(&self, x: T, payoff: &CorridorPayoff<T>) -> T {
        if self.continues(x) {
            self.candidate.eval(x)
        } else {
            payoff.payoff(x)
        }
    }

    /// `∂ₓV` from inside the continuation set.
    pub fn inner_slope(&self, x: T) -> T {
        self.candidate.derivative(1, x)
    }
}

/// Limit of `∂ₓₓV` from the continuation side at a free boundary `x₀`:
/// `2(σx₀)⁻²(-rx₀M'(x₀) + 2rM(x₀) - f(x₀, h))`.
pub fn boundary_curvature<T: Real>(x0: T, h: T, payoff: &CorridorPayoff<T>) -> T {
    let p = payoff.market();
    let jet = payoff.payoff_jet(x0);
    let sx = p.sigma() * x0;
    T::lit(2.0) / (sx * sx)
        * (-p.r() * x0 * jet.d1 + T::lit(2.0) * p.r() * jet.value - payoff.running_cost(x0, h))
}

struct Solver<'a, T: Real> {
    payoff: &'a CorridorPayoff<T>,
    h: T,
    a: T,
    b: T,
    xtol: T,
}

impl<'a, T: Real> Solver<'a, T> {
    fn candidate(&self, x1: T, x2: T) -> Candidate<T> {
        let p = self.payoff.market();
        Candidate::matching(
            self.h,
            x1,
            self.payoff.payoff(x1),
            x2,
            self.payoff.payoff(x2),
            p,
        )
    }

    /// Pasting residuals `v'(x₁) - M'(x₁)`, `v'(x₂) - M'(x₂)`.
    fn residuals(&self, x1: T, x2: T) -> (T, T) {
        let v = self.candidate(x1, x2);
        let r1 = v.derivative(1, x1) - self.payoff.payoff_jet(x1).d1;
        let r2 = v.derivative(1, x2) - self.payoff.payoff_jet(x2).d1;
        (r1, r2)
    }

    fn r1(&self, x1: T, x2: T) -> T {
        self.residuals(x1, x2).0
    }
    fn r2(&self, x1: T, x2: T) -> T {
        self.residuals(x1, x2).1
    }

    /// Lower boundary paired with the upper edge `b`.
    fn lower_against_b(&self, hi: T) -> Result<T> {
        if self.r1(self.a, self.b) <= T::zero() {
            return Ok(self.a);
        }
        brent(
            |x1| self.r1(x1, self.b),
            self.a,
            hi,
            self.xtol,
            "lower boundary",
        )
    }

    /// Upper boundary paired with the lower edge `a`.
    fn upper_against_a(&self, lo: T) -> Result<T> {
        if self.r2(self.a, self.b) >= T::zero() {
            return Ok(self.b);
        }
        brent(
            |x2| self.r2(self.a, x2),
            lo,
            self.b,
            self.xtol,
            "upper boundary",
        )
    }

    /// Inner solve for `x₂(x₁)` on `[x_G2, b]`; `None` when no pasting point exists.
    fn inner(&self, x1: T, xg2: T) -> Option<T> {
        if self.r2(x1, self.b) >= T::zero() {
            return Some(self.b);
        }
        if self.r2(x1, xg2) < T::zero() {
            return None;
        }
        brent(|x2| self.r2(x1, x2), xg2, self.b, self.xtol, "upper boundary").ok()
    }

    fn two_sided(&self, xg1: T, xg2: T) -> Result<(T, T)> {
        let feasible = |x1: T| self.inner(x1, xg2).is_some();
        let lo = if feasible(self.a) {
            let x2 = self.inner(self.a, xg2).unwrap();
            if self.r1(self.a, x2) <= T::zero() {
                return Ok((self.a, x2));
            }
            self.a
        } else {
            if !feasible(xg1) {
                return Err(Error::NoBracket {
                    what: "lower boundary feasibility",
                    lower: self.a.to_f64_lossy(),
                    upper: xg1.to_f64_lossy(),
                    f_lower: self.r2(self.a, xg2).to_f64_lossy(),
                    f_upper: self.r2(xg1, xg2).to_f64_lossy(),
                });
            }
            bisect_predicate(feasible, self.a, xg1, self.xtol)
        };
        let outer = |x1: T| {
            let x2 = self.inner(x1, xg2).unwrap_or(xg2);
            self.r1(x1, x2)
        };
        let x1 = brent(outer, lo, xg1, self.xtol, "lower boundary")?;
        let x2 = self.inner(x1, xg2).unwrap_or(xg2);
        Ok((x1, x2))
    }

    /// Damped Newton on the pasting map, finite-difference Jacobian.
    fn newton(&self, xg1: T, xg2: T) -> Result<(T, T)> {
        let half = T::lit(0.5);
        let mut x = (half * (self.a + xg1), half * (xg2 + self.b));
        let norm = |r: (T, T)| r.0.abs().max(r.1.abs());
        let mut r = self.residuals(x.0, x.1);
        for _ in 0..60 {
            if norm(r) <= T::tol(1e-12) * self.payoff_scale() {
                return Ok(x);
            }
            let eps = T::tol(1e-7) * self.b;
            let r_a = self.residuals(x.0 + eps, x.1);
            let r_b = self.residuals(x.0, x.1 - eps);
            let j11 = (r_a.0 - r.0) / eps;
            let j21 = (r_a.1 - r.1) / eps;
            let j12 = (r.0 - r_b.0) / eps;
            let j22 = (r.1 - r_b.1) / eps;
            let det = j11 * j22 - j12 * j21;
            if det == T::zero() || !det.is_finite() {
                break;
            }
            let dx = (-(j22 * r.0 - j12 * r.1) / det, -(j11 * r.1 - j21 * r.0) / det);
            let mut step = T::one();
            let mut moved = false;
            for _ in 0..30 {
                let cand = (
                    (x.0 + step * dx.0).max(self.a).min(xg1),
                    (x.1 + step * dx.1).max(xg2).min(self.b),
                );
                let rc = self.residuals(cand.0, cand.1);
                if norm(rc) < norm(r) {
                    x = cand;
                    r = rc;
                    moved = true;
                    break;
                }
                step = step * half;
            }
            if !moved {
                break;
            }
        }
        Err(Error::Numerical(format!(
            "pasting Newton stalled at ({}, {})",
            x.0.to_f64_lossy(),
            x.1.to_f64_lossy()
        )))
    }

    fn payoff_scale(&self) -> T {
        self.payoff
            .log_grid(64)
            .iter()
            .fold(T::zero(), |m, &x| m.max(self.payoff.payoff(x)))
    }

    fn finish(&self, x1: T, x2: T, cls: &CaseClassification<T>) -> BoundarySolution<T> {
        let candidate = self.candidate(x1, x2);
        BoundarySolution {
            h: self.h,
            x1,
            x2,
            c1: candidate.c1(),
            c2: candidate.c2(),
            classification: cls.clone(),
            candidate,
        }
    }

    fn fail(&self, x1: T, x2: T, reason: &'static str, worst: T) -> Error {
        Error::VerificationFailed {
            h: self.h.to_f64_lossy(),
            x1: x1.to_f64_lossy(),
            x2: x2.to_f64_lossy(),
            reason,
            worst: worst.to_f64_lossy(),
        }
    }

    /// Value matching, smooth pasting, `v ≤ M` inside, `G ≥ 0` outside and the
    /// ordering against the roots of G.
    fn verify(&self, sol: &BoundarySolution<T>) -> Result<()> {
        let (x1, x2) = (sol.x1, sol.x2);
        let pay = self.payoff;
        let grid = pay.log_grid(VERIFY_POINTS);
        let m_scale = grid.iter().fold(T::zero(), |m, &x| m.max(pay.payoff(x)));
        let g_scale = grid
            .iter()
            .fold(T::zero(), |m, &x| m.max(pay.sign(x, self.h).abs()));
        let v = &sol.candidate;

        let match_tol = T::tol(1e-8) * m_scale;
        for x in [x1, x2] {
            let e = (v.eval(x) - pay.payoff(x)).abs();
            if e > match_tol {
                return Err(self.fail(x1, x2, "value matching", e));
            }
        }
        let slope_floor = m_scale / (self.b - self.a);
        for (x, interior) in [(x1, x1 > self.a), (x2, x2 < self.b)] {
            if interior {
                let m1 = pay.payoff_jet(x).d1;
                let e = (v.derivative(1, x) - m1).abs() / m1.abs().max(slope_floor);
                if e > T::tol(1e-7) {
                    return Err(self.fail(x1, x2, "smooth pasting", e));
                }
            }
        }
        let slack = T::tol(1e-9) * self.b;
        let cls = &sol.classification;
        if x1 > cls.min_root() + slack {
            return Err(self.fail(x1, x2, "lower boundary above first root of G", x1));
        }
        if x2 < cls.max_root() - slack {
            return Err(self.fail(x1, x2, "upper boundary below last root of G", x2));
        }
        let inside_tol = T::tol(1e-8) * m_scale;
        let n = T::lit(VERIFY_POINTS as f64 + 1.0);
        for i in 1..=VERIFY_POINTS {
            let x = x1 + (x2 - x1) * T::lit(i as f64) / n;
            let e = v.eval(x) - pay.payoff(x);
            if e > inside_tol {
                return Err(self.fail(x1, x2, "candidate exceeds stopping payoff", e));
            }
        }
        let outside_tol = T::tol(1e-8) * g_scale;
        let (a, b) = (self.a, self.b);
        let outside = |x: T| (x <= x1 || x >= x2) && x > a && x < b;
        for &x in grid.iter().filter(|&&x| outside(x)) {
            let g = pay.sign(x, self.h);
            if g < -outside_tol {
                return Err(self.fail(x1, x2, "sign function negative in stopping set", g));
            }
        }
        Ok(())
    }
}

/// Solve the free-boundary problem for `h` using a prepared payoff.
pub fn solve_with<T: Real>(h: T, payoff: &CorridorPayoff<T>) -> Result<BoundarySolution<T>> {
    let cls = payoff.classify(h)?;
    let c = payoff.corridor();
    let s = Solver {
        payoff,
        h,
        a: c.a(),
        b: c.b(),
        xtol: T::tol(1e-12) * c.b(),
    };
    let xg1 = cls.min_root();
    let xg2 = cls.max_root();
    let mut attempts: Vec<Result<(T, T)>> = Vec::new();
    match cls.case {
        Case::A1 => attempts.push(s.lower_against_b(xg1).map(|x1| (x1, s.b))),
        Case::A3 => attempts.push(s.upper_against_a(xg1).map(|x2| (s.a, x2))),
        Case::A2 => {
            attempts.push(s.two_sided(xg1, xg2));
            attempts.push(s.upper_against_a(xg2).map(|x2| (s.a, x2)));
            attempts.push(s.lower_against_b(xg1).map(|x1| (x1, s.b)));
        }
    }
    let mut last_err = None;
    let mut tried_newton = false;
    let mut i = 0;
    while i < attempts.len() {
        match &attempts[i] {
            Ok((x1, x2)) => {
                let sol = s.finish(*x1, *x2, &cls);
                match s.verify(&sol) {
                    Ok(()) => return Ok(sol),
                    Err(e) => last_err = Some(e),
                }
            }
            Err(e) => last_err = Some(e.clone()),
        }
        i += 1;
        if i == attempts.len() && cls.case == Case::A2 && !tried_newton {
            tried_newton = true;
            attempts.push(s.newton(xg1, xg2));
        }
    }
    Err(last_err.expect("at least one attempt"))
}

/// Optimal trading boundaries for initial holding `h`.
pub fn solve_boundaries<T: Real>(
    h: T,
    c: &Corridor<T>,
    p: &MarketParams<T>,
) -> Result<BoundarySolution<T>> {
    solve_with(h, &CorridorPayoff::new(c, p)?)
}

/// `V(x, h)` for a solved boundary pair.
pub fn value<T: Real>(
    x: T,
    sol: &BoundarySolution<T>,
    c: &Corridor<T>,
    p: &MarketParams<T>,
) -> Result<T> {
    c.require_closed(x, "spot")?;
    Ok(sol.value(x, &CorridorPayoff::new(c, p)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow<T> {
    pub h: T,
    pub result: Result<(Case, T, T)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurves<T> {
    pub rows: Vec<CurveRow<T>>,
    /// First grid holding where `x₁*` leaves `a`.
    pub h_alpha: Option<T>,
    /// First grid holding where `x₂*` reaches `b`.
    pub h_beta: Option<T>,
    pub monotone: bool,
    /// Largest adjacent change of `x₁*` and `x₂*` over the grid.
    pub max_jump: (T, T),
}

/// Solve every holding on the grid and summarise the boundary curves.
pub fn boundary_curves<T: Real>(
    h_grid: &[T],
    c: &Corridor<T>,
    p: &MarketParams<T>,
) -> Result<BoundaryCurves<T>> {
    let payoff = CorridorPayoff::new(c, p)?;
    let rows: Vec<CurveRow<T>> = h_grid
        .iter()
        .map(|&h| CurveRow {
            h,
            result: solve_with(h, &payoff).map(|s| (s.case(), s.x1, s.x2)),
        })
        .collect();
    let tol = T::tol(1e-9) * c.b();
    let mut h_alpha = None;
    let mut h_beta = None;
    let mut monotone = true;
    let mut max_jump = (T::zero(), T::zero());
    let mut prev: Option<(T, T)> = None;
    for row in &rows {
        let Ok((_, x1, x2)) = row.result else {
            prev = None;
            continue;
        };
        if h_alpha.is_none() && x1 > c.a() + tol {
            h_alpha = Some(row.h);
        }
        if h_beta.is_none() && x2 >= c.b() - tol {
            h_beta = Some(row.h);
        }
        if let Some((p1, p2)) = prev {
            if x1 < p1 - tol || x2 < p2 - tol {
                monotone = false;
            }
            max_jump = (max_jump.0.max((x1 - p1).abs()), max_jump.1.max((x2 - p2).abs()));
        }
        prev = Some((x1, x2));
    }
    Ok(BoundaryCurves {
        rows,
        h_alpha,
        h_beta,
        monotone,
        max_jump,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wide() -> (MarketParams<f64>, Corridor<f64>, CorridorPayoff<f64>) {
        let p = MarketParams::new(0.03, 0.30, 100.0).unwrap();
        let c = Corridor::new(40.0, 150.0, &p).unwrap();
        let pay = CorridorPayoff::new(&c, &p).unwrap();
        (p, c, pay)
    }

    #[test]
    fn particular_solution_solves_ode() {
        let (p, _, pay) = wide();
        let v = Candidate::new(-0.3, 0.0, 0.0, &p);
        for &x in &[50.0, 90.0, 140.0] {
            let lhs = p.killed_generator(x, v.eval(x), v.derivative(1, x), v.derivative(2, x));
            let f = pay.running_cost(x, -0.3);
            assert!((lhs + f).abs() < 1e-10 * f.max(1.0), "x = {x}");
        }
    }

    #[test]
    fn homogeneous_part_is_annihilated() {
        let (p, _, _) = wide();
        let v = Candidate::new(0.0, 1.0, 0.0, &p);
        let base = Candidate::new(0.0, 0.0, 0.0, &p);
        for &x in &[50.0, 100.0] {
            assert!((v.eval(x) - base.eval(x) - x.powf(p.q1())).abs() < 1e-9);
        }
    }

    #[test]
    fn matching_hits_both_values() {
        let (p, _, _) = wide();
        let v = Candidate::matching(-0.4, 55.0, 3.0, 120.0, 7.0, &p);
        assert!((v.eval(55.0) - 3.0).abs() < 1e-9);
        assert!((v.eval(120.0) - 7.0).abs() < 1e-9);
    }

    #[test]
    fn case_a1_at_top_of_range() {
        let (p, c, _) = wide();
        let s = solve_boundaries(p.delta(150.0), &c, &p).unwrap();
        assert_eq!(s.case(), Case::A1);
        assert_eq!(s.x2, 150.0);
        assert!(s.x1 > 40.0 && s.x1 <= s.classification.x_g1() + 1e-9);
    }

    #[test]
    fn case_a3_at_bottom_of_range() {
        let (p, c, _) = wide();
        let s = solve_boundaries(p.delta(40.0), &c, &p).unwrap();
        assert_eq!(s.case(), Case::A3);
        assert_eq!(s.x1, 40.0);
        assert!(s.x2 < 150.0 && s.x2 >= s.classification.x_g1() - 1e-9);
    }

    #[test]
    fn value_is_zero_at_edges_and_below_payoff() {
        let (p, c, pay) = wide();
        let s = solve_boundaries(-0.3, &c, &p).unwrap();
        assert_eq!(value(40.0, &s, &c, &p).unwrap(), 0.0);
        assert_eq!(value(150.0, &s, &c, &p).unwrap(), 0.0);
        for i in 1..100 {
            let x = 40.0 + 1.1 * i as f64;
            let v = s.value(x, &pay);
            assert!(v >= -1e-9 && v <= pay.payoff(x) + 1e-9);
        }
    }
}
