//! Bracketed root finding, adaptive Gauss-Kronrod quadrature and exact
//! integration of power-law terms.

use crate::error::{Error, Result};
use crate::scalar::{pow, Real};

/// Brent's method on a sign-changing bracket `[lo, hi]`.
///
/// Stops when the bracket is narrower than `xtol` (absolute) or an exact
/// zero is hit.
pub fn brent<T, F>(mut f: F, lo: T, hi: T, xtol: T, what: &'static str) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if !(fa.signum() != fb.signum()) || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoBracket {
            what,
            lower: lo.to_f64_lossy(),
            upper: hi.to_f64_lossy(),
            f_lower: fa.to_f64_lossy(),
            f_upper: fb.to_f64_lossy(),
        });
    }
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let (mut c, mut fc) = (b, fb);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = two * T::epsilon() * b.abs() + half * xtol;
        let xm = half * (c - b);
        if xm.abs() <= tol1 || fb == T::zero() {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * xm * s;
                q = T::one() - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qq * (qq - r) - (b - a) * (r - T::one()));
                q = (qq - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            let min1 = T::lit(3.0) * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol1 {
            b + d
        } else {
            b + tol1 * xm.signum()
        };
        fb = f(b);
    }
    Err(Error::Numerical(format!("brent: {what} did not converge")))
}

/// Bisection on a predicate that is `false` at `lo` and `true` at `hi`;
/// returns the smallest point (to `xtol`) where it holds.
pub fn bisect_predicate<T, F>(mut pred: F, mut lo: T, mut hi: T, xtol: T) -> T
where
    T: Real,
    F: FnMut(T) -> bool,
{
    let half = T::lit(0.5);
    while (hi - lo).abs() > xtol {
        let mid = half * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const K15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let radius = half * (b - a);
    let fc = f(center);
    let mut kronrod = fc * T::lit(K15_WEIGHTS[7]);
    let mut gauss = fc * T::lit(G7_WEIGHTS[3]);
    for (i, &node) in GK_NODES.iter().take(7).enumerate() {
        let dx = radius * T::lit(node);
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + T::lit(K15_WEIGHTS[i]) * pair;
        if i % 2 == 1 {
            gauss = gauss + T::lit(G7_WEIGHTS[i / 2]) * pair;
        }
    }
    (kronrod * radius, ((kronrod - gauss) * radius).abs())
}

/// Adaptive Gauss-Kronrod (7/15) quadrature of `f` over `[a, b]`.
///
/// `breaks` are interior points where `f` may fail to be smooth; the
/// interval is split there before adaptation. Converges when the summed
/// error estimate drops below `rel_tol * |integral|` (or an absolute floor
/// of `rel_tol * sum |pieces|`).
pub fn integrate<T, F>(f: F, a: T, b: T, breaks: &[T], rel_tol: T) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    if a == b {
        return Ok(T::zero());
    }
    let (lo, hi, sign) = if a < b {
        (a, b, T::one())
    } else {
        (b, a, -T::one())
    };
    let mut cuts: Vec<T> = vec![lo];
    cuts.extend(breaks.iter().copied().filter(|&x| x > lo && x < hi));
    cuts.push(hi);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());

    struct Piece<T> {
        a: T,
        b: T,
        value: T,
        err: T,
    }
    let mut pieces: Vec<Piece<T>> = cuts
        .windows(2)
        .map(|w| {
            let (value, err) = gk15(&f, w[0], w[1]);
            Piece {
                a: w[0],
                b: w[1],
                value,
                err,
            }
        })
        .collect();

    let half = T::lit(0.5);
    for _ in 0..2000 {
        let total = pieces.iter().fold(T::zero(), |s, p| s + p.value);
        let abs_total = pieces.iter().fold(T::zero(), |s, p| s + p.value.abs());
        let err = pieces.iter().fold(T::zero(), |s, p| s + p.err);
        if err <= rel_tol * total.abs().max(abs_total * T::epsilon()) || err == T::zero() {
            return Ok(sign * total);
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .fold((0, T::zero()), |(wi, we), (i, p)| {
                if p.err > we {
                    (i, p.err)
                } else {
                    (wi, we)
                }
            });
        let p = pieces.swap_remove(worst);
        let mid = half * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            pieces.push(p);
            break;
        }
        for (x0, x1) in [(p.a, mid), (mid, p.b)] {
            let (value, err) = gk15(&f, x0, x1);
            pieces.push(Piece {
                a: x0,
                b: x1,
                value,
                err,
            });
        }
    }
    let total = pieces.iter().fold(T::zero(), |s, p| s + p.value);
    let err = pieces.iter().fold(T::zero(), |s, p| s + p.err);
    Err(Error::Quadrature {
        lower: lo.to_f64_lossy(),
        upper: hi.to_f64_lossy(),
        estimate: (sign * total).to_f64_lossy(),
        error: err.to_f64_lossy(),
    })
}

/// A single term `coef * x^power`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm<T> {
    pub coef: T,
    pub power: T,
}

impl<T: Real> PowerTerm<T> {
    pub fn new(coef: T, power: T) -> Self {
        Self { coef, power }
    }

    #[inline]
    pub fn eval(&self, x: T) -> T {
        self.coef * pow(x, self.power)
    }

    /// Exact `∫_lo^hi coef z^power dz`, switching to the logarithmic
    /// antiderivative when `power + 1` is numerically zero.
    pub fn integral(&self, lo: T, hi: T) -> T {
        let p1 = self.power + T::one();
        if p1.abs() < T::tol(1e-9) {
            self.coef * (hi.ln() - lo.ln())
        } else {
            self.coef * (pow(hi, p1) - pow(lo, p1)) / p1
        }
    }

    /// Product with another power term.
    pub fn times(&self, other: &PowerTerm<T>) -> PowerTerm<T> {
        PowerTerm::new(self.coef * other.coef, self.power + other.power)
    }
}

/// Sum of power terms.
pub fn eval_terms<T: Real>(terms: &[PowerTerm<T>], x: T) -> T {
    terms.iter().fold(T::zero(), |s, t| s + t.eval(x))
}
