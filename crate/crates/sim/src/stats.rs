//! Sample moments with a fixed, sequential reduction order.

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Mean, sample variance and the standard errors of both.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    /// Standard error of the mean, `s/√n`.
    pub mean_se: f64,
    /// Standard error of the sample variance from the fourth central moment:
    /// `√((m₄ - s⁴(n-3)/(n-1))/n)`.
    pub var_se: f64,
}

impl Moments {
    /// Two-pass moments over `values`, summed in slice order.
    pub fn from_slice(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self {
                n,
                mean: f64::NAN,
                variance: f64::NAN,
                mean_se: f64::NAN,
                var_se: f64::NAN,
            };
        }
        let nf = n as f64;
        let mut s = KahanSum::default();
        values.iter().for_each(|&v| s.add(v));
        let mean = s.total() / nf;
        let mut s2 = KahanSum::default();
        let mut s4 = KahanSum::default();
        for &v in values {
            let d = v - mean;
            let d2 = d * d;
            s2.add(d2);
            s4.add(d2 * d2);
        }
        if n == 1 {
            return Self {
                n,
                mean,
                variance: 0.0,
                mean_se: f64::NAN,
                var_se: f64::NAN,
            };
        }
        let variance = s2.total() / (nf - 1.0);
        let m4 = s4.total() / nf;
        let var_se = ((m4 - variance * variance * (nf - 3.0) / (nf - 1.0)) / nf)
            .max(0.0)
            .sqrt();
        Self {
            n,
            mean,
            variance,
            mean_se: (variance / nf).sqrt(),
            var_se,
        }
    }
}

/// Mean and standard error of a Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
    pub censored: usize,
}

impl Estimate {
    pub fn from_samples(values: &[f64], censored: usize) -> Self {
        let m = Moments::from_slice(values);
        Self {
            mean: m.mean,
            se: if values.len() > 1 { m.mean_se } else { 0.0 },
            n: m.n,
            censored,
        }
    }

    /// `|mean - target| ≤ k·se` (with a tiny absolute floor for exact cases).
    pub fn agrees_with(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.se + 1e-12 * target.abs().max(1e-300)
    }
}
