//! Brute-force Monte Carlo oracles for the analytic layer.

use corridor_hedge::Payoff64;
use rayon::prelude::*;

use crate::config::SimConfig;
use crate::error::{Result, SimError};
use crate::path::{first_event, Event, Monitor, Side, Stepper};
use crate::stats::{Estimate, KahanSum};

/// Paths per deterministic reduction chunk.
const CHUNK: usize = 1024;

/// Where and when a simulated path left an interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stop {
    pub t: f64,
    /// Barrier level (or last price when censored).
    pub s: f64,
    pub side: Side,
    pub censored: bool,
}

/// `E[∫₀^τ e^{-κu} g(S_u) du + e^{-κτ} F(S_τ, side)]` for `τ` the first exit
/// from `(lower, upper)`, componentwise for `N` functionals at once.
///
/// The running integral uses the trapezoid rule, with a partial last step
/// ending at the crossing time. Censored paths contribute their integral up
/// to the horizon cap and no terminal term. `upper` may be infinite.
pub fn mc_functional<const N: usize>(
    cfg: &SimConfig,
    lower: f64,
    upper: f64,
    kappa: f64,
    running: impl Fn(f64) -> [f64; N] + Sync,
    terminal: impl Fn(&Stop) -> [f64; N] + Sync,
) -> Result<[Estimate; N]> {
    cfg.validate()?;
    if !(lower < upper) || !(lower >= 0.0) {
        return Err(SimError::Config(format!(
            "interval ({lower}, {upper}) is empty"
        )));
    }
    let samples: Vec<([f64; N], bool)> = (0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|i| functional_path(i, cfg, lower, upper, kappa, &running, &terminal))
        .collect();
    let censored = samples.iter().filter(|s| s.1).count();
    Ok(std::array::from_fn(|k| {
        let v: Vec<f64> = samples.iter().map(|s| s.0[k]).collect();
        Estimate::from_samples(&v, censored)
    }))
}

fn functional_path<const N: usize>(
    index: u64,
    cfg: &SimConfig,
    lower: f64,
    upper: f64,
    kappa: f64,
    running: &impl Fn(f64) -> [f64; N],
    terminal: &impl Fn(&Stop) -> [f64; N],
) -> ([f64; N], bool) {
    let ups: Vec<f64> = if upper.is_finite() { vec![upper] } else { vec![] };
    let mut st = Stepper::new(cfg, index, cfg.x);
    let mut mon = Monitor::new(&[lower], &ups, cfg.bridge);
    let mut events = Vec::with_capacity(2);
    let mut acc = [KahanSum::default(); N];
    let level = |e: &Event| if e.side == Side::Lower { lower } else { upper };

    mon.start(st.y, &mut events);
    if let Some(e) = first_event(&events) {
        let stop = Stop {
            t: 0.0,
            s: level(&e),
            side: e.side,
            censored: false,
        };
        return (terminal(&stop), false);
    }
    let mut g0 = running(cfg.x);
    loop {
        if st.t >= cfg.t_max {
            let out = std::array::from_fn(|k| acc[k].total());
            return (out, true);
        }
        let (y0, y1, t0) = st.step();
        mon.advance(&mut st, y0, y1, t0, &mut events);
        let w0 = (-kappa * t0).exp();
        if let Some(e) = first_event(&events) {
            let s = level(&e);
            let g1 = running(s);
            let w1 = (-kappa * e.t).exp();
            let h = 0.5 * (e.t - t0);
            for k in 0..N {
                acc[k].add(h * (w0 * g0[k] + w1 * g1[k]));
            }
            let stop = Stop {
                t: e.t,
                s,
                side: e.side,
                censored: false,
            };
            let f = terminal(&stop);
            let out = std::array::from_fn(|k| {
                acc[k].add(w1 * f[k]);
                acc[k].total()
            });
            return (out, false);
        }
        let g1 = running(y1.exp());
        let w1 = (-kappa * st.t).exp();
        let h = 0.5 * (st.t - t0);
        for k in 0..N {
            acc[k].add(h * (w0 * g0[k] + w1 * g1[k]));
        }
        g0 = g1;
    }
}

/// Stopping rule for [`mc_stopping_cost`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StoppingRule {
    /// `τ = 0`.
    Immediate,
    /// `τ = τ_I`, the corridor exit.
    Never,
    /// First exit from `(lower, upper)` ⊆ `[a, b]`.
    Thresholds { lower: f64, upper: f64 },
}

/// Monte Carlo estimate of `E[∫₀^τ e^{-2ru} f(S_u, h) du + e^{-2rτ} M(S_τ)]`
/// from `cfg.x`.
pub fn mc_stopping_cost(x: f64, h: f64, rule: StoppingRule, cfg: &SimConfig) -> Result<Estimate> {
    let payoff = Payoff64::new(&cfg.corridor, &cfg.market)?;
    let (a, b) = (cfg.corridor.a(), cfg.corridor.b());
    let cfg = cfg.with_spot(x);
    let (lo, hi) = match rule {
        StoppingRule::Immediate => {
            cfg.validate()?;
            return Ok(Estimate {
                mean: payoff.payoff(x),
                se: 0.0,
                n: cfg.n_paths,
                censored: 0,
            });
        }
        StoppingRule::Never => (a, b),
        StoppingRule::Thresholds { lower, upper } => (lower, upper),
    };
    if !(lo >= a && hi <= b && lo <= x && x <= hi) {
        return Err(SimError::Config(format!(
            "thresholds ({lo}, {hi}) must satisfy {a} <= lower <= {x} <= upper <= {b}"
        )));
    }
    let kappa = 2.0 * cfg.market.r();
    let [e] = mc_functional(
        &cfg,
        lo,
        hi,
        kappa,
        |s| [payoff.running_cost(s, h)],
        |stop| [if stop.censored { 0.0 } else { payoff.payoff(stop.s) }],
    )?;
    Ok(e)
}

/// Stopping-cost estimates for every threshold pair of a grid, all from the
/// same paths.
#[derive(Debug, Clone)]
pub struct ThresholdGrid {
    /// Lower thresholds, descending from `x` to `a`.
    pub lower: Vec<f64>,
    /// Upper thresholds, ascending from `x` to `b`.
    pub upper: Vec<f64>,
    /// `cost[i][j]` for the pair `(lower[i], upper[j])`.
    pub cost: Vec<Vec<Estimate>>,
}

impl ThresholdGrid {
    /// Pair with the smallest estimated cost: `(i, j, estimate)`.
    pub fn argmin(&self) -> (usize, usize, Estimate) {
        let mut best = (0, 0, self.cost[0][0]);
        for (i, row) in self.cost.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if e.mean < best.2.mean {
                    best = (i, j, *e);
                }
            }
        }
        best
    }
}

/// Evaluate `mc_stopping_cost` for all `n × n` pairs of thresholds evenly
/// spaced on `[a, x]` and `[x, b]` (both ends included).
///
/// Each path records when it first crosses every level and the running
/// integral at that time, so one pass serves every pair. Sums are reduced
/// per chunk of paths and the chunks are combined in order.
pub fn mc_threshold_grid(x: f64, h: f64, n: usize, cfg: &SimConfig) -> Result<ThresholdGrid> {
    let cfg = cfg.with_spot(x);
    cfg.validate()?;
    let payoff = Payoff64::new(&cfg.corridor, &cfg.market)?;
    let (a, b) = (cfg.corridor.a(), cfg.corridor.b());
    if !(x > a && x < b) || n < 2 {
        return Err(SimError::Config(format!(
            "grid needs a < x < b and n >= 2 (x = {x}, n = {n})"
        )));
    }
    let lower: Vec<f64> = (0..n).map(|i| x - (x - a) * i as f64 / (n - 1) as f64).collect();
    let upper: Vec<f64> = (0..n).map(|j| x + (b - x) * j as f64 / (n - 1) as f64).collect();
    let kappa = 2.0 * cfg.market.r();
    let m_lo: Vec<f64> = lower.iter().map(|&l| payoff.payoff(l)).collect();
    let m_hi: Vec<f64> = upper.iter().map(|&u| payoff.payoff(u)).collect();

    let chunks: Vec<(Vec<[KahanSum; 2]>, usize)> = (0..cfg.n_paths.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut sums = vec![[KahanSum::default(); 2]; n * n];
            let mut censored = 0;
            let end = ((c + 1) * CHUNK).min(cfg.n_paths);
            for i in (c * CHUNK)..end {
                let rec = level_record(i as u64, &cfg, &lower, &upper, kappa, h, &payoff);
                censored += rec.censored as usize;
                for li in 0..n {
                    for uj in 0..n {
                        let v = rec.cost(li, uj, &m_lo, &m_hi, kappa);
                        let s = &mut sums[li * n + uj];
                        s[0].add(v);
                        s[1].add(v * v);
                    }
                }
            }
            (sums, censored)
        })
        .collect();

    let mut total = vec![[KahanSum::default(); 2]; n * n];
    let mut censored = 0;
    for (sums, c) in &chunks {
        censored += c;
        for (t, s) in total.iter_mut().zip(sums) {
            t[0].add(s[0].total());
            t[1].add(s[1].total());
        }
    }
    let np = cfg.n_paths as f64;
    let cost = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let s = &total[i * n + j];
                    let mean = s[0].total() / np;
                    let var = ((s[1].total() - np * mean * mean) / (np - 1.0).max(1.0)).max(0.0);
                    Estimate {
                        mean,
                        se: (var / np).sqrt(),
                        n: cfg.n_paths,
                        censored,
                    }
                })
                .collect()
        })
        .collect();
    Ok(ThresholdGrid { lower, upper, cost })
}

/// First-crossing times and running integrals of one path at every level.
struct LevelRecord {
    t_lo: Vec<f64>,
    i_lo: Vec<f64>,
    t_hi: Vec<f64>,
    i_hi: Vec<f64>,
    /// Running integral at the horizon cap of a censored path.
    tail: f64,
    censored: bool,
}

impl LevelRecord {
    fn cost(&self, i: usize, j: usize, m_lo: &[f64], m_hi: &[f64], kappa: f64) -> f64 {
        let (tl, tu) = (self.t_lo[i], self.t_hi[j]);
        if tl.is_infinite() && tu.is_infinite() {
            self.tail
        } else if tl <= tu {
            self.i_lo[i] + (-kappa * tl).exp() * m_lo[i]
        } else {
            self.i_hi[j] + (-kappa * tu).exp() * m_hi[j]
        }
    }
}

fn level_record(
    index: u64,
    cfg: &SimConfig,
    lower: &[f64],
    upper: &[f64],
    kappa: f64,
    h: f64,
    payoff: &Payoff64,
) -> LevelRecord {
    let n = lower.len();
    let mut rec = LevelRecord {
        t_lo: vec![f64::INFINITY; n],
        i_lo: vec![0.0; n],
        t_hi: vec![f64::INFINITY; upper.len()],
        i_hi: vec![0.0; upper.len()],
        tail: 0.0,
        censored: false,
    };
    let f = |s: f64| payoff.running_cost(s, h);
    let mut st = Stepper::new(cfg, index, cfg.x);
    let mut mon = Monitor::new(lower, upper, cfg.bridge);
    let mut events: Vec<Event> = Vec::with_capacity(8);
    let mut integral = KahanSum::default();
    mon.start(st.y, &mut events);
    let record = |events: &mut Vec<Event>, rec: &mut LevelRecord, base: f64, t0: f64, w0g0: f64| {
        for e in events.drain(..) {
            let (lvl, t, i) = match e.side {
                Side::Lower => (lower[e.index], &mut rec.t_lo, &mut rec.i_lo),
                Side::Upper => (upper[e.index], &mut rec.t_hi, &mut rec.i_hi),
            };
            let w1g1 = (-kappa * e.t).exp() * f(lvl);
            t[e.index] = e.t;
            i[e.index] = base + 0.5 * (e.t - t0) * (w0g0 + w1g1);
        }
    };
    record(&mut events, &mut rec, 0.0, 0.0, 0.0);
    let mut w0g0 = f(cfg.x);
    loop {
        if mon.lower_crossed() == lower.len() || mon.upper_crossed() == upper.len() {
            return rec;
        }
        if st.t >= cfg.t_max {
            rec.tail = integral.total();
            rec.censored = true;
            return rec;
        }
        let (y0, y1, t0) = st.step();
        mon.advance(&mut st, y0, y1, t0, &mut events);
        record(&mut events, &mut rec, integral.total(), t0, w0g0);
        let w1g1 = (-kappa * st.t).exp() * f(y1.exp());
        integral.add(0.5 * (st.t - t0) * (w0g0 + w1g1));
        w0g0 = w1g1;
    }
}
