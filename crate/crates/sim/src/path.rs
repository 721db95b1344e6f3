//! Exact log-normal stepping with Brownian-bridge barrier monitoring.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::config::SimConfig;
use crate::rng::{normal_stream, uniform_stream};

/// Bridge crossing probabilities below `e^{-37}` are treated as zero.
const BRIDGE_CUTOFF: f64 = 37.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Lower,
    Upper,
}

/// One GBM path in log coordinates.
pub struct Stepper {
    drift: f64,
    vol: f64,
    dt: f64,
    var: f64,
    substeps: usize,
    inv_sqrt_k: f64,
    normals: ChaCha8Rng,
    uniforms: ChaCha8Rng,
    pub y: f64,
    pub t: f64,
}

impl Stepper {
    pub fn new(cfg: &SimConfig, path: u64, x: f64) -> Self {
        let r = cfg.market.r();
        let s = cfg.market.sigma();
        Self {
            drift: (r - 0.5 * s * s) * cfg.dt,
            vol: s * cfg.dt.sqrt(),
            dt: cfg.dt,
            var: s * s * cfg.dt,
            substeps: cfg.substeps,
            inv_sqrt_k: 1.0 / (cfg.substeps as f64).sqrt(),
            normals: normal_stream(cfg.seed, path),
            uniforms: uniform_stream(cfg.seed, path),
            y: x.ln(),
            t: 0.0,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advance one step; returns `(y₀, y₁, t₀)`.
    #[inline]
    pub fn step(&mut self) -> (f64, f64, f64) {
        let z: f64 = if self.substeps == 1 {
            self.normals.sample(StandardNormal)
        } else {
            let mut acc = 0.0;
            for _ in 0..self.substeps {
                let zi: f64 = self.normals.sample(StandardNormal);
                acc += zi;
            }
            acc * self.inv_sqrt_k
        };
        let y0 = self.y;
        let t0 = self.t;
        self.y = y0 + self.drift + self.vol * z;
        self.t = t0 + self.dt;
        (y0, self.y, t0)
    }

    /// Uniform on `(0, 1]`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        1.0 - self.uniforms.random::<f64>()
    }

    /// `exp(-2 d₀ d₁ / (σ²Δt))` for distances `d₀, d₁ > 0`, or `None` if negligible.
    #[inline]
    fn bridge_probability(&self, d0: f64, d1: f64) -> Option<f64> {
        let e = 2.0 * d0 * d1 / self.var;
        (e < BRIDGE_CUTOFF).then(|| (-e).exp())
    }
}

/// A barrier crossing detected during a step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub side: Side,
    /// Index into that side's level list.
    pub index: usize,
    pub t: f64,
}

/// First-passage monitor for sorted barrier levels on both sides of the start.
///
/// Lower levels are kept nearest-first (descending), upper levels ascending,
/// so each side only ever has to test its next uncrossed level.
#[derive(Debug, Clone)]
pub struct Monitor {
    lower: Vec<f64>,
    upper: Vec<f64>,
    next_lo: usize,
    next_hi: usize,
    bridge: bool,
}

impl Monitor {
    /// `lower` must be descending and `upper` ascending (price levels).
    pub fn new(lower: &[f64], upper: &[f64], bridge: bool) -> Self {
        debug_assert!(lower.windows(2).all(|w| w[0] >= w[1]));
        debug_assert!(upper.windows(2).all(|w| w[0] <= w[1]));
        let log = |v: &[f64]| {
            v.iter()
                .map(|&l| if l > 0.0 { l.ln() } else { f64::NEG_INFINITY })
                .collect()
        };
        Self {
            lower: log(lower),
            upper: log(upper),
            next_lo: 0,
            next_hi: 0,
            bridge,
        }
    }

    pub fn lower_crossed(&self) -> usize {
        self.next_lo
    }
    pub fn upper_crossed(&self) -> usize {
        self.next_hi
    }

    /// Levels already breached at the starting point count as crossed at `t = 0`.
    pub fn start(&mut self, y: f64, events: &mut Vec<Event>) {
        while self.next_lo < self.lower.len() && y <= self.lower[self.next_lo] {
            events.push(Event {
                side: Side::Lower,
                index: self.next_lo,
                t: 0.0,
            });
            self.next_lo += 1;
        }
        while self.next_hi < self.upper.len() && y >= self.upper[self.next_hi] {
            events.push(Event {
                side: Side::Upper,
                index: self.next_hi,
                t: 0.0,
            });
            self.next_hi += 1;
        }
    }

    /// Record crossings during the step `(y₀, t₀) → (y₁, t₀ + Δt)`.
    ///
    /// An endpoint beyond a level gives a log-linear interpolated time; a
    /// bridge-only crossing is placed at the step midpoint. One uniform per
    /// side and step drives every level on that side, so the implied running
    /// extreme is coherent across levels.
    pub fn advance(&mut self, st: &mut Stepper, y0: f64, y1: f64, t0: f64, events: &mut Vec<Event>) {
        let dt = st.dt();
        let mut u: Option<f64> = None;
        let mut last = t0;
        while let Some(&l) = self.lower.get(self.next_lo) {
            let (d0, d1) = (y0 - l, y1 - l);
            let t = if d1 <= 0.0 {
                t0 + dt * d0 / (d0 - d1)
            } else if self.bridge {
                match st.bridge_probability(d0, d1) {
                    Some(p) if *u.get_or_insert_with(|| st.uniform()) <= p => t0 + 0.5 * dt,
                    _ => break,
                }
            } else {
                break;
            };
            last = last.max(t);
            events.push(Event {
                side: Side::Lower,
                index: self.next_lo,
                t: last,
            });
            self.next_lo += 1;
        }
        let mut u: Option<f64> = None;
        let mut last = t0;
        while let Some(&l) = self.upper.get(self.next_hi) {
            let (d0, d1) = (l - y0, l - y1);
            let t = if d1 <= 0.0 {
                t0 + dt * d0 / (d0 - d1)
            } else if self.bridge {
                match st.bridge_probability(d0, d1) {
                    Some(p) if *u.get_or_insert_with(|| st.uniform()) <= p => t0 + 0.5 * dt,
                    _ => break,
                }
            } else {
                break;
            };
            last = last.max(t);
            events.push(Event {
                side: Side::Upper,
                index: self.next_hi,
                t: last,
            });
            self.next_hi += 1;
        }
    }
}

/// Exit from the corridor `(lower, upper)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exit {
    pub tau: f64,
    pub side: Side,
    /// Price at exit, snapped to the barrier.
    pub s: f64,
    pub censored: bool,
}

/// Simulate path `index` of `cfg` until it leaves the configured corridor.
///
/// A path starting on or outside a barrier exits at `τ = 0`. A path still
/// inside at `t_max` is returned censored with its last price.
pub fn simulate_exit(index: u64, cfg: &SimConfig) -> Exit {
    let (a, b) = (cfg.corridor.a(), cfg.corridor.b());
    let mut st = Stepper::new(cfg, index, cfg.x);
    let mut mon = Monitor::new(&[a], &[b], cfg.bridge);
    let mut events = Vec::with_capacity(2);
    mon.start(st.y, &mut events);
    loop {
        if let Some(e) = first_event(&events) {
            let s = if e.side == Side::Lower { a } else { b };
            return Exit {
                tau: e.t,
                side: e.side,
                s,
                censored: false,
            };
        }
        if st.t >= cfg.t_max {
            return Exit {
                tau: st.t,
                side: Side::Upper,
                s: st.y.exp(),
                censored: true,
            };
        }
        let (y0, y1, t0) = st.step();
        mon.advance(&mut st, y0, y1, t0, &mut events);
    }
}

/// Earliest event, lower side first on ties.
pub fn first_event(events: &[Event]) -> Option<Event> {
    events.iter().copied().fold(None, |best, e| match best {
        Some(b) if b.t <= e.t => Some(b),
        _ => Some(e),
    })
}
