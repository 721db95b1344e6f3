use corridor_hedge::{Corridor64, Market64};

use crate::error::{Result, SimError};

/// Relative weight `e^{-2rT}` the horizon cap is allowed to truncate.
pub const TRUNCATION: f64 = 1e-8;

/// Monte Carlo settings for one corridor experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub market: Market64,
    pub corridor: Corridor64,
    pub x: f64,
    pub n_paths: usize,
    /// Time step in years.
    pub dt: f64,
    /// Horizon cap in years.
    pub t_max: f64,
    pub seed: u64,
    /// Brownian-bridge correction of barrier monitoring.
    pub bridge: bool,
    /// Normals summed per step. A run with `dt` and `substeps = 4` follows the
    /// same Brownian path as a run with `dt/4` and `substeps = 1`.
    pub substeps: usize,
}

impl SimConfig {
    /// r = 3%, σ = 30%, K = 100, S₀ = 100, a = 90, b = 110.
    pub fn par1() -> Self {
        let market = Market64::new(0.03, 0.30, 100.0).expect("valid defaults");
        let corridor = Corridor64::new(90.0, 110.0, &market).expect("valid defaults");
        Self {
            market,
            corridor,
            x: 100.0,
            n_paths: 100_000,
            dt: 1e-4,
            t_max: Self::horizon_for(market.r(), TRUNCATION),
            seed: 42,
            bridge: true,
            substeps: 1,
        }
    }

    /// Smallest `T` with `e^{-2rT} ≤ eps`.
    pub fn horizon_for(r: f64, eps: f64) -> f64 {
        -eps.ln() / (2.0 * r)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SimError::Config(m));
        if self.n_paths == 0 {
            return bad("n_paths must be at least 1".into());
        }
        if !(self.dt > 0.0 && self.dt <= 1e-2) {
            return bad(format!("dt = {} outside (0, 1e-2]", self.dt));
        }
        if self.substeps == 0 {
            return bad("substeps must be at least 1".into());
        }
        let need = Self::horizon_for(self.market.r(), TRUNCATION);
        if !(self.t_max >= need * (1.0 - 1e-12)) {
            return bad(format!(
                "t_max = {} below {need} needed for e^(-2rT) <= {TRUNCATION}",
                self.t_max
            ));
        }
        if !self.x.is_finite() || self.x <= 0.0 {
            return bad(format!("spot {} must be positive", self.x));
        }
        Ok(())
    }

    pub fn with_spot(mut self, x: f64) -> Self {
        self.x = x;
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Result<Self> {
        self.market = Market64::new(self.market.r(), sigma, self.market.strike())?;
        self.corridor = Corridor64::new(self.corridor.a(), self.corridor.b(), &self.market)?;
        self.t_max = self.t_max.max(Self::horizon_for(self.market.r(), TRUNCATION));
        Ok(self)
    }

    pub fn with_corridor(mut self, a: f64, b: f64) -> Result<Self> {
        self.corridor = Corridor64::new(a, b, &self.market)?;
        Ok(self)
    }
}

/// Run `f` on a dedicated pool of `threads` workers (the global pool when `None`).
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| SimError::ThreadPool(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}
