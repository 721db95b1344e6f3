//! Parameter sweeps over spot, volatility and upper boundary.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use crate::config::SimConfig;
use crate::error::{Result, SimError};
use crate::strategy::{estimate_all, Plans, StrategyStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sweep {
    Spot,
    Sigma,
    B,
}

impl Sweep {
    pub const ALL: [Sweep; 3] = [Sweep::Spot, Sweep::Sigma, Sweep::B];

    /// Spot 91..109 step 2; σ from 20% to 40% in nine equal steps; b 105..150 step 5.
    pub fn default_grid(self) -> Vec<f64> {
        match self {
            Sweep::Spot => (0..10).map(|i| 91.0 + 2.0 * i as f64).collect(),
            Sweep::Sigma => (0..10).map(|i| 0.2 + 0.2 * i as f64 / 9.0).collect(),
            Sweep::B => (0..10).map(|i| 105.0 + 5.0 * i as f64).collect(),
        }
    }

    /// `cfg` with the swept parameter set to `v`.
    pub fn apply(self, cfg: &SimConfig, v: f64) -> Result<SimConfig> {
        match self {
            Sweep::Spot => {
                let (a, b) = (cfg.corridor.a(), cfg.corridor.b());
                if !(v > a && v < b) {
                    return Err(SimError::Config(format!("spot {v} outside ({a}, {b})")));
                }
                Ok(cfg.with_spot(v))
            }
            Sweep::Sigma => Ok(cfg.with_sigma(v)?),
            Sweep::B => Ok(cfg.with_corridor(cfg.corridor.a(), v)?),
        }
    }
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sweep::Spot => "spot",
            Sweep::Sigma => "sigma",
            Sweep::B => "b",
        })
    }
}

impl FromStr for Sweep {
    type Err = SimError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spot" => Ok(Sweep::Spot),
            "sigma" => Ok(Sweep::Sigma),
            "b" => Ok(Sweep::B),
            _ => Err(SimError::Config(format!(
                "unknown sweep {s:?} (expected spot, sigma or b)"
            ))),
        }
    }
}

/// One grid value of a sweep; `Err` rows keep the failure message.
#[derive(Debug, Clone)]
pub struct CompareRow {
    pub param: f64,
    pub result: std::result::Result<[StrategyStats; 5], String>,
}

/// Recompute plans and strategy statistics for every grid value.
pub fn compare(sweep: Sweep, cfg: &SimConfig, grid: &[f64]) -> Vec<CompareRow> {
    grid.iter()
        .map(|&v| {
            let result = sweep
                .apply(cfg, v)
                .and_then(|c| Plans::new(&c).and_then(|plans| estimate_all(&c, &plans)))
                .map_err(|e| e.to_string());
            CompareRow { param: v, result }
        })
        .collect()
}

pub const CSV_HEADER: &str = "sweep_param,strategy,n_paths,seed,mean,variance,var_se,censored_count";

/// Write successful rows as CSV with 17 significant digits; failed rows are skipped.
pub fn write_csv<W: Write>(mut w: W, rows: &[CompareRow]) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for row in rows {
        let Ok(stats) = &row.result else { continue };
        for s in stats {
            writeln!(
                w,
                "{:.16e},{},{},{},{:.16e},{:.16e},{:.16e},{}",
                row.param, s.strategy, s.n, s.seed, s.mean, s.variance, s.var_se, s.censored
            )?;
        }
    }
    Ok(())
}

pub fn csv_string(rows: &[CompareRow]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("ascii output")
}
