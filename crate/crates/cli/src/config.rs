use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

/// Every tunable of every subcommand. A config file is a flat JSON object
/// with the same snake_case keys; flags given on the command line win.
#[derive(Args, Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Flat JSON config file
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Output directory (CSV goes to stdout when absent)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for Monte Carlo
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Also write (x, y) series for every figure into the output directory
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub emit_plot_data: Option<bool>,

    /// Interest rate
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub r: Option<f64>,
    /// Volatility
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub strike: Option<f64>,
    /// Current stock price
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub spot: Option<f64>,
    /// Lower corridor edge (defaults to the exercise boundary)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Upper corridor edge
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub b: Option<f64>,

    /// Single stock holding
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub h: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub h_min: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub h_max: Option<f64>,
    #[arg(long, global = true)]
    pub h_points: Option<usize>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub x_min: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub x_max: Option<f64>,
    #[arg(long, global = true)]
    pub x_points: Option<usize>,

    /// spot, sigma or b
    #[arg(long, global = true)]
    pub sweep: Option<String>,
    /// Comma-separated sweep values (defaults to the reference grid)
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub grid: Option<Vec<f64>>,
    #[arg(long = "n", global = true)]
    pub n_paths: Option<usize>,
    /// Time step in years
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    /// Brownian-bridge barrier correction
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub bridge: Option<bool>,

    /// zero-mean or superhedge
    #[arg(long, global = true)]
    pub mode: Option<String>,
}

impl RunConfig {
    /// Values from `--config` overlaid with the flags that were given.
    pub fn resolve(self) -> Result<Self, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = fs::read_to_string(&path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut base: Map<String, Value> = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        let Value::Object(flags) = serde_json::to_value(&self).expect("plain data") else {
            unreachable!()
        };
        for (k, v) in flags {
            if !v.is_null() {
                base.insert(k, v);
            }
        }
        let mut merged: RunConfig = serde_json::from_value(Value::Object(base))
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        merged.config = Some(path);
        Ok(merged)
    }

    /// Write the effective configuration next to the outputs.
    pub fn save(&self, dir: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).expect("plain data");
        write_file(&dir.join("config.json"), &text)
    }

    pub fn require<T: Copy>(v: Option<T>, flag: &str) -> Result<T, CliError> {
        v.ok_or_else(|| CliError::Usage(format!("missing --{flag}")))
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}
