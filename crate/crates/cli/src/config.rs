//! Run configuration: built-in defaults, overridden by an optional TOML
//! file, overridden by command-line flags.
//!
//! The file uses the flag names with `-` replaced by `_`:
//!
//! ```toml
//! G = 0.6
//! T = 1.0
//! alpha = 10.0
//! dt = 1e-4
//! steps = 2000000
//! seed = 42
//! gt_list = [0.25, 0.5, 1.0, 2.0, 4.0]
//! out = "results"
//! format = "csv"
//! ```

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use telegraph_core::analysis::{default_burn_in, DEFAULT_BAND};
use telegraph_core::ModelParams;

use crate::error::{CliError, CliResult};

/// Seed used when none is given, so bare invocations are reproducible.
pub const DEFAULT_SEED: u64 = 42;

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "TELEGRAPH_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Every setting a command may read. Unset fields fall through to the
/// next layer.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(rename = "G")]
    pub pump_rate: Option<f64>,
    #[serde(rename = "T")]
    pub decay_time: Option<f64>,
    pub alpha: Option<f64>,
    pub dt: Option<f64>,
    pub steps: Option<usize>,
    pub stride: Option<usize>,
    pub seed: Option<u64>,
    pub n_traj: Option<usize>,
    pub delta: Option<f64>,
    pub burn_in: Option<f64>,
    pub smooth_width: Option<f64>,
    pub bins: Option<usize>,
    pub n_grid: Option<usize>,
    pub u0: Option<f64>,
    pub batches: Option<usize>,
    pub model: Option<String>,
    pub gt_list: Option<Vec<f64>>,
    pub alpha_list: Option<Vec<f64>>,
    pub u0_list: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
}

impl Overrides {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// `self` wins wherever it is set.
    pub fn over(self, base: Overrides) -> Overrides {
        macro_rules! pick {
            ($($f:ident),*) => { Overrides { $($f: self.$f.or(base.$f)),* } };
        }
        pick!(
            pump_rate, decay_time, alpha, dt, steps, stride, seed, n_traj, delta, burn_in, smooth_width, bins,
            n_grid, u0, batches, model, gt_list, alpha_list, u0_list, out, format, threads
        )
    }
}

/// Resolved settings of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    #[serde(rename = "G")]
    pub pump_rate: f64,
    #[serde(rename = "T")]
    pub decay_time: f64,
    pub alpha: f64,
    pub dt: f64,
    pub steps: usize,
    pub stride: usize,
    pub seed: u64,
    pub n_traj: usize,
    pub delta: f64,
    /// `None` means the default transient for the current parameters.
    pub burn_in: Option<f64>,
    pub smooth_width: Option<f64>,
    pub bins: usize,
    pub n_grid: usize,
    pub u0: f64,
    pub batches: usize,
    pub model: String,
    pub gt_list: Vec<f64>,
    pub alpha_list: Vec<f64>,
    pub u0_list: Vec<f64>,
    pub out: PathBuf,
    pub format: Format,
    pub threads: Option<usize>,
    pub check: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            pump_rate: 0.6,
            decay_time: 1.0,
            alpha: 10.0,
            dt: 1e-4,
            steps: 2_000_000,
            stride: 1,
            seed: DEFAULT_SEED,
            n_traj: 10_000,
            delta: DEFAULT_BAND,
            burn_in: None,
            smooth_width: None,
            bins: 50,
            n_grid: 4096,
            u0: 1.0,
            batches: 10,
            model: "collapse".to_string(),
            gt_list: vec![0.25, 0.5, 1.0, 2.0, 4.0],
            alpha_list: vec![0.05, 0.5, 10.0],
            u0_list: vec![-0.5, 0.0, 0.5],
            out: PathBuf::from("."),
            format: Format::Csv,
            threads: None,
            check: false,
        }
    }
}

impl RunConfig {
    /// Apply `o` on top of the defaults and validate.
    pub fn resolve(o: Overrides, check: bool) -> CliResult<Self> {
        let d = RunConfig::default();
        let threads = match o.threads {
            Some(n) => Some(n),
            None => threads_from_env()?,
        };
        let cfg = RunConfig {
            pump_rate: o.pump_rate.unwrap_or(d.pump_rate),
            decay_time: o.decay_time.unwrap_or(d.decay_time),
            alpha: o.alpha.unwrap_or(d.alpha),
            dt: o.dt.unwrap_or(d.dt),
            steps: o.steps.unwrap_or(d.steps),
            stride: o.stride.unwrap_or(d.stride),
            seed: o.seed.unwrap_or(d.seed),
            n_traj: o.n_traj.unwrap_or(d.n_traj),
            delta: o.delta.unwrap_or(d.delta),
            burn_in: o.burn_in,
            smooth_width: o.smooth_width,
            bins: o.bins.unwrap_or(d.bins),
            n_grid: o.n_grid.unwrap_or(d.n_grid),
            u0: o.u0.unwrap_or(d.u0),
            batches: o.batches.unwrap_or(d.batches),
            model: o.model.unwrap_or(d.model),
            gt_list: o.gt_list.unwrap_or(d.gt_list),
            alpha_list: o.alpha_list.unwrap_or(d.alpha_list),
            u0_list: o.u0_list.unwrap_or(d.u0_list),
            out: o.out.unwrap_or(d.out),
            format: o.format.unwrap_or(d.format),
            threads,
            check,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> CliResult<()> {
        self.params()?;
        let bad = |what: &str| Err(CliError::Config(what.to_string()));
        if self.steps == 0 {
            return bad("steps must be >= 1");
        }
        if self.stride == 0 || !self.steps.is_multiple_of(self.stride) {
            return bad("stride must be >= 1 and divide steps");
        }
        if self.n_traj == 0 {
            return bad("n_traj must be >= 1");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta must be in (0, 1)");
        }
        if let Some(b) = self.burn_in {
            if !(b.is_finite() && b >= 0.0) {
                return bad("burn_in must be finite and >= 0");
            }
        }
        if self.bins < 2 {
            return bad("bins must be >= 2");
        }
        if self.batches == 0 || self.batches > self.n_traj {
            return bad("batches must be in 1..=n_traj");
        }
        if self.threads == Some(0) {
            return bad("threads must be >= 1");
        }
        if !(self.u0.abs() <= 1.0) && self.model != "shifted" && !self.model.starts_with("linear") {
            return bad("u0 must lie in [-1, 1]");
        }
        if self.gt_list.is_empty() || self.gt_list.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
            return bad("every GT must be finite and > 0");
        }
        if self.alpha_list.is_empty() || self.alpha_list.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return bad("every alpha must be finite and >= 0");
        }
        if self.u0_list.is_empty() || self.u0_list.iter().any(|u| !(u.abs() <= 1.0)) {
            return bad("every u0 must lie in [-1, 1]");
        }
        Ok(())
    }

    pub fn params(&self) -> CliResult<ModelParams> {
        ModelParams::new(self.pump_rate, self.decay_time, self.alpha, self.dt).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Parameters of the current run with `G = GT/T`.
    pub fn params_at_gt(&self, gt: f64) -> CliResult<ModelParams> {
        self.params()?
            .with_pump_rate(gt / self.decay_time)
            .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn params_at_alpha(&self, alpha: f64) -> CliResult<ModelParams> {
        self.params()?
            .with_noise_strength(alpha)
            .map_err(|e| CliError::Config(e.to_string()))
    }

    /// Whole steps discarded before statistics are taken.
    pub fn burn_in_steps(&self, params: &ModelParams) -> usize {
        let t = self.burn_in.unwrap_or_else(|| default_burn_in(params));
        (t / params.time_step()).ceil() as usize
    }
}

fn threads_from_env() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Config(format!("{THREADS_ENV}={v} is not a thread count"))),
        _ => Ok(None),
    }
}
