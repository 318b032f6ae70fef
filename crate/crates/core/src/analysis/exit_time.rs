use serde::Serialize;

use super::check_band;
use crate::fokker_planck::{analytic_exit_lower, analytic_exit_upper, exit_time_bound};
use crate::integrate::{collapse_path, run_indexed};
use crate::{Error, ModelParams, Result};

/// Monte-Carlo first-passage time out of an endpoint band.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExitTimeReport {
    pub start: f64,
    pub delta: f64,
    pub mean: f64,
    pub std_error: f64,
    /// Runs that left the band.
    pub n_samples: usize,
    /// Runs cut off at the step limit; excluded from the mean.
    pub n_censored: usize,
    /// Linearized exit time from the start point, when defined.
    pub analytic: Option<f64>,
    /// `δ/G` for a lower-band start when the bound's condition holds.
    pub bound: Option<f64>,
}

/// Steps until `U₃` first enters `(−1 + δ, 1 − δ)`; `None` if censored.
fn first_exit(params: &ModelParams, start: f64, delta: f64, max_steps: usize, seed: u64) -> Option<usize> {
    let (lo, hi) = (-1.0 + delta, 1.0 - delta);
    collapse_path(params, start, seed)
        .expect("start validated")
        .take(max_steps + 1)
        .position(|u| u > lo && u < hi)
}

/// Time to leave the endpoint band containing `start`, averaged over
/// `n_traj` runs of at most `max_steps` steps each.
pub fn exit_time_mc(
    params: &ModelParams,
    start: f64,
    delta: f64,
    n_traj: usize,
    max_steps: usize,
    seed: u64,
) -> Result<ExitTimeReport> {
    check_band(delta)?;
    let lower = start >= -1.0 && start <= -1.0 + delta;
    let upper = start <= 1.0 && start >= 1.0 - delta;
    if !(lower || upper) {
        return Err(Error::Domain {
            value: start,
            domain: "an endpoint band [-1, -1 + delta] or [1 - delta, 1]",
        });
    }
    if n_traj == 0 {
        return Err(Error::param("n_traj", "must be >= 1"));
    }
    let dt = params.time_step();
    let exits = run_indexed(n_traj, seed, |_, s| first_exit(params, start, delta, max_steps, s));
    let times: Vec<f64> = exits.iter().flatten().map(|&k| k as f64 * dt).collect();
    if times.is_empty() {
        return Err(Error::AllCensored(n_traj));
    }
    let n = times.len() as f64;
    let mean = times.iter().sum::<f64>() / n;
    let std_error = if times.len() > 1 {
        let var = times.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    let g = params.pump_rate();
    let (analytic, bound) = if lower {
        let remaining = delta - (start + 1.0);
        let analytic = (g > 0.0).then(|| analytic_exit_lower(remaining, g).ok()).flatten();
        let bound = params
            .decay_time()
            .and_then(|t| exit_time_bound(delta, g, t).ok())
            .filter(|_| start == -1.0);
        (analytic, bound)
    } else {
        let remaining = delta - (1.0 - start);
        let analytic = params.decay_time().and_then(|t| analytic_exit_upper(remaining, t).ok());
        (analytic, None)
    };
    Ok(ExitTimeReport {
        start,
        delta,
        mean,
        std_error,
        n_samples: times.len(),
        n_censored: n_traj - times.len(),
        analytic,
        bound,
    })
}
