//! Exact shifted process `V` driven alongside its lower-pole linearization
//! `X` by one Brownian stream, for measuring the approximation gap
//! `Y = V − X` before `V` leaves `[0, δ)`.

use serde::Serialize;

use super::{euler_step, run_indexed};
use crate::rng::Increments;
use crate::sde::{LinearLowerSde, ScalarSde, ShiftedSde};
use crate::{Error, ModelParams, Result};

/// Largest band half-width accepted; the linearization is only meaningful
/// for a thin band.
pub const MAX_BAND_WIDTH: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoupledPair {
    pub dt: f64,
    pub delta: f64,
    /// `V = U₃ + 1`, recorded up to and including the exit step.
    pub exact: Vec<f64>,
    /// `X`, recorded on the same grid and stopped at the same step.
    pub linear: Vec<f64>,
    /// Step at which `V` first reached `δ`; `None` if the run was cut off.
    pub exit_step: Option<usize>,
    /// Both series consumed the same increments (always true here).
    pub shared_noise: bool,
    pub seed: u64,
}

impl CoupledPair {
    pub fn exit_time(&self) -> Option<f64> {
        self.exit_step.map(|k| k as f64 * self.dt)
    }

    /// `(V − X)²` at `min(t, τ)`.
    pub fn square_gap_at(&self, t: f64) -> f64 {
        let k = ((t / self.dt).round() as usize).min(self.exact.len() - 1);
        let y = self.exact[k] - self.linear[k];
        y * y
    }
}

fn check_band(v0: f64, delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= MAX_BAND_WIDTH) {
        return Err(Error::param("delta", format!("band width must be in (0, {MAX_BAND_WIDTH}], got {delta}")));
    }
    if !(v0 >= 0.0 && v0 < delta) {
        return Err(Error::Domain {
            value: v0,
            domain: "[0, delta)",
        });
    }
    Ok(())
}

struct PairRun {
    exit_step: Option<usize>,
    stop_gap: f64,
}

/// Advance both processes until `V ≥ δ`, `stop_at` steps, or `n_steps`.
fn run_pair(
    params: &ModelParams,
    v0: f64,
    delta: f64,
    n_steps: usize,
    seed: u64,
    stop_at: Option<usize>,
    mut record: Option<(&mut Vec<f64>, &mut Vec<f64>)>,
) -> PairRun {
    let exact = ShiftedSde::new(params);
    let linear = LinearLowerSde::new(params);
    let (exact_bounds, linear_bounds) = (exact.bounds(), linear.bounds());
    let dt = params.time_step();
    let mut noise = Increments::new(seed, dt);
    let (mut v, mut x) = (v0, v0);
    if let Some((vs, xs)) = record.as_mut() {
        vs.push(v);
        xs.push(x);
    }
    let limit = stop_at.map_or(n_steps, |s| s.min(n_steps));
    let mut exit_step = None;
    for k in 1..=limit {
        let dw = noise.next_increment();
        v = euler_step(&exact, v, dt, dw, exact_bounds);
        x = euler_step(&linear, x, dt, dw, linear_bounds);
        if let Some((vs, xs)) = record.as_mut() {
            vs.push(v);
            xs.push(x);
        }
        if v >= delta {
            exit_step = Some(k);
            break;
        }
    }
    PairRun {
        exit_step,
        stop_gap: (v - x) * (v - x),
    }
}

/// One coupled pair from `V₀ = X₀ = v0`, at most `n_steps` steps.
pub fn simulate_coupled_pair(params: &ModelParams, v0: f64, delta: f64, n_steps: usize, seed: u64) -> Result<CoupledPair> {
    check_band(v0, delta)?;
    let (mut exact, mut linear) = (Vec::new(), Vec::new());
    let run = run_pair(params, v0, delta, n_steps, seed, None, Some((&mut exact, &mut linear)));
    Ok(CoupledPair {
        dt: params.time_step(),
        delta,
        exact,
        linear,
        exit_step: run.exit_step,
        shared_noise: true,
        seed,
    })
}

/// Ensemble estimate of the gap `E[(V − X)²]` at the mean exit time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapStudy {
    pub delta: f64,
    pub n_pairs: usize,
    pub n_censored: usize,
    pub mean_exit_time: f64,
    pub exit_std_error: f64,
    /// Time at which the gap is evaluated (the mean exit time).
    pub eval_time: f64,
    pub mean_square_gap: f64,
    pub gap_std_error: f64,
}

/// Estimate the mean exit time from `[0, δ)`, then re-run the same pairs
/// (same seeds) to `min(mean exit time, τ)` and average `(V − X)²` there.
pub fn coupled_gap_study(
    params: &ModelParams,
    v0: f64,
    delta: f64,
    n_steps: usize,
    n_pairs: usize,
    master_seed: u64,
) -> Result<GapStudy> {
    check_band(v0, delta)?;
    if n_pairs < 2 {
        return Err(Error::param("n_pairs", "need at least two pairs for an error estimate"));
    }
    let exits = run_indexed(n_pairs, master_seed, |_, seed| {
        run_pair(params, v0, delta, n_steps, seed, None, None).exit_step
    });
    let exited: Vec<f64> = exits.iter().flatten().map(|&k| k as f64 * params.time_step()).collect();
    if exited.is_empty() {
        return Err(Error::AllCensored(n_pairs));
    }
    let (mean_exit_time, exit_std_error) = mean_and_se(&exited);
    let stop = (mean_exit_time / params.time_step()).round() as usize;
    let gaps = run_indexed(n_pairs, master_seed, |_, seed| {
        run_pair(params, v0, delta, n_steps, seed, Some(stop), None).stop_gap
    });
    let (mean_square_gap, gap_std_error) = mean_and_se(&gaps);
    Ok(GapStudy {
        delta,
        n_pairs,
        n_censored: n_pairs - exited.len(),
        mean_exit_time,
        exit_std_error,
        eval_time: stop as f64 * params.time_step(),
        mean_square_gap,
        gap_std_error,
    })
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
