//! Fixed-step integrators.
//!
//! The stochastic steppers are plain Euler–Maruyama with Gaussian
//! increments `N(0, dt)` and a hard clamp into the model's state space after
//! every step. The drift points inward at both poles of the collapse SDE and
//! the diffusion vanishes there, so the clamp only absorbs finite-step
//! overshoot.

mod bloch;
mod coupled;
mod ensemble;

pub use bloch::{
    simulate_deterministic_bloch, simulate_weak_measurement, weak_measurement_ensemble, Trajectory3,
    WeakMeasurementStepper,
};
pub use coupled::{coupled_gap_study, simulate_coupled_pair, CoupledPair, GapStudy, MAX_BAND_WIDTH};
pub use ensemble::{
    run_indexed, simulate_ensemble, simulate_ensemble_with, EnsembleSummary, MomentSeries, Reducer,
};

use crate::rng::Increments;
use crate::sde::{CollapseSde, ScalarSde};
use crate::{Error, ModelParams, Result};

/// One Euler–Maruyama step of `sde`, clamped into its bounds.
#[inline]
pub fn euler_step<S: ScalarSde + ?Sized>(sde: &S, x: f64, dt: f64, dw: f64, bounds: (f64, f64)) -> f64 {
    (x + sde.drift(x) * dt + sde.diffusion(x) * dw).clamp(bounds.0, bounds.1)
}

/// One step of the collapse SDE for an explicit Brownian increment `dw`.
#[inline]
pub fn em_step(u3: f64, params: &ModelParams, dw: f64) -> f64 {
    euler_step(&CollapseSde::new(*params), u3, params.time_step(), dw, (-1.0, 1.0))
}

/// Infinite sample path of a scalar SDE. The first item is the initial
/// value; each further item is one Euler–Maruyama step later.
pub struct Path<S: ScalarSde> {
    sde: S,
    x: f64,
    dt: f64,
    bounds: (f64, f64),
    noise: Increments,
    started: bool,
}

impl<S: ScalarSde> Path<S> {
    pub fn new(sde: S, dt: f64, x0: f64, seed: u64) -> Result<Self> {
        let bounds = sde.bounds();
        if !(x0 >= bounds.0 && x0 <= bounds.1) {
            return Err(Error::Domain {
                value: x0,
                domain: "model state space",
            });
        }
        Ok(Path {
            sde,
            x: x0,
            dt,
            bounds,
            noise: Increments::new(seed, dt),
            started: false,
        })
    }

    pub fn current(&self) -> f64 {
        self.x
    }
}

impl<S: ScalarSde> Iterator for Path<S> {
    type Item = f64;

    #[inline]
    fn next(&mut self) -> Option<f64> {
        if self.started {
            let dw = self.noise.next_increment();
            self.x = euler_step(&self.sde, self.x, self.dt, dw, self.bounds);
        } else {
            self.started = true;
        }
        Some(self.x)
    }
}

/// Sample path of the collapse SDE starting at `u3_0`.
pub fn collapse_path(params: &ModelParams, u3_0: f64, seed: u64) -> Result<Path<CollapseSde>> {
    Path::new(CollapseSde::new(*params), params.time_step(), u3_0, seed)
}

/// A decimated, uniformly sampled time series.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    sample_dt: f64,
    values: Vec<f64>,
    seed: Option<u64>,
    params: Option<ModelParams>,
    variable: String,
}

impl Trajectory {
    /// Wrap an externally produced series sampled every `sample_dt`.
    pub fn from_samples(sample_dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(sample_dt.is_finite() && sample_dt > 0.0) {
            return Err(Error::param("sample_dt", format!("must be finite and > 0, got {sample_dt}")));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain {
                value: *bad,
                domain: "finite reals",
            });
        }
        Ok(Trajectory {
            sample_dt,
            values,
            seed: None,
            params: None,
            variable: "u3".to_string(),
        })
    }

    pub fn sample_dt(&self) -> f64 {
        self.sample_dt
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn params(&self) -> Option<&ModelParams> {
        self.params.as_ref()
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.sample_dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(|i| self.time(i))
    }

    /// `(len − 1) · sample_dt`.
    pub fn duration(&self) -> f64 {
        self.values.len().saturating_sub(1) as f64 * self.sample_dt
    }

    pub fn last(&self) -> Option<f64> {
        self.values.last().copied()
    }

    pub(crate) fn with_values(&self, values: Vec<f64>) -> Trajectory {
        Trajectory {
            values,
            ..self.clone()
        }
    }

    /// Drop the leading samples covering `time`.
    pub fn skip_time(&self, time: f64) -> Trajectory {
        let skip = ((time / self.sample_dt).ceil() as usize).min(self.values.len());
        self.with_values(self.values[skip..].to_vec())
    }
}

fn check_run(n_steps: usize, stride: usize) -> Result<usize> {
    if n_steps == 0 {
        return Err(Error::param("n_steps", "must be >= 1"));
    }
    if stride == 0 {
        return Err(Error::param("stride", "must be >= 1"));
    }
    if !n_steps.is_multiple_of(stride) {
        return Err(Error::param(
            "stride",
            format!("must divide n_steps so the final point lands on the grid ({n_steps} % {stride} != 0)"),
        ));
    }
    Ok(n_steps / stride + 1)
}

/// Integrate any registered model, keeping every `stride`-th sample.
pub fn simulate_model<S: ScalarSde + ?Sized>(
    sde: &S,
    params: &ModelParams,
    x0: f64,
    n_steps: usize,
    stride: usize,
    seed: u64,
) -> Result<Trajectory> {
    let n_samples = check_run(n_steps, stride)?;
    let mut values = Vec::new();
    values
        .try_reserve_exact(n_samples)
        .map_err(|_| Error::Allocation(n_samples))?;
    let path = Path::new(sde, params.time_step(), x0, seed)?;
    values.extend(path.take(n_steps + 1).step_by(stride));
    debug_assert_eq!(values.len(), n_samples);
    Ok(Trajectory {
        sample_dt: params.time_step() * stride as f64,
        values,
        seed: Some(seed),
        params: Some(*params),
        variable: sde.variable().to_string(),
    })
}

/// Integrate the collapse SDE from `u3_0` for `n_steps` steps.
pub fn simulate_trajectory(
    params: &ModelParams,
    u3_0: f64,
    n_steps: usize,
    stride: usize,
    seed: u64,
) -> Result<Trajectory> {
    if u3_0.abs() > 1.0 {
        return Err(Error::Domain {
            value: u3_0,
            domain: "[-1, 1]",
        });
    }
    simulate_model(&CollapseSde::new(*params), params, u3_0, n_steps, stride, seed)
}

/// Closed-form relaxation of the noiseless dynamics,
/// `s + (u₀ − s) e^{−(G + 1/T) t}`.
pub fn deterministic_relaxation(params: &ModelParams, u3_0: f64, t: f64) -> Result<f64> {
    let s = params.steady_state()?;
    Ok(s + (u3_0 - s) * (-params.relaxation_rate() * t).exp())
}
