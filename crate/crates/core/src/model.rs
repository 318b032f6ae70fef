//! Physical parameterization and the closed-form scalar functions of the
//! pumped two-level model.
//!
//! Time is dimensionless throughout; `T = 1` is the canonical scale.

use serde::Serialize;

use crate::{Error, Result};

/// Parameters of the collapse SDE plus the integration step.
///
/// Validated once at construction; the inline accessors used by the
/// steppers never re-check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pump_rate: f64,
    /// `None` disables the `1/T` decay term (pure-noise mode).
    decay_time: Option<f64>,
    noise_strength: f64,
    time_step: f64,
}

impl ModelParams {
    pub fn new(pump_rate: f64, decay_time: f64, noise_strength: f64, time_step: f64) -> Result<Self> {
        if !(decay_time.is_finite() && decay_time > 0.0) {
            return Err(Error::param("T", format!("decay time must be finite and > 0, got {decay_time}")));
        }
        Self::build(pump_rate, Some(decay_time), noise_strength, time_step)
    }

    /// Collapse noise alone: `G = 0` and no decay term.
    pub fn pure_noise(noise_strength: f64, time_step: f64) -> Result<Self> {
        Self::build(0.0, None, noise_strength, time_step)
    }

    fn build(pump_rate: f64, decay_time: Option<f64>, noise_strength: f64, time_step: f64) -> Result<Self> {
        if !(pump_rate.is_finite() && pump_rate >= 0.0) {
            return Err(Error::param("G", format!("pump rate must be finite and >= 0, got {pump_rate}")));
        }
        if !(noise_strength.is_finite() && noise_strength >= 0.0) {
            return Err(Error::param("alpha", format!("noise strength must be finite and >= 0, got {noise_strength}")));
        }
        if !(time_step.is_finite() && time_step > 0.0) {
            return Err(Error::param("dt", format!("time step must be finite and > 0, got {time_step}")));
        }
        let params = ModelParams {
            pump_rate,
            decay_time,
            noise_strength,
            time_step,
        };
        let stiffness = time_step * params.relaxation_rate();
        if stiffness >= 1.0 {
            return Err(Error::param(
                "dt",
                format!("unstable step: dt·(G + 1/T) = {stiffness} must be < 1"),
            ));
        }
        Ok(params)
    }

    pub fn with_noise_strength(self, noise_strength: f64) -> Result<Self> {
        Self::build(self.pump_rate, self.decay_time, noise_strength, self.time_step)
    }

    pub fn with_pump_rate(self, pump_rate: f64) -> Result<Self> {
        Self::build(pump_rate, self.decay_time, self.noise_strength, self.time_step)
    }

    pub fn pump_rate(&self) -> f64 {
        self.pump_rate
    }

    pub fn decay_time(&self) -> Option<f64> {
        self.decay_time
    }

    pub fn noise_strength(&self) -> f64 {
        self.noise_strength
    }

    pub fn time_step(&self) -> f64 {
        self.time_step
    }

    pub fn has_decay(&self) -> bool {
        self.decay_time.is_some()
    }

    /// `1/T`, or zero in pure-noise mode.
    #[inline]
    pub fn decay_rate(&self) -> f64 {
        self.decay_time.map_or(0.0, |t| 1.0 / t)
    }

    /// `G + 1/T`, the linear relaxation rate of the deterministic part.
    #[inline]
    pub fn relaxation_rate(&self) -> f64 {
        self.pump_rate + self.decay_rate()
    }

    #[inline]
    pub fn drift_at(&self, u3: f64) -> f64 {
        -(u3 + 1.0) * self.decay_rate() + self.pump_rate * (1.0 - u3)
    }

    #[inline]
    pub fn diffusion_at(&self, u3: f64) -> f64 {
        self.noise_strength * (1.0 - u3) * (1.0 + u3)
    }

    /// Steady state of the deterministic part. `-1` in pure-noise mode
    /// without pumping is not meaningful, so this requires decay.
    pub fn steady_state(&self) -> Result<f64> {
        match self.decay_time {
            Some(t) => steady_state(self.pump_rate, t),
            None => Err(Error::param("T", "pure-noise parameters have no steady state")),
        }
    }
}

/// Physical parameters of the coherent Bloch system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bloch3Params {
    pub detuning: f64,
    pub rabi_frequency: f64,
    pub decoherence_time: f64,
    pub energy_loss_time: f64,
}

impl Bloch3Params {
    pub fn new(detuning: f64, rabi_frequency: f64, decoherence_time: f64, energy_loss_time: f64) -> Result<Self> {
        if !(decoherence_time.is_finite() && decoherence_time > 0.0) {
            return Err(Error::param("T2", format!("must be finite and > 0, got {decoherence_time}")));
        }
        if !(energy_loss_time.is_finite() && energy_loss_time > 0.0) {
            return Err(Error::param("T1", format!("must be finite and > 0, got {energy_loss_time}")));
        }
        if !(detuning.is_finite() && rabi_frequency.is_finite()) {
            return Err(Error::param("omega", "detuning and Rabi frequency must be finite"));
        }
        Ok(Bloch3Params {
            detuning,
            rabi_frequency,
            decoherence_time,
            energy_loss_time,
        })
    }

    /// Largest rate in the linear system, used for the step-size check.
    pub(crate) fn max_rate(&self) -> f64 {
        (1.0 / self.decoherence_time).max(1.0 / self.energy_loss_time)
            + self.detuning.abs()
            + self.rabi_frequency.abs()
    }
}

/// Parameters of the weak-measurement system with tunneling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeakMeasParams {
    pub measurement_time: f64,
    pub tunneling_rate: f64,
    pub detuning: f64,
}

impl WeakMeasParams {
    pub fn new(measurement_time: f64, tunneling_rate: f64, detuning: f64) -> Result<Self> {
        if !(measurement_time.is_finite() && measurement_time > 0.0) {
            return Err(Error::param("tau_m", format!("must be finite and > 0, got {measurement_time}")));
        }
        if !(tunneling_rate.is_finite() && detuning.is_finite()) {
            return Err(Error::param("delta", "tunneling rate and detuning must be finite"));
        }
        Ok(WeakMeasParams {
            measurement_time,
            tunneling_rate,
            detuning,
        })
    }
}

fn check_unit(u3: f64) -> Result<()> {
    if u3.abs() <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            value: u3,
            domain: "[-1, 1]",
        })
    }
}

/// Deterministic rate `−(u₃ + 1)/T + G(1 − u₃)`.
pub fn drift(u3: f64, params: &ModelParams) -> Result<f64> {
    check_unit(u3)?;
    Ok(params.drift_at(u3))
}

/// Collapse amplitude `α(1 − u₃²)`; zero at both poles.
pub fn diffusion(u3: f64, noise_strength: f64) -> Result<f64> {
    check_unit(u3)?;
    Ok(noise_strength * (1.0 - u3) * (1.0 + u3))
}

/// Fixed point `(GT − 1)/(GT + 1)` of the deterministic dynamics.
pub fn steady_state(pump_rate: f64, decay_time: f64) -> Result<f64> {
    if !(pump_rate.is_finite() && pump_rate >= 0.0) {
        return Err(Error::param("G", format!("must be finite and >= 0, got {pump_rate}")));
    }
    if !(decay_time.is_finite() && decay_time > 0.0) {
        return Err(Error::param("T", format!("must be finite and > 0, got {decay_time}")));
    }
    let gt = pump_rate * decay_time;
    Ok((gt - 1.0) / (gt + 1.0))
}

/// Predicted ratio of upper to lower occupancy time, `GT`.
pub fn predicted_ratio(pump_rate: f64, decay_time: f64) -> Result<f64> {
    if !(pump_rate.is_finite() && pump_rate > 0.0) {
        return Err(Error::param("G", format!("predicted ratio needs G > 0, got {pump_rate}")));
    }
    if !(decay_time.is_finite() && decay_time > 0.0) {
        return Err(Error::param("T", format!("must be finite and > 0, got {decay_time}")));
    }
    Ok(pump_rate * decay_time)
}
