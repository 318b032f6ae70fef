use crate::integrate::run_indexed;
use crate::rng::Increments;
use crate::{Bloch3Params, Error, Result, WeakMeasParams};

/// Three-component series on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory3 {
    pub sample_dt: f64,
    pub points: Vec<[f64; 3]>,
    pub seed: Option<u64>,
}

impl Trajectory3 {
    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.sample_dt
    }

    pub fn component(&self, k: usize) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(move |p| p[k])
    }
}

fn bloch_rhs(p: &Bloch3Params, u: [f64; 3]) -> [f64; 3] {
    [
        -u[0] / p.decoherence_time + p.detuning * u[1],
        -u[1] / p.decoherence_time - p.detuning * u[0] - p.rabi_frequency * u[2],
        -(u[2] + 1.0) / p.energy_loss_time + p.rabi_frequency * u[1],
    ]
}

fn axpy(a: f64, x: [f64; 3], y: [f64; 3]) -> [f64; 3] {
    [y[0] + a * x[0], y[1] + a * x[1], y[2] + a * x[2]]
}

fn check_step(dt: f64, rate: f64) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::param("dt", format!("must be finite and > 0, got {dt}")));
    }
    if dt * rate >= 1.0 {
        return Err(Error::param("dt", format!("unstable step: dt·rate = {} must be < 1", dt * rate)));
    }
    Ok(())
}

/// Classical RK4 integration of the coherent Bloch equations.
pub fn simulate_deterministic_bloch(p: &Bloch3Params, u0: [f64; 3], n_steps: usize, dt: f64) -> Result<Trajectory3> {
    if u0.iter().any(|c| !(c.abs() <= 1.0)) {
        return Err(Error::Domain {
            value: u0.iter().fold(0.0f64, |m, c| m.max(c.abs())),
            domain: "[-1, 1] componentwise",
        });
    }
    check_step(dt, p.max_rate())?;
    let mut points = Vec::with_capacity(n_steps + 1);
    let mut u = u0;
    points.push(u);
    for _ in 0..n_steps {
        let k1 = bloch_rhs(p, u);
        let k2 = bloch_rhs(p, axpy(0.5 * dt, k1, u));
        let k3 = bloch_rhs(p, axpy(0.5 * dt, k2, u));
        let k4 = bloch_rhs(p, axpy(dt, k3, u));
        for i in 0..3 {
            u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        points.push(u);
    }
    Ok(Trajectory3 {
        sample_dt: dt,
        points,
        seed: None,
    })
}

/// Euler–Maruyama state machine for the weak-measurement system
///
/// ```text
/// dx = −x/(2τ) dt − (xz/√τ) ξ − εy dt
/// dy = −y/(2τ) dt − (yz/√τ) ξ + εx dt − Δz dt
/// dz =  ((1 − z²)/√τ) ξ + Δy dt
/// ```
///
/// with one shared increment `ξ = noise_scale · dW` per step.
#[derive(Debug, Clone)]
pub struct WeakMeasurementStepper {
    params: WeakMeasParams,
    noise_scale: f64,
    dt: f64,
    state: [f64; 3],
}

impl WeakMeasurementStepper {
    pub fn new(params: WeakMeasParams, noise_scale: f64, xyz0: [f64; 3], dt: f64) -> Result<Self> {
        let norm2: f64 = xyz0.iter().map(|c| c * c).sum();
        if !(norm2 <= 1.0 + 1e-12) {
            return Err(Error::Domain {
                value: norm2.sqrt(),
                domain: "Bloch ball |(x, y, z)| <= 1",
            });
        }
        if !(noise_scale.is_finite() && noise_scale >= 0.0) {
            return Err(Error::param("noise_scale", format!("must be finite and >= 0, got {noise_scale}")));
        }
        let rate = 0.5 / params.measurement_time + params.detuning.abs() + params.tunneling_rate.abs();
        check_step(dt, rate)?;
        Ok(WeakMeasurementStepper {
            params,
            noise_scale,
            dt,
            state: xyz0,
        })
    }

    pub fn state(&self) -> [f64; 3] {
        self.state
    }

    #[inline]
    pub fn step(&mut self, dw: f64) {
        let [x, y, z] = self.state;
        let tau = self.params.measurement_time;
        let eps = self.params.detuning;
        let tunnel = self.params.tunneling_rate;
        let dt = self.dt;
        let xi = self.noise_scale * dw / tau.sqrt();
        let nx = x - x / (2.0 * tau) * dt - x * z * xi - eps * y * dt;
        let ny = y - y / (2.0 * tau) * dt - y * z * xi + eps * x * dt - tunnel * z * dt;
        let nz = z + (1.0 - z) * (1.0 + z) * xi + tunnel * y * dt;
        self.state = [nx, ny, nz.clamp(-1.0, 1.0)];
    }
}

pub fn simulate_weak_measurement(
    params: &WeakMeasParams,
    noise_scale: f64,
    xyz0: [f64; 3],
    n_steps: usize,
    dt: f64,
    seed: u64,
) -> Result<Trajectory3> {
    let mut stepper = WeakMeasurementStepper::new(*params, noise_scale, xyz0, dt)?;
    let mut noise = Increments::new(seed, dt);
    let mut points = Vec::with_capacity(n_steps + 1);
    points.push(stepper.state());
    for _ in 0..n_steps {
        stepper.step(noise.next_increment());
        points.push(stepper.state());
    }
    Ok(Trajectory3 {
        sample_dt: dt,
        points,
        seed: Some(seed),
    })
}

/// Terminal states of `n_runs` independent weak-measurement runs.
pub fn weak_measurement_ensemble(
    params: &WeakMeasParams,
    noise_scale: f64,
    xyz0: [f64; 3],
    n_steps: usize,
    dt: f64,
    n_runs: usize,
    master_seed: u64,
) -> Result<Vec<[f64; 3]>> {
    let template = WeakMeasurementStepper::new(*params, noise_scale, xyz0, dt)?;
    Ok(run_indexed(n_runs, master_seed, |_, seed| {
        let mut stepper = template.clone();
        let mut noise = Increments::new(seed, dt);
        for _ in 0..n_steps {
            stepper.step(noise.next_increment());
        }
        stepper.state()
    }))
}
