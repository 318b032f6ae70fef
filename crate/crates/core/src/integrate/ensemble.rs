use rayon::prelude::*;
use serde::Serialize;

use super::Path;
use crate::rng::derive_seed;
use crate::sde::{CollapseSde, ScalarSde};
use crate::{Error, ModelParams, Result};

/// Run `job(index, seed)` for every member of an ensemble on the rayon pool.
///
/// Results come back in index order and each member's seed depends only on
/// `(master_seed, index)`, so the output is identical for any worker count.
pub fn run_indexed<T, F>(n: usize, master_seed: u64, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, u64) -> T + Sync + Send,
{
    (0..n)
        .into_par_iter()
        .map(|i| job(i, derive_seed(master_seed, i as u64)))
        .collect()
}

/// What to keep from each ensemble member.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reducer {
    /// Terminal values only.
    Terminal,
    /// Terminal values plus mean and variance every `stride` steps.
    Moments { stride: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentSeries {
    pub sample_dt: f64,
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub n_traj: usize,
    pub master_seed: u64,
    pub terminal: Vec<f64>,
    pub moments: Option<MomentSeries>,
}

impl EnsembleSummary {
    pub fn terminal_mean(&self) -> f64 {
        self.terminal.iter().sum::<f64>() / self.n_traj as f64
    }

    /// Standard error of the terminal mean; zero for a singleton ensemble.
    pub fn terminal_std_error(&self) -> f64 {
        let n = self.n_traj as f64;
        if self.n_traj < 2 {
            return 0.0;
        }
        let m = self.terminal_mean();
        let var = self.terminal.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    }

    pub fn fraction_above(&self, threshold: f64) -> f64 {
        self.terminal.iter().filter(|&&x| x > threshold).count() as f64 / self.n_traj as f64
    }
}

/// Ensemble of collapse-SDE trajectories from a common start.
pub fn simulate_ensemble(
    params: &ModelParams,
    u3_0: f64,
    n_steps: usize,
    n_traj: usize,
    master_seed: u64,
    reducer: Reducer,
) -> Result<EnsembleSummary> {
    simulate_ensemble_with(&CollapseSde::new(*params), params, u3_0, n_steps, n_traj, master_seed, reducer)
}

/// Ensemble of any scalar model.
pub fn simulate_ensemble_with<S: ScalarSde + ?Sized>(
    sde: &S,
    params: &ModelParams,
    x0: f64,
    n_steps: usize,
    n_traj: usize,
    master_seed: u64,
    reducer: Reducer,
) -> Result<EnsembleSummary> {
    if n_traj == 0 {
        return Err(Error::param("n_traj", "must be >= 1"));
    }
    if n_steps == 0 {
        return Err(Error::param("n_steps", "must be >= 1"));
    }
    // Validates x0 once up front so the workers can unwrap.
    Path::new(sde, params.time_step(), x0, 0)?;
    let dt = params.time_step();

    match reducer {
        Reducer::Terminal => {
            let terminal = run_indexed(n_traj, master_seed, |_, seed| {
                let path = Path::new(sde, dt, x0, seed).expect("validated start");
                path.take(n_steps + 1).last().expect("nonempty path")
            });
            Ok(EnsembleSummary {
                n_traj,
                master_seed,
                terminal,
                moments: None,
            })
        }
        Reducer::Moments { stride } => {
            if stride == 0 || !n_steps.is_multiple_of(stride) {
                return Err(Error::param("stride", "must be >= 1 and divide n_steps"));
            }
            let series = run_indexed(n_traj, master_seed, |_, seed| {
                let path = Path::new(sde, dt, x0, seed).expect("validated start");
                path.take(n_steps + 1).step_by(stride).collect::<Vec<f64>>()
            });
            let n_points = n_steps / stride + 1;
            let n = n_traj as f64;
            let mut mean = vec![0.0; n_points];
            for s in &series {
                for (m, x) in mean.iter_mut().zip(s) {
                    *m += x;
                }
            }
            mean.iter_mut().for_each(|m| *m /= n);
            let mut variance = vec![0.0; n_points];
            if n_traj > 1 {
                for s in &series {
                    for ((v, x), m) in variance.iter_mut().zip(s).zip(&mean) {
                        *v += (x - m) * (x - m);
                    }
                }
                variance.iter_mut().for_each(|v| *v /= n - 1.0);
            }
            let terminal = series.iter().map(|s| s[n_points - 1]).collect();
            Ok(EnsembleSummary {
                n_traj,
                master_seed,
                terminal,
                moments: Some(MomentSeries {
                    sample_dt: dt * stride as f64,
                    mean,
                    variance,
                }),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::simulate_trajectory;

    #[test]
    fn singleton_matches_trajectory_with_derived_seed() {
        let p = ModelParams::new(0.6, 1.0, 10.0, 1e-4).unwrap();
        let ens = simulate_ensemble(&p, 1.0, 2000, 1, 77, Reducer::Moments { stride: 100 }).unwrap();
        let traj = simulate_trajectory(&p, 1.0, 2000, 100, derive_seed(77, 0)).unwrap();
        let mean = &ens.moments.as_ref().unwrap().mean;
        assert_eq!(mean.len(), traj.len());
        assert!(mean.iter().zip(traj.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
        assert_eq!(ens.terminal[0].to_bits(), traj.last().unwrap().to_bits());
        assert_eq!(ens.terminal_std_error(), 0.0);
    }

    #[test]
    fn result_does_not_depend_on_worker_count() {
        let p = ModelParams::pure_noise(5.0, 1e-3).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| simulate_ensemble(&p, 0.2, 500, 257, 3, Reducer::Moments { stride: 50 }).unwrap())
        };
        let a = run(1);
        let b = run(3);
        assert_eq!(a, b);
    }

    #[test]
    fn pure_noise_mean_stays_put() {
        let p = ModelParams::pure_noise(3.0, 1e-3).unwrap();
        let ens = simulate_ensemble(&p, 0.0, 2000, 4000, 9, Reducer::Moments { stride: 200 }).unwrap();
        let m = ens.moments.unwrap();
        for (mean, var) in m.mean.iter().zip(&m.variance) {
            let se = (var / 4000.0).sqrt();
            assert!(mean.abs() <= 4.0 * se + 1e-12, "mean {mean} se {se}");
        }
    }

    #[test]
    fn rejects_empty_ensemble() {
        let p = ModelParams::pure_noise(3.0, 1e-3).unwrap();
        assert!(simulate_ensemble(&p, 0.0, 10, 0, 1, Reducer::Terminal).is_err());
        assert!(simulate_ensemble(&p, 2.0, 10, 3, 1, Reducer::Terminal).is_err());
        assert!(simulate_ensemble(&p, 0.0, 10, 3, 1, Reducer::Moments { stride: 3 }).is_err());
    }
}
