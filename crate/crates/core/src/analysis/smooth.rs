use rayon::prelude::*;

use crate::integrate::Trajectory;
use crate::{Error, Result};

/// Unnormalized Gaussian weights `exp(−j²/(2σ²))` for `j = −4σ..=4σ`, with
/// `σ` in samples.
pub fn gaussian_kernel(sigma_samples: f64) -> Vec<f64> {
    let half = (4.0 * sigma_samples).ceil() as i64;
    (-half..=half)
        .map(|j| {
            let x = j as f64 / sigma_samples;
            (-0.5 * x * x).exp()
        })
        .collect()
}

/// Convolve with a Gaussian resolution function of standard deviation
/// `width` (time units), truncated at four widths. Near the ends the kernel
/// is renormalized over the samples that exist.
pub fn smooth(traj: &Trajectory, width: f64) -> Result<Trajectory> {
    let h = traj.sample_dt();
    if !(width.is_finite() && width >= h) {
        return Err(Error::param(
            "width",
            format!("smoothing width {width} is below the sample spacing {h}"),
        ));
    }
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let kernel = gaussian_kernel(width / h);
    let half = (kernel.len() / 2) as isize;
    let values = traj.values();
    let n = values.len() as isize;
    let out = (0..n)
        .into_par_iter()
        .map(|i| {
            let lo = (i - half).max(0);
            let hi = (i + half).min(n - 1);
            let (mut acc, mut norm) = (0.0, 0.0);
            for j in lo..=hi {
                let w = kernel[(j - i + half) as usize];
                acc += w * values[j as usize];
                norm += w;
            }
            acc / norm
        })
        .collect();
    Ok(traj.with_values(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn constant_series_is_unchanged() {
        let traj = Trajectory::from_samples(1e-3, vec![0.37; 500]).unwrap();
        let s = smooth(&traj, 5e-3).unwrap();
        assert_eq!(s.len(), 500);
        assert!(s.values().iter().all(|v| (v - 0.37).abs() < 1e-15));
    }

    #[test]
    fn impulse_becomes_a_gaussian_of_the_same_mass() {
        let mut v = vec![0.0; 401];
        v[200] = 2.0;
        let traj = Trajectory::from_samples(1.0, v).unwrap();
        let s = smooth(&traj, 10.0).unwrap();
        let mass: f64 = s.values().iter().sum();
        assert!((mass - 2.0).abs() < 1e-12);
        // Peak of a discrete unit-mass Gaussian with σ = 10 samples.
        let peak = 2.0 / (10.0 * (2.0 * std::f64::consts::PI).sqrt());
        assert!((s.values()[200] - peak).abs() < 1e-4 * peak);
        assert!((s.values()[190] / s.values()[200] - (-0.5f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn white_noise_variance_reduction() {
        let width = 10.0;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v: Vec<f64> = (0..400_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let traj = Trajectory::from_samples(1.0, v).unwrap();
        let s = smooth(&traj, width).unwrap();
        let interior = &s.values()[100..s.len() - 100];
        let mean = interior.iter().sum::<f64>() / interior.len() as f64;
        let var = interior.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / interior.len() as f64;
        let predicted = 1.0 / (2.0 * std::f64::consts::PI.sqrt() * width);
        // Exact factor of the truncated discrete kernel.
        let k = gaussian_kernel(width);
        let z: f64 = k.iter().sum();
        let exact: f64 = k.iter().map(|w| (w / z).powi(2)).sum();
        assert!((exact - predicted).abs() / predicted < 1e-3);
        assert!((var - exact).abs() / exact < 0.05, "var {var} vs {exact}");
    }

    #[test]
    fn width_below_resolution_is_rejected() {
        let traj = Trajectory::from_samples(1e-3, vec![0.0; 10]).unwrap();
        assert!(smooth(&traj, 5e-4).is_err());
    }

    proptest! {
        #[test]
        fn interior_mass_is_preserved(bumps in prop::collection::vec(-1.0f64..1.0, 1..50), width in 1.0f64..6.0) {
            // Every output whose window reaches the support must have a
            // full window, so pad by more than eight widths.
            let pad = 50;
            let mut v = vec![0.0; pad];
            v.extend(&bumps);
            v.extend(vec![0.0; pad]);
            let traj = Trajectory::from_samples(1.0, v).unwrap();
            let s = smooth(&traj, width).unwrap();
            let before: f64 = traj.values().iter().sum();
            let after: f64 = s.values().iter().sum();
            prop_assert!((before - after).abs() <= 1e-12 * (1.0 + bumps.len() as f64));
        }
    }
}
