//! Stationary density of the collapse SDE and the analytic first-passage
//! oracles of its shifted process `V = U₃ + 1`.
//!
//! Setting the flux of the stationary Fokker–Planck equation to zero gives
//!
//! ```text
//! ρ(y) ∝ exp(−2 ln(1 − y²) + (2/α²) I(y)),   I(y) = ∫₀ʸ u(q)/(1 − q²)² dq
//! ```
//!
//! with `u(q) = −(1 + q)/T + G(1 − q)` the drift. `I` diverges to `−∞` at both
//! poles when `G > 0` and `T` is finite, so everything is kept in the log
//! domain and the grid stops short of `±1`.

use rayon::prelude::*;
use serde::Serialize;

use crate::quadrature::integrate;
use crate::{Error, ModelParams, Result};

/// Relative tolerance of every inner-integral quadrature.
pub const QUAD_REL_TOL: f64 = 1e-10;

/// The grid is extended towards `±1` until the end values fall below this
/// fraction of the peak.
pub const END_RATIO: f64 = 1e-15;

/// Smallest margin tried before the density is declared non-normalizable.
const MIN_MARGIN: f64 = 1e-14;

/// Constant in front of the gap estimate, read off the pre-Gronwall
/// inequality. The resulting bound is sufficient, not tight.
pub const GAP_CONSTANT: f64 = 4.0;

fn check_interior(y: f64) -> Result<()> {
    if y.abs() < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            value: y,
            domain: "(-1, 1)",
        })
    }
}

#[inline]
fn integrand(q: f64, pump: f64, decay_rate: f64) -> f64 {
    let w = (1.0 - q) * (1.0 + q);
    (-(1.0 + q) * decay_rate + pump * (1.0 - q)) / (w * w)
}

fn panel_integral(a: f64, b: f64, pump: f64, decay_rate: f64) -> Result<f64> {
    integrate(|q| integrand(q, pump, decay_rate), a, b, QUAD_REL_TOL, 1e-300)
}

/// `I(y) = ∫₀ʸ u(q)/(1 − q²)² dq` by adaptive quadrature.
pub fn inner_integral(y: f64, params: &ModelParams) -> Result<f64> {
    check_interior(y)?;
    panel_integral(0.0, y, params.pump_rate(), params.decay_rate())
}

/// Partial-fraction form of [`inner_integral`]:
/// `−(1/T)(L/4 + y/(2(1−y))) + G(L/4 + y/(2(1+y)))`, `L = ln((1+y)/(1−y))`.
pub fn inner_integral_closed_form(y: f64, params: &ModelParams) -> Result<f64> {
    check_interior(y)?;
    let l = 2.0 * y.atanh();
    let decay = params.decay_rate() * (0.25 * l + 0.5 * y / (1.0 - y));
    let pump = params.pump_rate() * (0.25 * l + 0.5 * y / (1.0 + y));
    Ok(pump - decay)
}

fn check_noise(params: &ModelParams) -> Result<f64> {
    let alpha = params.noise_strength();
    if alpha > 0.0 {
        Ok(2.0 / (alpha * alpha))
    } else {
        Err(Error::param("noise_strength", "stationary density needs alpha > 0"))
    }
}

/// `ln ρ(y)` up to the additive normalization constant.
pub fn log_unnormalized_density(y: f64, params: &ModelParams) -> Result<f64> {
    let k = check_noise(params)?;
    let i = inner_integral(y, params)?;
    Ok(-2.0 * ((1.0 - y) * (1.0 + y)).ln() + k * i)
}

/// A probability density sampled on a grid inside `(−1, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryDensity {
    pub y: Vec<f64>,
    pub rho: Vec<f64>,
    /// `ln` of the normalization constant dividing `exp(log_unnormalized_density)`.
    pub ln_normalization: f64,
    /// Distance of the outermost grid points from `±1`.
    pub margin: f64,
    pub method: String,
    pub tolerance: f64,
}

fn trapezoid(y: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    (1..y.len()).map(|i| 0.5 * (y[i] - y[i - 1]) * (f(i) + f(i - 1))).sum()
}

impl StationaryDensity {
    /// Wrap arbitrary values, e.g. to probe [`fp_residual`] with a
    /// non-solution. Values are taken as given, without normalization.
    pub fn from_samples(y: Vec<f64>, rho: Vec<f64>) -> Result<Self> {
        if y.len() != rho.len() || y.len() < 3 {
            return Err(Error::GridTooCoarse(format!("{} points for {} values", y.len(), rho.len())));
        }
        if y.windows(2).any(|w| !(w[1] > w[0])) || y.iter().any(|v| !(v.abs() < 1.0)) {
            return Err(Error::param("y", "grid must be strictly increasing inside (-1, 1)"));
        }
        if rho.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::param("rho", "density values must be finite and >= 0"));
        }
        let margin = (1.0 + y[0]).min(1.0 - y[y.len() - 1]);
        Ok(StationaryDensity {
            y,
            rho,
            ln_normalization: 0.0,
            margin,
            method: "samples".to_string(),
            tolerance: 0.0,
        })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Trapezoid integral over the grid.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.y, |i| self.rho[i])
    }

    pub fn mean(&self) -> f64 {
        trapezoid(&self.y, |i| self.y[i] * self.rho[i]) / self.integral()
    }

    pub fn max(&self) -> f64 {
        self.rho.iter().cloned().fold(0.0, f64::max)
    }

    /// Grid point of the largest value.
    pub fn mode(&self) -> f64 {
        let (k, _) = self
            .rho
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(k, m), (i, &r)| if r > m { (i, r) } else { (k, m) });
        self.y[k]
    }

    /// Positions of strict interior local maxima above `1e-9` of the peak.
    pub fn local_maxima(&self) -> Vec<f64> {
        let floor = 1e-9 * self.max();
        (1..self.len().saturating_sub(1))
            .filter(|&i| {
                let r = self.rho[i];
                r > floor && r > self.rho[i - 1] && r >= self.rho[i + 1]
            })
            .map(|i| self.y[i])
            .collect()
    }

    /// Grid spacing around `y`.
    pub fn cell_width_at(&self, y: f64) -> f64 {
        let k = self.y.partition_point(|&v| v < y).clamp(1, self.len() - 1);
        self.y[k] - self.y[k - 1]
    }

    /// Cumulative trapezoid of the normalized density at each grid point.
    fn cumulative(&self) -> Vec<f64> {
        let mut c = Vec::with_capacity(self.len());
        let mut acc = 0.0;
        c.push(0.0);
        for i in 1..self.len() {
            acc += 0.5 * (self.y[i] - self.y[i - 1]) * (self.rho[i] + self.rho[i - 1]);
            c.push(acc);
        }
        c.iter_mut().for_each(|v| *v /= acc);
        c
    }

    /// Probability mass between consecutive `edges`, with the CDF
    /// interpolated linearly between grid points.
    pub fn bin_probabilities(&self, edges: &[f64]) -> Result<Vec<f64>> {
        if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("edges", "need at least two increasing edges"));
        }
        let cum = self.cumulative();
        let cdf = |x: f64| -> f64 {
            let k = self.y.partition_point(|&v| v < x);
            if k == 0 {
                0.0
            } else if k == self.len() {
                1.0
            } else {
                let (y0, y1) = (self.y[k - 1], self.y[k]);
                let w = (x - y0) / (y1 - y0);
                cum[k - 1] + w * (cum[k] - cum[k - 1])
            }
        };
        Ok(edges.windows(2).map(|w| cdf(w[1]) - cdf(w[0])).collect())
    }
}

/// Grid that clusters towards both poles: `y = −cos θ` for uniform `θ`.
fn pole_grid(n: usize, margin: f64) -> Vec<f64> {
    let lo = (1.0 - margin).acos();
    let hi = std::f64::consts::PI - lo;
    (0..n)
        .map(|i| -(lo + (hi - lo) * i as f64 / (n - 1) as f64).cos())
        .collect()
}

/// `ln ρ` on `y`, integrating outward panel by panel from the grid point
/// closest to zero.
fn log_density_on(y: &[f64], params: &ModelParams) -> Result<Vec<f64>> {
    let k = check_noise(params)?;
    let (pump, decay) = (params.pump_rate(), params.decay_rate());
    let panels = (1..y.len())
        .into_par_iter()
        .map(|i| panel_integral(y[i - 1], y[i], pump, decay))
        .collect::<Result<Vec<f64>>>()?;
    let c = (0..y.len())
        .min_by(|&a, &b| y[a].abs().total_cmp(&y[b].abs()))
        .expect("nonempty grid");
    let mut inner = vec![0.0; y.len()];
    inner[c] = panel_integral(0.0, y[c], pump, decay)?;
    for i in c + 1..y.len() {
        inner[i] = inner[i - 1] + panels[i - 1];
    }
    for i in (0..c).rev() {
        inner[i] = inner[i + 1] - panels[i];
    }
    Ok(y
        .iter()
        .zip(&inner)
        .map(|(&v, &i)| -2.0 * ((1.0 - v) * (1.0 + v)).ln() + k * i)
        .collect())
}

/// Normalized stationary density on `n_grid` points.
///
/// The grid starts `y_margin` away from each pole and is pushed closer by
/// factors of ten until both end values are below [`END_RATIO`] of the peak.
/// Points are uniform in `θ` with `y = −cos θ`, which resolves the sharp
/// peaks that form near the poles at large `α`.
pub fn stationary_density(params: &ModelParams, n_grid: usize, y_margin: f64) -> Result<StationaryDensity> {
    if n_grid < 64 {
        return Err(Error::param("n_grid", format!("need at least 64 points, got {n_grid}")));
    }
    if !(y_margin > 0.0 && y_margin < 0.1) {
        return Err(Error::param("y_margin", format!("must be in (0, 0.1), got {y_margin}")));
    }
    check_noise(params)?;
    if params.pump_rate() == 0.0 || !params.has_decay() {
        return Err(Error::DegenerateNormalization(
            "without both pumping and decay the density has a non-integrable pole".to_string(),
        ));
    }
    let ln_end = END_RATIO.ln();
    let mut margin = y_margin;
    loop {
        let y = pole_grid(n_grid, margin);
        let log_rho = log_density_on(&y, params)?;
        let peak = log_rho.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !peak.is_finite() {
            return Err(Error::DegenerateNormalization(format!("log-density peak is {peak}")));
        }
        let ends_ok = log_rho[0] - peak < ln_end && log_rho[n_grid - 1] - peak < ln_end;
        if ends_ok {
            let shifted: Vec<f64> = log_rho.iter().map(|l| (l - peak).exp()).collect();
            let z = trapezoid(&y, |i| shifted[i]);
            if !(z > 0.0 && z.is_finite()) {
                return Err(Error::DegenerateNormalization(format!("trapezoid mass {z}")));
            }
            let rho = shifted.iter().map(|r| r / z).collect();
            return Ok(StationaryDensity {
                y,
                rho,
                ln_normalization: peak + z.ln(),
                margin,
                method: "adaptive double-exponential panels; trapezoid normalization".to_string(),
                tolerance: QUAD_REL_TOL,
            });
        }
        margin /= 10.0;
        if margin < MIN_MARGIN {
            return Err(Error::DegenerateNormalization(
                "density does not vanish towards the poles".to_string(),
            ));
        }
    }
}

/// Largest residual of `−(uρ)' + ½(σ²ρ)'' = 0` over the interior grid,
/// relative to the largest `|½(σ²ρ)''|`. Derivatives are three-point
/// differences on the (possibly non-uniform) grid.
pub fn fp_residual(density: &StationaryDensity, params: &ModelParams) -> Result<f64> {
    let n = density.len();
    if n < 16 {
        return Err(Error::GridTooCoarse(format!("{n} points; need at least 16")));
    }
    let alpha = params.noise_strength();
    if !(alpha > 0.0) {
        return Err(Error::param("noise_strength", "residual needs alpha > 0"));
    }
    let y = &density.y;
    let flux: Vec<f64> = (0..n).map(|i| params.drift_at(y[i]) * density.rho[i]).collect();
    let spread: Vec<f64> = (0..n)
        .map(|i| {
            let s = params.diffusion_at(y[i]);
            s * s * density.rho[i]
        })
        .collect();
    let (mut worst, mut scale) = (0.0f64, 0.0f64);
    for i in 1..n - 1 {
        let (h1, h2) = (y[i] - y[i - 1], y[i + 1] - y[i]);
        let d1 = (-h2 / (h1 * (h1 + h2))) * flux[i - 1]
            + ((h2 - h1) / (h1 * h2)) * flux[i]
            + (h1 / (h2 * (h1 + h2))) * flux[i + 1];
        let d2 = 2.0 * (spread[i - 1] / (h1 * (h1 + h2)) - spread[i] / (h1 * h2) + spread[i + 1] / (h2 * (h1 + h2)));
        worst = worst.max((-d1 + 0.5 * d2).abs());
        scale = scale.max((0.5 * d2).abs());
    }
    if !(scale > 0.0) {
        return Err(Error::DegenerateNormalization("diffusion term vanishes on the grid".to_string()));
    }
    Ok(worst / scale)
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite and > 0, got {v}")))
    }
}

fn check_band(delta: f64) -> Result<()> {
    if delta.is_finite() && delta >= 0.0 {
        Ok(())
    } else {
        Err(Error::param("delta", format!("must be finite and >= 0, got {delta}")))
    }
}

/// Linearized mean exit time of `V` from `[0, δ)` starting at 0: `δ/(2G)`.
pub fn analytic_exit_lower(delta: f64, pump_rate: f64) -> Result<f64> {
    check_band(delta)?;
    check_positive("pump_rate", pump_rate)?;
    Ok(delta / (2.0 * pump_rate))
}

/// Linearized mean exit time of `V` from `(2 − δ, 2]` starting at 2: `Tδ/2`.
pub fn analytic_exit_upper(delta: f64, decay_time: f64) -> Result<f64> {
    check_band(delta)?;
    check_positive("decay_time", decay_time)?;
    Ok(decay_time * delta / 2.0)
}

/// Upper bound `δ/G` on the mean exit time from the lower band, valid when
/// `2GT > δ(1 + GT)`.
pub fn exit_time_bound(delta: f64, pump_rate: f64, decay_time: f64) -> Result<f64> {
    check_positive("delta", delta)?;
    check_positive("pump_rate", pump_rate)?;
    check_positive("decay_time", decay_time)?;
    let gt = pump_rate * decay_time;
    if !(2.0 * gt > delta * (1.0 + gt)) {
        return Err(Error::BoundPrecondition {
            delta,
            pump_rate,
            decay_time,
        });
    }
    Ok(delta / pump_rate)
}

/// Bound on `E[(V − X)²]` at time `t` before exit:
/// `4δ²((1/T + G)² + ½α²δ⁴)(δ/G)e^{12t}`.
pub fn gap_bound(delta: f64, pump_rate: f64, decay_time: f64, alpha: f64, t: f64) -> Result<f64> {
    let tau = exit_time_bound(delta, pump_rate, decay_time)?;
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::param("alpha", format!("must be finite and >= 0, got {alpha}")));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::param("t", format!("must be finite and >= 0, got {t}")));
    }
    let rate = 1.0 / decay_time + pump_rate;
    let d2 = delta * delta;
    Ok(GAP_CONSTANT * d2 * (rate * rate + 0.5 * alpha * alpha * d2 * d2) * tau * (12.0 * t).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(g: f64, alpha: f64) -> ModelParams {
        ModelParams::new(g, 1.0, alpha, 1e-4).unwrap()
    }

    #[test]
    fn log_density_vanishes_at_zero() {
        assert_eq!(log_unnormalized_density(0.0, &params(0.6, 10.0)).unwrap(), 0.0);
    }

    #[test]
    fn log_density_domain() {
        let p = params(0.6, 10.0);
        assert!(log_unnormalized_density(1.0, &p).is_err());
        assert!(log_unnormalized_density(-1.0, &p).is_err());
        assert!(log_unnormalized_density(0.5, &params(0.6, 0.0)).is_err());
    }

    #[test]
    fn balanced_log_density_is_even() {
        let p = params(1.0, 2.0);
        for &y in &[0.1, 0.37, 0.8, 0.99, 0.9999] {
            let a = log_unnormalized_density(y, &p).unwrap();
            let b = log_unnormalized_density(-y, &p).unwrap();
            assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "{y}: {a} vs {b}");
        }
    }

    #[test]
    fn log_density_matches_a_midpoint_sum() {
        let p = params(0.6, 10.0);
        let n = 1_000_000;
        for k in 1..=20 {
            // Golden-ratio scatter over (−0.95, 0.95).
            let y = (k as f64 * 0.618_033_988_749_895).fract() * 1.9 - 0.95;
            let h = y / n as f64;
            let sum: f64 = (0..n).map(|k| integrand((k as f64 + 0.5) * h, 0.6, 1.0)).sum::<f64>() * h;
            let oracle = -2.0 * (1.0 - y * y).ln() + 2.0 / 100.0 * sum;
            let got = log_unnormalized_density(y, &p).unwrap();
            assert!((got - oracle).abs() <= 1e-8 * oracle.abs(), "{y}: {got} vs {oracle}");
        }
    }

    #[test]
    fn closed_form_agrees_with_quadrature() {
        for &(g, t) in &[(0.6, 1.0), (0.25, 1.0), (4.0, 1.0), (0.7, 2.5)] {
            let p = ModelParams::new(g, t, 1.0, 1e-4).unwrap();
            for &y in &[-0.9999, -0.99, -0.6, -0.05, 0.2, 0.75, 0.999, 0.99999] {
                let q = inner_integral(y, &p).unwrap();
                let c = inner_integral_closed_form(y, &p).unwrap();
                assert!((q - c).abs() <= 1e-10 * c.abs().max(1e-300), "{g} {t} {y}: {q} vs {c}");
            }
        }
    }

    #[test]
    fn density_invariants_over_the_matrix() {
        for &alpha in &[0.05, 0.5, 2.0, 10.0] {
            for &gt in &[0.25, 0.6, 1.0, 4.0] {
                let d = stationary_density(&params(gt, alpha), 4096, 0.01).unwrap();
                assert!((d.integral() - 1.0).abs() < 1e-6);
                assert!(d.rho.iter().all(|&r| r >= 0.0));
                let max = d.max();
                assert!(d.rho[0] < 1e-12 * max && d.rho[d.len() - 1] < 1e-12 * max, "{alpha} {gt}");
            }
        }
    }

    #[test]
    fn normalization_is_grid_converged() {
        // Doubling the grid must not move the density at shared points.
        let p = params(0.6, 10.0);
        let a = stationary_density(&p, 2049, 0.01).unwrap();
        let b = stationary_density(&p, 4097, 0.01).unwrap();
        assert_eq!(a.margin, b.margin);
        let max = a.max();
        for (i, r) in a.rho.iter().enumerate() {
            assert!((r - b.rho[2 * i]).abs() < 1e-3 * max);
        }
        assert!((a.ln_normalization - b.ln_normalization).abs() < 1e-3);
    }

    #[test]
    fn balanced_density_is_symmetric() {
        let d = stationary_density(&params(1.0, 2.0), 4096, 0.01).unwrap();
        let n = d.len();
        let max = d.max();
        for i in 0..n {
            assert!((d.y[i] + d.y[n - 1 - i]).abs() < 1e-14);
            assert!((d.rho[i] - d.rho[n - 1 - i]).abs() <= 1e-9 * max);
        }
        assert!(d.mean().abs() < 1e-9);
    }

    #[test]
    fn strong_noise_is_bimodal_near_the_poles() {
        let d = stationary_density(&params(0.6, 10.0), 4096, 0.01).unwrap();
        let peaks = d.local_maxima();
        assert_eq!(peaks.len(), 2, "{peaks:?}");
        assert!(peaks[0] < -0.9 && peaks[1] > 0.9);
        // Interior minimum between them.
        let centre = d.bin_probabilities(&[-0.5, 0.5]).unwrap()[0];
        assert!(centre < 0.05);
    }

    #[test]
    fn weak_noise_is_unimodal_at_the_steady_state() {
        let d = stationary_density(&params(0.6, 0.05), 4096, 0.01).unwrap();
        assert_eq!(d.local_maxima().len(), 1);
        // The mode solves u(y) = ½(σ²)'(y) = −2α²y(1 − y²), shifted from the
        // steady state by O(α²). Bisect for it independently.
        let (mut lo, mut hi) = (-0.3f64, -0.2f64);
        for _ in 0..100 {
            let m = 0.5 * (lo + hi);
            let g = (-(1.0 + m) + 0.6 * (1.0 - m)) + 2.0 * 0.0025 * m * (1.0 - m * m);
            if g > 0.0 {
                lo = m;
            } else {
                hi = m;
            }
        }
        let mode = d.mode();
        assert!((mode - lo).abs() <= d.cell_width_at(lo), "mode {mode} vs {lo}");
        assert!((mode + 0.25).abs() < 0.02);
        assert!((d.mean() + 0.25).abs() < 0.02);
    }

    #[test]
    fn zero_pump_cannot_be_normalized() {
        let p = ModelParams::new(0.0, 1.0, 2.0, 1e-4).unwrap();
        assert!(matches!(stationary_density(&p, 256, 0.01), Err(Error::DegenerateNormalization(_))));
        let p = ModelParams::pure_noise(2.0, 1e-4).unwrap();
        assert!(matches!(stationary_density(&p, 256, 0.01), Err(Error::DegenerateNormalization(_))));
    }

    #[test]
    fn density_rejects_bad_grids() {
        let p = params(0.6, 10.0);
        assert!(stationary_density(&p, 63, 0.01).is_err());
        assert!(stationary_density(&p, 256, 0.1).is_err());
        assert!(stationary_density(&p, 256, 0.0).is_err());
    }

    #[test]
    fn residual_of_the_exact_density_is_small() {
        for &alpha in &[0.05, 0.5, 10.0] {
            let p = params(0.6, alpha);
            let d = stationary_density(&p, 4096, 0.01).unwrap();
            let r = fp_residual(&d, &p).unwrap();
            assert!(r < 1e-3, "alpha {alpha}: {r}");
        }
    }

    #[test]
    fn residual_detects_non_solutions() {
        let p = params(0.6, 2.0);
        let d = stationary_density(&p, 4096, 0.01).unwrap();
        let exact = fp_residual(&d, &p).unwrap();
        let tilted: Vec<f64> = d.y.iter().zip(&d.rho).map(|(y, r)| r * (1.0 + 0.1 * y)).collect();
        let tilted = StationaryDensity::from_samples(d.y.clone(), tilted).unwrap();
        assert!(fp_residual(&tilted, &p).unwrap() >= 10.0 * exact);
        let flat = StationaryDensity::from_samples(d.y.clone(), vec![0.5; d.len()]).unwrap();
        let r = fp_residual(&flat, &p).unwrap();
        assert!(r > 0.1 && r < 10.0, "{r}");
        let coarse = StationaryDensity::from_samples(d.y[..10].to_vec(), d.rho[..10].to_vec()).unwrap();
        assert!(matches!(fp_residual(&coarse, &p), Err(Error::GridTooCoarse(_))));
    }

    #[test]
    fn bin_probabilities_sum_to_one() {
        let d = stationary_density(&params(0.6, 0.5), 1024, 0.01).unwrap();
        let edges: Vec<f64> = (0..=50).map(|i| -1.0 + 2.0 * i as f64 / 50.0).collect();
        let p = d.bin_probabilities(&edges).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn exit_time_values() {
        assert!((analytic_exit_lower(0.05, 0.6).unwrap() - 0.041_666_666_666_666_664).abs() < 1e-15);
        assert!((analytic_exit_lower(0.05, 0.3).unwrap() - 0.083_333_333_333_333_33).abs() < 1e-15);
        assert_eq!(analytic_exit_lower(0.0, 0.6).unwrap(), 0.0);
        assert!((analytic_exit_upper(0.05, 1.0).unwrap() - 0.025).abs() < 1e-15);
        assert!((analytic_exit_upper(0.1, 2.0).unwrap() - 0.1).abs() < 1e-15);
        let ratio = analytic_exit_upper(0.05, 1.0).unwrap() / analytic_exit_lower(0.05, 0.6).unwrap();
        assert!((ratio - 0.6).abs() < 1e-12);
        assert!(analytic_exit_lower(0.05, 0.0).is_err());
        assert!(analytic_exit_upper(0.05, 0.0).is_err());
    }

    #[test]
    fn exit_bound_and_precondition() {
        assert!((exit_time_bound(0.05, 0.6, 1.0).unwrap() - 0.05 / 0.6).abs() < 1e-15);
        assert!(matches!(exit_time_bound(2.0, 0.6, 1.0), Err(Error::BoundPrecondition { .. })));
        assert!(gap_bound(2.0, 0.6, 1.0, 10.0, 0.0).is_err());
    }

    #[test]
    fn gap_bound_at_time_zero() {
        let oracle = 4.0 * 0.0025 * (2.56 + 0.5 * 100.0 * 0.05f64.powi(4)) * (0.05 / 0.6);
        let b = gap_bound(0.05, 0.6, 1.0, 10.0, 0.0).unwrap();
        assert!((b - oracle).abs() < 1e-15);
        assert!((b - 2.1336e-3).abs() < 1e-7);
    }

    proptest! {
        #[test]
        fn bound_is_twice_the_linearized_exit(delta in 1e-4f64..0.1, g in 0.1f64..10.0, t in 0.1f64..10.0) {
            prop_assume!(2.0 * g * t > delta * (1.0 + g * t));
            let b = exit_time_bound(delta, g, t).unwrap();
            prop_assert!((b - 2.0 * analytic_exit_lower(delta, g).unwrap()).abs() <= 1e-15 * b);
        }

        #[test]
        fn gap_bound_is_cubic_when_noise_is_negligible(delta in 1e-3f64..0.05, g in 0.5f64..5.0) {
            let full = gap_bound(delta, g, 1.0, 0.0, 0.0).unwrap();
            let half = gap_bound(0.5 * delta, g, 1.0, 0.0, 0.0).unwrap();
            prop_assert!((half / full - 0.125).abs() < 1e-12);
        }

        #[test]
        fn closed_form_matches_quadrature(y in -0.999f64..0.999, g in 0.0f64..5.0, t in 0.2f64..5.0) {
            let p = ModelParams::new(g, t, 1.0, 1e-4).unwrap();
            let q = inner_integral(y, &p).unwrap();
            let c = inner_integral_closed_form(y, &p).unwrap();
            prop_assert!((q - c).abs() <= 1e-10 * c.abs() + 1e-14);
        }
    }
}
