//! Observables computed from trajectories.

mod dwell;
mod exit_time;
mod histogram;
mod smooth;

pub use dwell::{dwell_statistics, occupancy_fraction, DwellAccumulator, DwellReport};
pub use exit_time::{exit_time_mc, ExitTimeReport};
pub use histogram::{histogram, total_variation, EmpiricalDensity, HistogramAccumulator};
pub use smooth::{gaussian_kernel, smooth};

use serde::Serialize;

use crate::{Error, ModelParams, Result};

/// Band half-width used for the endpoint states unless overridden.
pub const DEFAULT_BAND: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StateLabel {
    Upper,
    Lower,
    Transit,
}

pub(crate) fn check_band(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::param("delta", format!("band width must be in (0, 1), got {delta}")))
    }
}

/// Unchecked band membership; bands are closed at `±(1 − δ)`.
#[inline]
pub(crate) fn label_of(u3: f64, delta: f64) -> StateLabel {
    if u3 >= 1.0 - delta {
        StateLabel::Upper
    } else if u3 <= -1.0 + delta {
        StateLabel::Lower
    } else {
        StateLabel::Transit
    }
}

pub fn classify(u3: f64, delta: f64) -> Result<StateLabel> {
    if !(u3.abs() <= 1.0) {
        return Err(Error::Domain {
            value: u3,
            domain: "[-1, 1]",
        });
    }
    check_band(delta)?;
    Ok(label_of(u3, delta))
}

/// Transient discarded by the statistics commands by default:
/// `max(10 T, 10 / (G + 1/T))`.
pub fn default_burn_in(params: &ModelParams) -> f64 {
    let by_decay = params.decay_time().map_or(0.0, |t| 10.0 * t);
    let rate = params.relaxation_rate();
    let by_rate = if rate > 0.0 { 10.0 / rate } else { 0.0 };
    by_decay.max(by_rate)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_examples() {
        assert_eq!(classify(0.96, 0.05).unwrap(), StateLabel::Upper);
        assert_eq!(classify(-1.0, 0.05).unwrap(), StateLabel::Lower);
        assert_eq!(classify(0.0, 0.05).unwrap(), StateLabel::Transit);
        assert_eq!(classify(0.95, 0.05).unwrap(), StateLabel::Upper);
        assert_eq!(classify(-0.95, 0.05).unwrap(), StateLabel::Lower);
        assert_eq!(classify(0.9499, 0.05).unwrap(), StateLabel::Transit);
    }

    #[test]
    fn classify_rejects_bad_inputs() {
        assert!(classify(1.01, 0.05).is_err());
        assert!(classify(0.0, 0.0).is_err());
        assert!(classify(0.0, 1.0).is_err());
    }

    #[test]
    fn burn_in_default() {
        let p = ModelParams::new(0.6, 1.0, 10.0, 1e-4).unwrap();
        assert_eq!(default_burn_in(&p), 10.0);
        let p = ModelParams::new(2.0, 3.0, 10.0, 1e-4).unwrap();
        assert_eq!(default_burn_in(&p), 30.0);
        let p = ModelParams::pure_noise(10.0, 1e-4).unwrap();
        assert_eq!(default_burn_in(&p), 0.0);
    }
}
