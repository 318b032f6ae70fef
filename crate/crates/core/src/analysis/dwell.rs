use serde::Serialize;

use super::{check_band, label_of, StateLabel};
use crate::integrate::Trajectory;
use crate::{Error, Result};

/// Occupancy of the two endpoint bands and the transit region.
///
/// Every sample but the last stands for one sample interval (left-point
/// rule), so the three times add up to the trajectory duration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DwellReport {
    pub delta: f64,
    pub n_samples: u64,
    pub duration: f64,
    pub upper_time: f64,
    pub lower_time: f64,
    pub transit_time: f64,
    /// `upper_time / lower_time`; `None` when the lower band was never occupied.
    pub ratio: Option<f64>,
    pub upper_to_lower: u64,
    pub lower_to_upper: u64,
    /// Time credited to the most recently visited band, transit included.
    pub latched_upper_time: f64,
    pub latched_lower_time: f64,
    pub latched_ratio: Option<f64>,
}

impl DwellReport {
    pub fn occupancy(&self) -> f64 {
        (self.upper_time + self.lower_time) / self.duration
    }

    pub fn transitions(&self) -> u64 {
        self.upper_to_lower + self.lower_to_upper
    }
}

fn slot(label: StateLabel) -> usize {
    match label {
        StateLabel::Upper => 0,
        StateLabel::Lower => 1,
        StateLabel::Transit => 2,
    }
}

/// Streaming form of [`dwell_statistics`] for runs too long to store.
#[derive(Debug, Clone)]
pub struct DwellAccumulator {
    delta: f64,
    sample_dt: f64,
    n_samples: u64,
    counts: [u64; 3],
    latched_counts: [u64; 3],
    pending: Option<(StateLabel, Option<StateLabel>)>,
    last_endpoint: Option<StateLabel>,
    upper_to_lower: u64,
    lower_to_upper: u64,
}

impl DwellAccumulator {
    pub fn new(delta: f64, sample_dt: f64) -> Result<Self> {
        check_band(delta)?;
        if !(sample_dt.is_finite() && sample_dt > 0.0) {
            return Err(Error::param("sample_dt", format!("must be finite and > 0, got {sample_dt}")));
        }
        Ok(DwellAccumulator {
            delta,
            sample_dt,
            n_samples: 0,
            counts: [0; 3],
            latched_counts: [0; 3],
            pending: None,
            last_endpoint: None,
            upper_to_lower: 0,
            lower_to_upper: 0,
        })
    }

    #[inline]
    pub fn push(&mut self, u3: f64) {
        if let Some((label, latch)) = self.pending {
            self.counts[slot(label)] += 1;
            self.latched_counts[slot(latch.unwrap_or(StateLabel::Transit))] += 1;
        }
        let label = label_of(u3, self.delta);
        if label != StateLabel::Transit {
            match (self.last_endpoint, label) {
                (Some(StateLabel::Upper), StateLabel::Lower) => self.upper_to_lower += 1,
                (Some(StateLabel::Lower), StateLabel::Upper) => self.lower_to_upper += 1,
                _ => {}
            }
            self.last_endpoint = Some(label);
        }
        self.pending = Some((label, self.last_endpoint));
        self.n_samples += 1;
    }

    pub fn finish(&self) -> Result<DwellReport> {
        if self.n_samples < 2 {
            return Err(Error::EmptyTrajectory);
        }
        let h = self.sample_dt;
        let time = |c: u64| c as f64 * h;
        let ratio = |num: u64, den: u64| (den > 0).then(|| time(num) / time(den));
        Ok(DwellReport {
            delta: self.delta,
            n_samples: self.n_samples,
            duration: time(self.n_samples - 1),
            upper_time: time(self.counts[0]),
            lower_time: time(self.counts[1]),
            transit_time: time(self.counts[2]),
            ratio: ratio(self.counts[0], self.counts[1]),
            upper_to_lower: self.upper_to_lower,
            lower_to_upper: self.lower_to_upper,
            latched_upper_time: time(self.latched_counts[0]),
            latched_lower_time: time(self.latched_counts[1]),
            latched_ratio: ratio(self.latched_counts[0], self.latched_counts[1]),
        })
    }
}

pub fn dwell_statistics(traj: &Trajectory, delta: f64) -> Result<DwellReport> {
    let mut acc = DwellAccumulator::new(delta, traj.sample_dt())?;
    for &u in traj.values() {
        acc.push(u);
    }
    acc.finish()
}

/// Fraction of the duration spent in either endpoint band.
pub fn occupancy_fraction(traj: &Trajectory, delta: f64) -> Result<f64> {
    Ok(dwell_statistics(traj, delta)?.occupancy())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn series(dt: f64, values: Vec<f64>) -> Trajectory {
        Trajectory::from_samples(dt, values).unwrap()
    }

    #[test]
    fn constant_upper_series_has_undefined_ratio() {
        let traj = series(0.01, vec![1.0; 101]);
        let r = dwell_statistics(&traj, 0.05).unwrap();
        assert!((r.upper_time - 1.0).abs() < 1e-12);
        assert_eq!(r.lower_time, 0.0);
        assert_eq!(r.ratio, None);
        assert_eq!(occupancy_fraction(&traj, 0.05).unwrap(), 1.0);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"ratio\":null"));
    }

    #[test]
    fn constant_center_series_is_never_occupied() {
        let traj = series(0.01, vec![0.0; 50]);
        assert_eq!(occupancy_fraction(&traj, 0.05).unwrap(), 0.0);
    }

    #[test]
    fn square_wave_ratio() {
        // 2 s upper then 1 s lower, sampled at 10 ms, five periods.
        let mut v = Vec::new();
        for _ in 0..5 {
            v.extend(std::iter::repeat_n(0.99, 200));
            v.extend(std::iter::repeat_n(-0.99, 100));
        }
        v.push(0.99);
        let r = dwell_statistics(&series(0.01, v), 0.05).unwrap();
        assert_eq!(r.ratio, Some(2.0));
        assert_eq!(r.upper_to_lower, 5);
        assert_eq!(r.lower_to_upper, 5);
        assert!((r.duration - 15.0).abs() < 1e-12);
    }

    #[test]
    fn transit_runs_and_band_chatter_count_once() {
        // up, transit, up again (no jump), transit, down, chatter at the
        // band edge, down
        let v = vec![1.0, 0.5, 0.96, 0.3, -0.2, -0.96, -0.94, -0.951, -0.94, -1.0];
        let r = dwell_statistics(&series(1.0, v), 0.05).unwrap();
        assert_eq!(r.upper_to_lower, 1);
        assert_eq!(r.lower_to_upper, 0);
        // latched: up,up,up,up,up then down x4; last sample not credited
        assert_eq!(r.latched_upper_time, 5.0);
        assert_eq!(r.latched_lower_time, 4.0);
    }

    #[test]
    fn needs_two_samples() {
        assert!(matches!(dwell_statistics(&series(1.0, vec![0.0]), 0.05), Err(Error::EmptyTrajectory)));
        assert!(matches!(dwell_statistics(&series(1.0, vec![]), 0.05), Err(Error::EmptyTrajectory)));
    }

    proptest! {
        #[test]
        fn times_add_up_to_duration(values in prop::collection::vec(-1.0f64..=1.0, 2..400), dt in 1e-4f64..1.0) {
            let traj = series(dt, values);
            let r = dwell_statistics(&traj, 0.05).unwrap();
            let total = r.upper_time + r.lower_time + r.transit_time;
            prop_assert!((total - traj.duration()).abs() <= 1e-12 * traj.duration());
            prop_assert!((r.latched_upper_time + r.latched_lower_time) <= traj.duration() * (1.0 + 1e-12));
            if let Some(ratio) = r.ratio {
                prop_assert_eq!(ratio, r.upper_time / r.lower_time);
            }
        }
    }
}
