use serde::Serialize;

use crate::integrate::Trajectory;
use crate::{Error, Result};

/// Bin probabilities over equal-width bins spanning `[−1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalDensity {
    pub edges: Vec<f64>,
    pub probs: Vec<f64>,
    pub n_samples: u64,
}

impl EmpiricalDensity {
    pub fn n_bins(&self) -> usize {
        self.probs.len()
    }

    /// `(left, right, prob)` per bin.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, &p)| (self.edges[i], self.edges[i + 1], p))
    }
}

#[derive(Debug, Clone)]
pub struct HistogramAccumulator {
    counts: Vec<u64>,
}

impl HistogramAccumulator {
    pub fn new(n_bins: usize) -> Result<Self> {
        if n_bins < 2 {
            return Err(Error::param("n_bins", format!("need at least 2 bins, got {n_bins}")));
        }
        Ok(HistogramAccumulator {
            counts: vec![0; n_bins],
        })
    }

    /// Values outside `[−1, 1]` are folded into the end bins.
    #[inline]
    pub fn push(&mut self, u: f64) {
        let n = self.counts.len();
        let k = ((u + 1.0) * 0.5 * n as f64).floor();
        let k = if k < 0.0 { 0 } else { (k as usize).min(n - 1) };
        self.counts[k] += 1;
    }

    pub fn merge(&mut self, other: &HistogramAccumulator) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub fn finish(&self) -> Result<EmpiricalDensity> {
        let total: u64 = self.counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptyTrajectory);
        }
        let n = self.counts.len();
        let edges = (0..=n).map(|i| -1.0 + 2.0 * i as f64 / n as f64).collect();
        let probs = self.counts.iter().map(|&c| c as f64 / total as f64).collect();
        Ok(EmpiricalDensity {
            edges,
            probs,
            n_samples: total,
        })
    }
}

pub fn histogram(traj: &Trajectory, n_bins: usize) -> Result<EmpiricalDensity> {
    let mut acc = HistogramAccumulator::new(n_bins)?;
    for &u in traj.values() {
        acc.push(u);
    }
    acc.finish()
}

/// `½ Σ |p − q|` over matching bins.
pub fn total_variation(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::param("q", format!("length {} does not match {}", q.len(), p.len())));
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}
