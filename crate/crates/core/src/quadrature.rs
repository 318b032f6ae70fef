//! Adaptive quadrature for smooth integrands on finite intervals.
//!
//! Panels are integrated with the double-exponential rule; a panel's error
//! is the disagreement between its own estimate and the sum over its two
//! halves. The panel with the largest error is split until the total error
//! meets the tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use quadrature::double_exponential;

use crate::{Error, Result};

const MAX_PANELS: usize = 20_000;

/// The halving estimate runs slightly optimistic next to a pole, so the
/// target is tightened by this factor.
const SAFETY: f64 = 0.1;

fn rule<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    double_exponential::integrate(f, a, b, 1e-300).integral
}

struct Panel {
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    error: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64) -> Panel {
        let m = 0.5 * (a + b);
        let (left, right) = (rule(f, a, m), rule(f, m, b));
        let diff = (left + right - whole).abs();
        // Disagreement at this level is round-off, not truncation.
        let noise = 1e3 * f64::EPSILON * (left.abs() + right.abs());
        let error = if diff <= noise || m == a || m == b { 0.0 } else { diff };
        Panel {
            a,
            b,
            left,
            right,
            error,
        }
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// `∫ₐᵇ f` to relative tolerance `rel_tol`, with `abs_floor` guarding
/// integrals that are close to zero.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_floor: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::param("limits", format!("need finite limits, got [{a}, {b}]")));
    }
    let first = Panel::new(&f, a, b, rule(&f, a, b));
    let mut total_error = first.error;
    let mut heap = BinaryHeap::from([first]);
    loop {
        let value: f64 = heap.iter().map(|p| p.left + p.right).sum();
        let tol = SAFETY * (rel_tol * value.abs()).max(abs_floor);
        if total_error <= tol {
            return Ok(value);
        }
        if heap.len() >= MAX_PANELS {
            return Err(Error::Quadrature {
                a,
                b,
                estimate: total_error,
            });
        }
        let worst = heap.pop().expect("nonempty heap");
        let m = 0.5 * (worst.a + worst.b);
        let l = Panel::new(&f, worst.a, m, worst.left);
        let r = Panel::new(&f, m, worst.b, worst.right);
        total_error += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
    }
}
