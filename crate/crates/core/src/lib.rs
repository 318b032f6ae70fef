//! Continuous-collapse model of quantum telegraph switching.
//!
//! A single qubit under incoherent pumping `G`, energy decay `1/T` and a
//! multiplicative collapse noise of strength `α` obeys the Itô SDE
//!
//! ```text
//! dU₃ = (−(U₃ + 1)/T + G(1 − U₃)) dt + α(1 − U₃²) dW
//! ```
//!
//! For large `α` the trajectory sticks near `U₃ = ±1` and hops between the
//! two ends, producing telegraph noise. This crate provides
//!
//! * [`model`]: parameters and the closed-form scalar functions,
//! * [`sde`]: the family of scalar SDEs behind one trait, with a name registry,
//! * [`integrate`]: Euler–Maruyama steppers and reproducible ensembles,
//! * [`analysis`]: band classification, dwell statistics, smoothing,
//!   histograms and Monte-Carlo exit times,
//! * [`fokker_planck`]: the stationary density, its ODE residual and the
//!   analytic exit-time values and bounds,
//! * [`io`]: CSV writers for trajectories, densities and histograms.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod fokker_planck;
pub mod integrate;
pub mod io;
pub mod model;
pub mod quadrature;
pub mod rng;
pub mod sde;

pub use error::{Error, Result};
pub use model::{Bloch3Params, ModelParams, WeakMeasParams};
