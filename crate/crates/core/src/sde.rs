//! Scalar SDE models behind one trait, selectable by name.
//!
//! The Euler–Maruyama engine in [`crate::integrate`] is generic over
//! [`ScalarSde`]; concrete callers monomorphize it, while the CLI picks a
//! model at runtime through [`SdeRegistry`].

use std::collections::BTreeMap;
use std::fmt;

use crate::{Error, ModelParams, Result};

/// An autonomous Itô SDE `dx = a(x) dt + b(x) dW` on a closed interval.
pub trait ScalarSde: Send + Sync {
    fn name(&self) -> &str;

    /// Column name for serialized samples.
    fn variable(&self) -> &str {
        "x"
    }

    fn drift(&self, x: f64) -> f64;

    fn diffusion(&self, x: f64) -> f64;

    /// State space; each Euler step is clamped into it.
    fn bounds(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
}

impl<S: ScalarSde + ?Sized> ScalarSde for &S {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn variable(&self) -> &str {
        (**self).variable()
    }

    #[inline]
    fn drift(&self, x: f64) -> f64 {
        (**self).drift(x)
    }

    #[inline]
    fn diffusion(&self, x: f64) -> f64 {
        (**self).diffusion(x)
    }

    fn bounds(&self) -> (f64, f64) {
        (**self).bounds()
    }
}

/// The pumped collapse SDE for `U₃` on `[−1, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct CollapseSde {
    params: ModelParams,
}

impl CollapseSde {
    pub fn new(params: ModelParams) -> Self {
        CollapseSde { params }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }
}

impl ScalarSde for CollapseSde {
    fn name(&self) -> &str {
        if self.params.has_decay() {
            "collapse"
        } else {
            "pure-noise"
        }
    }

    fn variable(&self) -> &str {
        "u3"
    }

    #[inline]
    fn drift(&self, x: f64) -> f64 {
        self.params.drift_at(x)
    }

    #[inline]
    fn diffusion(&self, x: f64) -> f64 {
        self.params.diffusion_at(x)
    }

    fn bounds(&self) -> (f64, f64) {
        (-1.0, 1.0)
    }
}

/// Shifted process `V = U₃ + 1` on `[0, 2]`:
/// `dV = (−V/T + G(2 − V)) dt + αV(2 − V) dW`.
#[derive(Debug, Clone, Copy)]
pub struct ShiftedSde {
    pump_rate: f64,
    decay_rate: f64,
    noise_strength: f64,
}

impl ShiftedSde {
    pub fn new(params: &ModelParams) -> Self {
        ShiftedSde {
            pump_rate: params.pump_rate(),
            decay_rate: params.decay_rate(),
            noise_strength: params.noise_strength(),
        }
    }
}

impl ScalarSde for ShiftedSde {
    fn name(&self) -> &str {
        "shifted"
    }

    fn variable(&self) -> &str {
        "v"
    }

    #[inline]
    fn drift(&self, v: f64) -> f64 {
        -v * self.decay_rate + self.pump_rate * (2.0 - v)
    }

    #[inline]
    fn diffusion(&self, v: f64) -> f64 {
        self.noise_strength * v * (2.0 - v)
    }

    fn bounds(&self) -> (f64, f64) {
        (0.0, 2.0)
    }
}

/// Linearization of the shifted process at the lower pole:
/// `dX = 2G dt + 2αX dW`. Unbounded; used only while `V` is in `[0, δ)`.
#[derive(Debug, Clone, Copy)]
pub struct LinearLowerSde {
    pump_rate: f64,
    noise_strength: f64,
}

impl LinearLowerSde {
    pub fn new(params: &ModelParams) -> Self {
        LinearLowerSde {
            pump_rate: params.pump_rate(),
            noise_strength: params.noise_strength(),
        }
    }
}

impl ScalarSde for LinearLowerSde {
    fn name(&self) -> &str {
        "linear-lower"
    }

    #[inline]
    fn drift(&self, _x: f64) -> f64 {
        2.0 * self.pump_rate
    }

    #[inline]
    fn diffusion(&self, x: f64) -> f64 {
        2.0 * self.noise_strength * x
    }
}

/// Linearization at the upper pole: `dX = −(2/T) dt − 2α(X − 2) dW`.
#[derive(Debug, Clone, Copy)]
pub struct LinearUpperSde {
    decay_rate: f64,
    noise_strength: f64,
}

impl LinearUpperSde {
    pub fn new(params: &ModelParams) -> Self {
        LinearUpperSde {
            decay_rate: params.decay_rate(),
            noise_strength: params.noise_strength(),
        }
    }
}

impl ScalarSde for LinearUpperSde {
    fn name(&self) -> &str {
        "linear-upper"
    }

    #[inline]
    fn drift(&self, _x: f64) -> f64 {
        -2.0 * self.decay_rate
    }

    #[inline]
    fn diffusion(&self, x: f64) -> f64 {
        -2.0 * self.noise_strength * (x - 2.0)
    }
}

type Factory = Box<dyn Fn(&ModelParams) -> Result<Box<dyn ScalarSde>> + Send + Sync>;

/// Named constructors for [`ScalarSde`] models.
pub struct SdeRegistry {
    factories: BTreeMap<String, (String, Factory)>,
}

impl SdeRegistry {
    pub fn new() -> Self {
        SdeRegistry {
            factories: BTreeMap::new(),
        }
    }

    /// Registry holding the collapse SDE, its pure-noise reduction, the
    /// shifted process and both endpoint linearizations.
    pub fn with_builtins() -> Self {
        let mut reg = Self::new();
        reg.register("collapse", "pumped collapse SDE for U3 on [-1, 1]", |p| {
            Ok(Box::new(CollapseSde::new(*p)))
        });
        reg.register("pure-noise", "collapse noise only (G = 0, no decay)", |p| {
            let pn = ModelParams::pure_noise(p.noise_strength(), p.time_step())?;
            Ok(Box::new(CollapseSde::new(pn)))
        });
        reg.register("shifted", "V = U3 + 1 on [0, 2]", |p| Ok(Box::new(ShiftedSde::new(p))));
        reg.register("linear-lower", "linearization dX = 2G dt + 2 alpha X dW", |p| {
            Ok(Box::new(LinearLowerSde::new(p)))
        });
        reg.register("linear-upper", "linearization dX = -(2/T) dt - 2 alpha (X - 2) dW", |p| {
            Ok(Box::new(LinearUpperSde::new(p)))
        });
        reg
    }

    pub fn register<F>(&mut self, name: &str, summary: &str, factory: F)
    where
        F: Fn(&ModelParams) -> Result<Box<dyn ScalarSde>> + Send + Sync + 'static,
    {
        self.factories
            .insert(name.to_string(), (summary.to_string(), Box::new(factory)));
    }

    pub fn create(&self, name: &str, params: &ModelParams) -> Result<Box<dyn ScalarSde>> {
        let (_, factory) = self
            .factories
            .get(name)
            .ok_or_else(|| Error::UnknownModel(name.to_string()))?;
        factory(params)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }

    pub fn describe(&self) -> impl Iterator<Item = (&str, &str)> {
        self.factories
            .iter()
            .map(|(name, (summary, _))| (name.as_str(), summary.as_str()))
    }
}

impl Default for SdeRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl fmt::Debug for SdeRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}
