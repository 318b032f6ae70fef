//! Reproducible random streams.
//!
//! Every trajectory owns a ChaCha8 generator seeded from a 64-bit token.
//! Ensemble members get their token from [`derive_seed`], a SplitMix64 hash
//! of `(master_seed, index)`, so member `i` sees the same stream no matter
//! which worker runs it or in what order. ChaCha8 has a `2^64`-block period
//! per stream, far beyond any run length used here.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type StreamRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of ensemble member `index` under `master_seed`.
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master_seed).wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1))))
}

pub fn stream(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Brownian increments `N(0, dt)` for a fixed step.
pub struct Increments {
    rng: StreamRng,
    sqrt_dt: f64,
}

impl Increments {
    pub fn new(seed: u64, dt: f64) -> Self {
        Increments {
            rng: stream(seed),
            sqrt_dt: dt.sqrt(),
        }
    }

    #[inline]
    pub fn next_increment(&mut self) -> f64 {
        let z: f64 = self.rng.sample(StandardNormal);
        z * self.sqrt_dt
    }
}
