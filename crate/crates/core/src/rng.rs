//! Seedable random streams.
//!
//! Every walk owns one [`RandomStream`]. Streams are ChaCha8 generators keyed by
//! a 64-bit seed, and [`RandomStream::derive`] selects one of the 2^64 ChaCha
//! streams for a given index, so ensemble members never share generator state
//! and the result of a walk depends only on `(seed, index)`.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Generator identifier echoed into every JSON output under `"rng"`.
pub const RNG_NAME: &str = "ChaCha8Rng/rand_chacha-0.9 (seed_from_u64 + set_stream); normals: rand_distr-0.5 StandardNormal ziggurat";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RngError {
    #[error("invalid interval: lo ({lo}) > hi ({hi})")]
    InvalidInterval { lo: f64, hi: f64 },
}

#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    index: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self::derive(seed, 0)
    }

    /// Substream `index` of `seed`. Pure in `(seed, index)`.
    pub fn derive(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self { seed, index, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[lo, hi)`; returns `lo` when the interval is degenerate.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> Result<f64, RngError> {
        if !(lo <= hi) {
            return Err(RngError::InvalidInterval { lo, hi });
        }
        if lo == hi {
            return Ok(lo);
        }
        let u: f64 = self.rng.random();
        let v = lo + (hi - lo) * u;
        // rounding can land exactly on `hi` for wide intervals
        Ok(if v < hi { v } else { lo.max(prev_float(hi)) })
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn unit(&mut self) -> f64 {
        self.rng.random()
    }

    /// Standard normal variate (ziggurat, exact).
    pub fn gaussian(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }
}

fn prev_float(x: f64) -> f64 {
    if x > 0.0 {
        f64::from_bits(x.to_bits() - 1)
    } else if x < 0.0 {
        f64::from_bits(x.to_bits() + 1)
    } else {
        -f64::from_bits(1)
    }
}
