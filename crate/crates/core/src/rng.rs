//! Reproducible, splittable random streams.
//!
//! A stream is addressed by `(master_seed, stream_id, lane)`. The ChaCha key
//! is built from `master_seed` and `lane`; `stream_id` selects the ChaCha
//! stream, so every stream is an independent counter-mode sequence that can
//! be created in any order on any worker.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rand_distr::{Distribution, Poisson};

/// Two-to-the-minus-52, the spacing of the uniform grid.
const UNIT: f64 = 1.0 / (1u64 << 52) as f64;

#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    stream_id: u64,
    lane: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    /// Stream `stream_id` (a replication index) of `master_seed`.
    pub fn split(master_seed: u64, stream_id: u64) -> Self {
        Self::with_lane(master_seed, stream_id, 0)
    }

    /// A stream on a named lane. Distinct lanes of the same `(seed, id)`
    /// are independent, which is how one replication gets separate
    /// randomness for the jump process, the Poisson clock and so on.
    pub fn with_lane(master_seed: u64, stream_id: u64, lane: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&master_seed.to_le_bytes());
        key[8..16].copy_from_slice(&lane.to_le_bytes());
        key[16..24].copy_from_slice(b"mssim-v1");
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(stream_id);
        Self {
            master_seed,
            stream_id,
            lane,
            inner,
        }
    }

    /// A fresh stream on another lane of the same `(seed, id)`.
    pub fn lane(&self, lane: u64) -> Self {
        Self::with_lane(self.master_seed, self.stream_id, lane)
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn lane_id(&self) -> u64 {
        self.lane
    }

    /// Uniform on the open interval (0, 1); never returns 0 or 1.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.inner.next_u64() >> 12) as f64 + 0.5) * UNIT
    }

    /// Exp(1) variate.
    #[inline]
    pub fn exponential(&mut self) -> f64 {
        -self.uniform().ln()
    }

    /// Poisson variate with the given mean; a zero mean yields zero.
    pub fn poisson(&mut self, mean: f64) -> u64 {
        if mean <= 0.0 {
            return 0;
        }
        let dist = Poisson::new(mean).expect("finite positive Poisson mean");
        dist.sample(&mut self.inner) as u64
    }

    /// Bernoulli(p) as a 0/1 integer.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> u64 {
        u64::from(self.uniform() < p)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
}

/// SplitMix64 finalizer; derives per-experiment master seeds from the
/// user seed and a tag.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
