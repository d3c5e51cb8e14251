//! Reproducible randomness, split into independent named streams.
//!
//! Everything random in this crate draws from a `NoiseRng` obtained through
//! [`SeededRng::substream`]. A stream is identified by a list of `u64` parts
//! (stage tag, grid indices, replicate number, ...) folded into a single
//! stream id, so any unit of work can be re-run in isolation and produces the
//! same draws regardless of how the surrounding work was scheduled.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub type NoiseRng = ChaCha12Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeededRng {
    master: u64,
}

impl SeededRng {
    pub fn new(master: u64) -> Self {
        Self { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    /// Stream `id` of this master seed. Distinct ids give streams that do not
    /// overlap for any practical draw count.
    pub fn stream(&self, id: u64) -> NoiseRng {
        let mut rng = NoiseRng::seed_from_u64(self.master);
        rng.set_stream(id);
        rng
    }

    pub fn substream(&self, parts: &[u64]) -> NoiseRng {
        self.stream(mix(parts))
    }
}

/// Folds stream-id parts with splitmix64 steps. Stable across platforms;
/// changing it invalidates every recorded seed, so don't.
pub fn mix(parts: &[u64]) -> u64 {
    let mut h = 0x9e37_79b9_7f4a_7c15u64;
    for &p in parts {
        let mut z = h ^ p.wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        h = z ^ (z >> 31);
    }
    h
}
