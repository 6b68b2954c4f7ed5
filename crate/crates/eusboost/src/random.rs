//! Seedable randomness with named sub-streams.
//!
//! Every stochastic procedure in the crate draws from a [`RandomSource`]
//! sub-stream identified by a label, so the same (seed, label) pair yields
//! the same draw sequence regardless of execution order or platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x1000_0000_01b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSource {
    seed: u64,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Child source for an independent consumer (fold, boosting round, ...).
    pub fn derive(&self, label: &str) -> RandomSource {
        RandomSource {
            seed: splitmix(self.seed ^ fnv1a(label.as_bytes())),
        }
    }

    /// RNG for the named sub-stream.
    pub fn stream(&self, label: &str) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.derive(label).seed)
    }

    /// RNG for an indexed sub-stream, e.g. one per bagging member.
    pub fn substream(&self, label: &str, index: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(splitmix(self.derive(label).seed ^ splitmix(index)))
    }
}
