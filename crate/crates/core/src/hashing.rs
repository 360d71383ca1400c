//! Stable hashing for deriving oracle choices and RNG streams from seeds.
//!
//! `std`'s hashers are not guaranteed stable across releases, so answers
//! that must replay bit-for-bit use this splitmix64-based mixer instead.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy)]
pub struct StableHasher(u64);

impl StableHasher {
    pub fn new(seed: u64) -> Self {
        StableHasher(splitmix64(seed))
    }

    pub fn word(mut self, w: u64) -> Self {
        self.0 = splitmix64(self.0 ^ w.wrapping_mul(GOLDEN).rotate_left(17));
        self
    }

    pub fn bytes(self, bs: impl IntoIterator<Item = u8>) -> Self {
        let mut h = self;
        let mut len = 0u64;
        for b in bs {
            h = h.word(u64::from(b));
            len += 1;
        }
        h.word(len)
    }

    pub fn finish(self) -> u64 {
        self.0
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}
