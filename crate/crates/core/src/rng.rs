//! Counter-based random stream derivation.
//!
//! Every simulation in the engine draws from its own generator, keyed by a
//! path of indices below the master seed (draw `j`, replicate `k`, ...). A
//! stream therefore never depends on which thread ran it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used throughout the crate.
pub type DccRng = ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A node in the tree of random streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Streams {
    key: u64,
}

impl Streams {
    pub fn new(seed: u64) -> Self {
        Self { key: splitmix64(seed) }
    }

    /// The `index`-th child stream.
    pub fn child(&self, index: u64) -> Self {
        Self {
            key: splitmix64(self.key ^ splitmix64(index.wrapping_add(0x6A09_E667_F3BC_C909))),
        }
    }

    /// Follows a path of child indices.
    pub fn path(&self, indices: &[u64]) -> Self {
        indices.iter().fold(*self, |s, &i| s.child(i))
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> DccRng {
        let mut seed = [0u8; 32];
        let mut z = self.key;
        for chunk in seed.chunks_exact_mut(8) {
            z = splitmix64(z);
            chunk.copy_from_slice(&z.to_le_bytes());
        }
        DccRng::from_seed(seed)
    }

    /// A 64-bit seed for APIs that want one.
    pub fn seed(&self) -> u64 {
        splitmix64(self.key ^ 0xA5A5_A5A5_A5A5_A5A5)
    }
}
