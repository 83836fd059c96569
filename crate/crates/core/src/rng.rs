//! Counter-splittable random streams.
//!
//! Every generator is ChaCha20 (`rand_chacha` 0.9). A [`SeedStream`] is a
//! 64-bit key; child keys are derived with the SplitMix64 finalizer and a
//! generator for item `i` is the key's ChaCha20 state with stream id `i`.
//! Results therefore depend only on `(root seed, derivation labels, index)`
//! and never on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Bumped whenever the derivation scheme changes.
pub const RNG_SCHEME_VERSION: u32 = 1;

/// The concrete generator handed to samplers.
pub type StreamRng = ChaCha20Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedStream {
    key: u64,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        Self { key: seed }
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    /// Independent child stream for a label.
    pub fn derive(&self, label: u64) -> Self {
        Self {
            key: splitmix(splitmix(self.key) ^ splitmix(label.wrapping_add(0xA076_1D64_78BD_642F))),
        }
    }

    /// Generator for item `index` of this stream.
    pub fn rng(&self, index: u64) -> StreamRng {
        let mut seed = [0u8; 32];
        let mut z = self.key;
        for chunk in seed.chunks_mut(8) {
            z = splitmix(z);
            chunk.copy_from_slice(&z.to_le_bytes());
        }
        let mut rng = ChaCha20Rng::from_seed(seed);
        rng.set_stream(index);
        rng
    }
}
