//! Seeded random streams.
//!
//! Every consumer of randomness asks for a named substream derived from the
//! run seed, so adding a new consumer never shifts the draws of another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type Rng = ChaCha8Rng;

/// Substream names used by the optimizer and evaluation harness.
pub mod stream {
    pub const INIT: &str = "init";
    pub const DE: &str = "de";
    pub const KMEANS: &str = "kmeans";
    pub const QOBL: &str = "qobl";
    pub const JRAND: &str = "jrand";
    pub const FOLDS: &str = "folds";
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a parent seed and a label.
pub fn derive_seed(seed: u64, name: &str) -> u64 {
    splitmix(seed ^ fnv1a(name.as_bytes()))
}

/// Opens the named substream of `seed`.
pub fn substream(seed: u64, name: &str) -> Rng {
    Rng::seed_from_u64(derive_seed(seed, name))
}
