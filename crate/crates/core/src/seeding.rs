//! Deterministic seed derivation.
//!
//! Every random decision in the crate is driven either by a `ChaCha8Rng`
//! seeded from a derived 64-bit seed or by a keyed uniform draw. Both are
//! pure functions of their inputs, so results do not depend on thread
//! scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a base seed with a sequence of keys into a new seed.
pub fn derive_seed(seed: u64, keys: &[u64]) -> u64 {
    keys.iter()
        .fold(splitmix64(seed), |acc, &k| splitmix64(acc ^ splitmix64(k)))
}

pub fn rng_from(seed: u64, keys: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, keys))
}

/// Uniform draw in `[0, 1)` addressed by `(seed, keys)`.
pub fn keyed_uniform(seed: u64, keys: &[u64]) -> f64 {
    // 53 high bits -> exact dyadic in [0, 1)
    (derive_seed(seed, keys) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform index in `0..len` addressed by `(seed, keys)`.
pub fn keyed_index(seed: u64, keys: &[u64], len: usize) -> usize {
    debug_assert!(len > 0);
    let idx = (keyed_uniform(seed, keys) * len as f64) as usize;
    idx.min(len - 1)
}
