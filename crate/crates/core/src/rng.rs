//! Seedable, portable randomness.
//!
//! All stochastic procedures in this crate draw from [`ChaCha8Rng`], which
//! produces the same stream on every platform for a given 64-bit seed.
//! Replicates and sweep cells derive independent seeds with [`derive_seed`]:
//! the base seed is folded together with a stream of coordinate words through
//! splitmix64, so cell seeds are reproducible and independent of execution
//! order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One splitmix64 step: mixes `state` into a well-distributed 64-bit value.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `base` and a coordinate path.
///
/// Each coordinate word is absorbed with one splitmix64 round, so
/// `derive_seed(s, &[a, b])` and `derive_seed(s, &[b, a])` differ.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    let mut state = splitmix64(base);
    for &word in path {
        state = splitmix64(state ^ word.wrapping_mul(0xD6E8_FEB8_6659_FD93));
    }
    state
}

/// The crate-wide RNG, seeded from a 64-bit value.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
