//! Deterministic seed derivation.
//!
//! Every random decision in the crate is derived from a single job seed so
//! that runs are reproducible regardless of how work is split across
//! simulated machines.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a seed with any number of tags into a new, well-distributed seed.
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    tags.iter()
        .fold(splitmix64(seed), |acc, &t| splitmix64(acc ^ splitmix64(t)))
}

/// Uniform draw in `[0, 1)` that depends only on its inputs.
#[inline]
pub fn coin(seed: u64, stream: u64, iteration: u64, item: u64) -> f64 {
    let bits = derive_seed(seed, &[stream, iteration, item]);
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
