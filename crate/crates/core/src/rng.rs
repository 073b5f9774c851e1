//! Seed derivation for reproducible, order-independent parallel runs.
//!
//! Every sampling entry point takes a `u64` seed. Sub-streams (grid cells,
//! bootstrap replicates) derive their own seed with [`mix`], so results do
//! not depend on scheduling order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 step; good avalanche, cheap.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from a base seed and a path of indices.
pub fn mix(seed: u64, parts: &[u64]) -> u64 {
    let mut s = splitmix64(seed);
    for &p in parts {
        s = splitmix64(s ^ p.wrapping_mul(0xff51_afd7_ed55_8ccd));
    }
    s
}

/// Deterministic RNG for a given seed.
pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
