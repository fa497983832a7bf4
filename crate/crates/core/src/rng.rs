//! Seeded random streams.
//!
//! Every path is driven by its own `ChaCha8Rng` seeded from a 64-bit value,
//! so replications are reproducible and can run in any order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of replication `r` under a base seed.
///
/// SplitMix64 finalizer applied to `base + r`, so consecutive replications
/// do not share nearby seeds.
pub fn replication_seed(base: u64, r: u64) -> u64 {
    let mut z = base.wrapping_add(r.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn replication_seeds(base: u64, count: usize) -> Vec<u64> {
    (0..count as u64)
        .map(|r| replication_seed(base, r))
        .collect()
}
