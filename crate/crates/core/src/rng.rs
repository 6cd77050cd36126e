//! Seeded randomness.
//!
//! All randomness comes from ChaCha8 seeded with a `u64`. Independent consumers
//! of the same seed use distinct ChaCha streams:
//!
//! | stream | consumer                         |
//! |--------|----------------------------------|
//! | 0      | column permutation of an online pass |
//! | 1      | MKP instance generation          |
//!
//! Benchmark cells derive their seed from `(base seed, K, repetition)` with
//! [`derive_seed`], so every CSV row is replayable from its own seed column.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const PERMUTATION_STREAM: u64 = 0;
pub const GENERATOR_STREAM: u64 = 1;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for repetition `rep` of a cell with duplication factor `k`.
pub fn derive_seed(base: u64, k: u64, rep: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(base) ^ k) ^ rep)
}
