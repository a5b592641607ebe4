//! Deterministic RNG substream derivation.
//!
//! All randomness in the crate flows from one explicit 64-bit seed. Each
//! consumer derives an independent ChaCha8 stream from
//! `(seed, stream tag, index)`, so concurrent work (Monte Carlo runs, reverse
//! walks per root) is reproducible regardless of execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Monte Carlo diffusion runs: index is the run number.
pub const STREAM_MC: u64 = 0x4d43;
/// VRR reverse-walk sampling: index is the root node id.
pub const STREAM_VRR: u64 = 0x5652;
/// Synthetic instance generation: index distinguishes sub-generators.
pub const STREAM_SYNTH: u64 = 0x5359;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive the ChaCha8 substream for `(seed, stream, index)`.
pub fn substream(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let a = splitmix64(seed ^ splitmix64(stream));
    let b = splitmix64(a ^ index);
    ChaCha8Rng::seed_from_u64(b)
}

/// Per-repetition seed derivation used by the CLI: `seed + repetition index`.
pub fn repetition_seed(seed: u64, repetition: u64) -> u64 {
    seed.wrapping_add(repetition)
}
