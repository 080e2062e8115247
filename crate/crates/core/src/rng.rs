//! Seed derivation and stream-based random number generation.
//!
//! Every sampler in this crate is a pure function of `(spec, seed)`. Distinct
//! random streams (one per feature column, noise term, or sweep cell) get
//! their own seed, derived from the master seed and a list of stream words by
//! [`mix_seed`]. Adding or reordering streams therefore never perturbs the
//! draws of other streams.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer: a fixed 64-bit bijective mixing function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Derive a substream seed by absorbing `words` into `base` with the
/// SplitMix64 finalizer, one word at a time.
pub fn mix_seed(base: u64, words: &[u64]) -> u64 {
    let mut state = splitmix64(base.wrapping_add(GOLDEN_GAMMA));
    for &w in words {
        state = splitmix64(state.wrapping_add(GOLDEN_GAMMA).wrapping_add(w));
    }
    state
}

/// RNG for one derived stream.
pub fn stream_rng(base: u64, words: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix_seed(base, words))
}
