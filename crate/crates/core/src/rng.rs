//! Seed derivation and counter-based random streams.
//!
//! Every stochastic routine derives its generator from an explicit 64-bit
//! master seed and a stream index (replicate number, report cell, ...), so
//! results depend only on the seed and the task layout, never on thread
//! scheduling or worker count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// One SplitMix64 step; the standard 64-bit mixer.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a sub-seed from a master seed and a path of component indices.
///
/// Distinct paths give statistically independent sub-seeds; the same path
/// always gives the same sub-seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    let mut state = master;
    let mut out = splitmix64(&mut state);
    for &p in path {
        state ^= p.wrapping_mul(0xd6e8_feb8_6659_fd93);
        out = splitmix64(&mut state);
    }
    out
}

/// Generator for stream `stream` under `seed`. Streams are independent
/// ChaCha streams of the same keyed cipher, so any subset can be consumed
/// in any order.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
