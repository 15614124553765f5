//! Reproducible per-frame random streams.
//!
//! Monte Carlo scans run frames on a worker pool; results must not depend on
//! how many workers run or in which order frames complete. Every frame
//! therefore gets its own ChaCha stream keyed by `(master seed, stream id)`,
//! so frame `i` is reproducible in isolation.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Derive the independent random stream for `(master_seed, stream)`.
///
/// The 256-bit ChaCha key is filled by iterating splitmix64 over the two
/// inputs, so nearby `(seed, stream)` pairs still get unrelated keys.
pub fn substream(master_seed: u64, stream: u64) -> ChaCha12Rng {
    let mut seed = [0u8; 32];
    let mut state = splitmix64(master_seed) ^ splitmix64(stream.wrapping_mul(0xda942042e4dd58b5));
    for chunk in seed.chunks_exact_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha12Rng::from_seed(seed)
}

/// 64-bit FNV-1a, used for content hashes of code files and for the
/// per-frame verification hash of reconciled strings.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}
