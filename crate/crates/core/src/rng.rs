//! Deterministic random streams.
//!
//! Every random choice is drawn from ChaCha20 keyed by `(q, seed, purpose,
//! index)`, so a run is reproducible from those values alone and independent
//! of thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Stream used to pick the field moduli.
pub const PURPOSE_TOWER: u64 = 1;
/// Stream used to draw candidate families.
pub const PURPOSE_FAMILIES: u64 = 2;
/// Per-trace streams for the randomized trace search; `index` is the trace.
pub const PURPOSE_TRACE: u64 = 3;
/// Stream used to choose the a values of a sampled certificate.
pub const PURPOSE_SAMPLE: u64 = 4;

pub fn seeded_rng(q: u64, seed: u64, purpose: u64, index: u64) -> ChaCha20Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&q.to_le_bytes());
    key[8..16].copy_from_slice(&seed.to_le_bytes());
    key[16..24].copy_from_slice(&purpose.to_le_bytes());
    key[24..].copy_from_slice(&index.to_le_bytes());
    ChaCha20Rng::from_seed(key)
}
