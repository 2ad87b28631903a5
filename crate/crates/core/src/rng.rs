//! Deterministic random streams.
//!
//! Every randomised routine in this crate draws from a ChaCha8 generator
//! keyed by a 64-bit experiment seed, with the ChaCha stream id carrying a
//! worker/cell index. Streams with distinct indices are independent, and a
//! rerun with the same `(seed, index)` pair replays the exact byte sequence,
//! so parallel schedules cannot change results.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Generator for the sub-stream `index` of the experiment `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform draw from `[0, 1)` with 53 random bits.
pub fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    // 53 high bits of a u64, scaled; the standard open-interval construction.
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Index draw from a finite probability vector by inverse transform.
///
/// `weights` need not be normalised; a strictly positive total is required.
pub fn categorical(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    debug_assert!(total > 0.0);
    let u = uniform(rng) * total;
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}
