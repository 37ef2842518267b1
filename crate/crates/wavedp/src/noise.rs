//! Laplace sampling, the Laplace-Sigmoid noise rule, and seed derivation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic stream used throughout the toolkit.
pub type NoiseRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> NoiseRng {
    NoiseRng::seed_from_u64(seed)
}

/// Stable sub-seed for block index / trial index, so block and trial
/// results do not depend on execution order.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 over the combined value
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One draw from Lap(0, b) by inverse CDF. A draw at scale 2b is exactly
/// twice the draw at scale b under a shared uniform stream.
pub fn sample_laplace(scale: f64, rng: &mut impl Rng) -> f64 {
    debug_assert!(scale > 0.0);
    let u: f64 = rng.gen::<f64>() - 0.5;
    // guard the u = -0.5 endpoint, where the inverse CDF blows up
    let t = (1.0 - 2.0 * u.abs()).max(f64::MIN_POSITIVE);
    -scale * u.signum() * t.ln()
}

pub fn sigmoid(y: f64) -> f64 {
    if y >= 0.0 {
        1.0 / (1.0 + (-y).exp())
    } else {
        let e = y.exp();
        e / (1.0 + e)
    }
}

/// Laplace-Sigmoid noise entry: the Laplace draw `x` shrunk by the sigmoid
/// of the bounded data value `bounded`. Positive draws keep the factor
/// 1 - S(bounded), negative draws keep S(bounded); either way the magnitude
/// shrinks by at least 1/(1 + e^gamma) and at most 1/(1 + e^-gamma).
pub fn laplace_sigmoid(x: f64, bounded: f64) -> f64 {
    let s = sigmoid(bounded);
    if x >= 0.0 {
        (1.0 - s) * x
    } else {
        s * x
    }
}
