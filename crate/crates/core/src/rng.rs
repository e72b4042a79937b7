//! Seed derivation shared by every stochastic component.
//!
//! All randomness flows from explicit 64-bit seeds. Sub-streams (per module,
//! per read, per trajectory) are derived with a splitmix64 mix of the parent
//! seed and the stream index, so results never depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate. ChaCha output is stable across
/// platforms and crate versions, which keeps result files reproducible.
pub type Rng = ChaCha8Rng;

/// One round of the splitmix64 output function.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the seed of sub-stream `index` from `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    splitmix64(base ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

/// Derive a seed from a path of indices, e.g. `(size, instance)`.
pub fn derive_seed_path(base: u64, path: &[u64]) -> u64 {
    path.iter().fold(base, |acc, &i| derive_seed(acc, i))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
