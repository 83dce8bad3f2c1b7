//! Seed plumbing shared by every randomized routine in the crate.
//!
//! All sampling is driven by an explicit 64-bit master seed. Work that is
//! split into independent units (Monte Carlo trials, repeated counting runs,
//! graph samples) derives one child seed per unit with `derive_seed`, so the
//! unit's stream is independent of how the units are scheduled. Results are
//! then identical whether the units run serially or on a rayon pool of any
//! size.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Mixes `(master, index)` into one child seed.
///
/// This is the splitmix64 finalizer applied to `master + index * phi64`;
/// distinct indices give decorrelated streams even for adjacent masters.
/// Unit `i` of any parallel routine uses exactly `derive_seed(master, i)`.
#[inline]
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The generator used everywhere: ChaCha with 8 rounds, seeded from a u64.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for unit `index` of a run with the given master seed.
pub fn unit_rng(master: u64, index: u64) -> ChaCha8Rng {
    seeded_rng(derive_seed(master, index))
}
