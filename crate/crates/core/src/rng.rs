//! Seed derivation for reproducible parallel trials.
//!
//! Every random object in the crate is a pure function of a 64-bit seed. Batch
//! experiments derive the seed of trial `t` in grid cell `c` from the master
//! seed with [`trial_seed`], so the result of a trial does not depend on which
//! thread runs it or in which order trials are scheduled.
//!
//! The mixing function is the SplitMix64 finalizer applied in a chain:
//!
//! ```text
//! h0 = splitmix(master)
//! h1 = splitmix(h0 ^ (cell  + 0x9E3779B97F4A7C15))
//! h2 = splitmix(h1 ^ (trial + 0xD1B54A32D192ED03))
//! ```
//!
//! where `splitmix(z)` is
//! `z += 0x9E3779B97F4A7C15; z = (z ^ z>>30) * 0xBF58476D1CE4E5B9;
//! z = (z ^ z>>27) * 0x94D049BB133111EB; z ^ z>>31` (wrapping arithmetic).
//! The seed initialises a ChaCha8 stream cipher generator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const CELL_SALT: u64 = 0x9E37_79B9_7F4A_7C15;
const TRIAL_SALT: u64 = 0xD1B5_4A32_D192_ED03;

#[inline]
pub fn splitmix64(z: u64) -> u64 {
    let mut z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `trial` of grid cell `cell` under `master`.
pub fn trial_seed(master: u64, cell: u64, trial: u64) -> u64 {
    let h0 = splitmix64(master);
    let h1 = splitmix64(h0 ^ cell.wrapping_add(CELL_SALT));
    splitmix64(h1 ^ trial.wrapping_add(TRIAL_SALT))
}

/// Derives an independent sub-seed, used when one operation needs several
/// streams (for example one per copy of a hypergraph).
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    trial_seed(seed, u64::MAX, index)
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
