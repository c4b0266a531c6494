//! Seeded random streams.
//!
//! Every random draw in the crate comes from ChaCha8 seeded via
//! `seed_from_u64`, which is specified to be portable across platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
