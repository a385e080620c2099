//! Seed hierarchy.
//!
//! Every random stream in the crate is a ChaCha generator keyed by a seed derived
//! from a parent seed and a path of stream tags, so draws depend only on *which*
//! stream they belong to and never on evaluation order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

// stream tags
pub const SPLIT: u64 = 0x5311;
pub const KFOLD: u64 = 0x4b46;
pub const SMOTE: u64 = 0x534d;
pub const RUN: u64 = 0x5255;
pub const FOLDS: u64 = 0xf01d;
pub const INIT: u64 = 0x1417;
pub const GENERATION: u64 = 0x6e4e;
pub const SYNTH: u64 = 0x5e7a;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed of `parent` along `path`.
pub fn derive(parent: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix(parent), |acc, &tag| splitmix(acc ^ splitmix(tag)))
}

pub fn rng(parent: u64, path: &[u64]) -> Rng {
    Rng::seed_from_u64(derive(parent, path))
}
