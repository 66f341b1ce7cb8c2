//! Seeded random streams.
//!
//! Every stochastic routine draws from [`Xoshiro256PlusPlus`] seeded through
//! `seed_from_u64` (SplitMix64 expansion). Independent streams derive their
//! seed as `base.wrapping_add(index)`: solver repetition `r` uses `seed + r`.
//!
//! [`Xoshiro256PlusPlus`]: rand_xoshiro::Xoshiro256PlusPlus

pub use rand_xoshiro::Xoshiro256PlusPlus as StreamRng;

use rand::{RngCore, SeedableRng};

pub fn stream(base: u64, index: u64) -> StreamRng {
    StreamRng::seed_from_u64(base.wrapping_add(index))
}

/// Seed for the sub-task at `path` below `base`: each step takes the first
/// output of `stream(seed, index)`.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter().fold(base, |seed, &index| stream(seed, index).next_u64())
}
