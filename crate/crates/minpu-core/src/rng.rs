//! Deterministic random source.
//!
//! Everything that draws randomness (the perturber, instance generators,
//! verification trials) goes through ChaCha8 seeded from a u64, which keeps
//! outputs byte-identical across platforms and releases.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Rng(ChaCha8Rng);

impl Rng {
    pub fn from_seed(seed: u64) -> Self {
        Rng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform draw from 0..bound (bound > 0). The tiny modulo bias is
    /// irrelevant here; determinism is what matters.
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        self.0.next_u64() % bound
    }

    pub fn coin(&mut self) -> bool {
        self.0.next_u64() & 1 == 1
    }
}
