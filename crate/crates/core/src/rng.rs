//! The single random stream every stochastic decision is drawn from.
//!
//! The generator is ChaCha8 (`rand_chacha`) seeded through
//! `SeedableRng::seed_from_u64`. Index and unit draws are derived from raw
//! `next_u64` words with fixed formulas so that results do not depend on the
//! pointer width or on sampling code in other crates.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Name recorded in manifests to identify the generator.
pub const ALGORITHM: &str = "chacha8/seed_from_u64";

/// Draws a uniform index in `0..n` from one 64-bit word (multiply-shift).
///
/// `n` must be non-zero. A range of one still consumes a word so that the
/// stream position never depends on the sizes involved.
pub fn index<R: RngCore + ?Sized>(rng: &mut R, n: usize) -> usize {
    debug_assert!(n > 0);
    ((u128::from(rng.next_u64()) * n as u128) >> 64) as usize
}

/// Uniform draw in `[0, 1)` with 53 bits of precision.
pub fn unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// True with probability `p`.
pub fn chance<R: RngCore + ?Sized>(rng: &mut R, p: f64) -> bool {
    unit(rng) < p
}

/// In-place Fisher-Yates shuffle.
pub fn shuffle<T, R: RngCore + ?Sized>(rng: &mut R, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = index(rng, i + 1);
        items.swap(i, j);
    }
}

/// Seeded ChaCha8 stream.
#[derive(Clone, Debug)]
pub struct Stream(ChaCha8Rng);

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream(ChaCha8Rng::seed_from_u64(seed))
    }
}

impl RngCore for Stream {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}
