//! Seeded sampling that any language can reproduce bit for bit.
//!
//! The generator is SplitMix64 used in counter mode: draw `k` (starting at 1)
//! is `mix(seed + k * 0x9E3779B97F4A7C15)` with wrapping arithmetic, where
//!
//! ```text
//! mix(z): z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!         z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!         return z ^ (z >> 31)
//! ```
//!
//! Bounded draws use rejection: `below(n)` discards draws `>= n * floor(2^64 / n)`
//! and returns the remainder mod `n`. Subsets are sampled with Floyd's
//! algorithm, which consumes exactly `k` bounded draws.

use std::collections::HashSet;

use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    seed: u64,
    counter: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { seed, counter: 0 }
    }

    /// The `k`-th output (1-based) without advancing any state.
    pub fn at(seed: u64, k: u64) -> u64 {
        mix64(seed.wrapping_add(k.wrapping_mul(GOLDEN_GAMMA)))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter += 1;
        Self::at(self.seed, self.counter)
    }

    /// Uniform draw from `[0, n)`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        let zone = (u64::MAX / n) * n;
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }
}

/// `k` distinct values from `[0, n)` by Floyd's algorithm, in draw order.
pub fn sample_distinct(n: u64, k: u64, rng: &mut SplitMix64) -> Result<Vec<u64>> {
    if k > n {
        return Err(Error::InvalidRange(format!("cannot draw {k} distinct values from {n}")));
    }
    let mut chosen = HashSet::with_capacity(k as usize);
    let mut order = Vec::with_capacity(k as usize);
    for j in (n - k)..n {
        let t = rng.below(j + 1);
        let pick = if chosen.contains(&t) { j } else { t };
        chosen.insert(pick);
        order.push(pick);
    }
    Ok(order)
}
