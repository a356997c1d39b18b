//! Seeded generator for planted instances and suites.
//!
//! SplitMix64: `state += 0x9e3779b97f4a7c15`, then the output is the state
//! mixed by `z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9`,
//! `z = (z ^ (z >> 27)) * 0x94d049bb133111eb`, `z ^ (z >> 31)`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

#[derive(Debug, Clone)]
pub struct Rng(SplitMix64);

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `0..n` by rejection; `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }

    /// Uniform in `lo..=hi`.
    pub fn range(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.below(hi - lo + 1)
    }

    /// True with probability `num / den`.
    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }

    /// Independent child stream for trial `i`.
    pub fn fork(seed: u64, i: u64) -> Rng {
        let mut base = Rng::new(seed);
        let mut s = base.next_u64();
        for _ in 0..i {
            s = base.next_u64();
        }
        Rng::new(s ^ i.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }
}
