//! Finite sums `FS(<x_n>)` and dominance-bounded seeds.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::Rat;

/// Largest seed length for which subset sums are enumerated.
pub const MAX_SEED_LEN: usize = 24;

/// All sums over nonempty index subsets of `xs`.
pub fn finite_sums(xs: &[Rat]) -> BTreeSet<Rat> {
    let mut out: BTreeSet<Rat> = BTreeSet::new();
    for x in xs {
        let shifted: Vec<Rat> = out.iter().map(|s| s + x).collect();
        out.insert(x.clone());
        out.extend(shifted);
    }
    out
}

/// Subset sums of integer numerators indexed by bitmask: `out[m]` is the sum
/// over the set bits of `m`, with `out[0] = 0`.
pub fn subset_sums(ks: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize; 1 << ks.len()];
    for m in 1..out.len() {
        let low = m.trailing_zeros() as usize;
        out[m] = out[m & (m - 1)] + ks[low];
    }
    out
}

/// A finite sequence `x_1, ..., x_L` with `x_n <= c * 2^-n` and pairwise
/// distinct subset sums.
///
/// The geometric bound is the checkable stand-in for a convergent series: it
/// gives the tail estimate `FS(<x_n>_{n >= M}) ⊂ (0, c * 2^(1-M))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FSSeed {
    xs: Vec<Rat>,
    bound: Rat,
}

impl FSSeed {
    pub fn new(xs: Vec<Rat>, bound: Rat) -> Result<FSSeed> {
        if xs.is_empty() {
            return Err(Error::InvalidSeed("empty seed".into()));
        }
        if xs.len() > MAX_SEED_LEN {
            return Err(Error::GuardExceeded(format!(
                "seed of length {} (max {MAX_SEED_LEN})",
                xs.len()
            )));
        }
        for (i, x) in xs.iter().enumerate() {
            if x.is_zero() {
                return Err(Error::InvalidSeed(format!("term {} is zero", i + 1)));
            }
            let cap = &bound * &Rat::pow2_inv(i as u32 + 1);
            if *x > cap {
                return Err(Error::InvalidSeed(format!(
                    "term {} = {x} exceeds {bound} * 2^-{}",
                    i + 1,
                    i + 1
                )));
            }
        }
        let sums = finite_sums(&xs);
        if sums.len() != (1usize << xs.len()) - 1 {
            return Err(Error::InvalidSeed("subset sums collide".into()));
        }
        Ok(FSSeed { xs, bound })
    }

    /// Seed with the smallest admissible bound `c = max_n x_n 2^n`.
    pub fn tight(xs: Vec<Rat>) -> Result<FSSeed> {
        let bound = xs
            .iter()
            .enumerate()
            .map(|(i, x)| x * &Rat::integer(1u64 << (i + 1).min(63)))
            .max()
            .unwrap_or_else(Rat::zero);
        FSSeed::new(xs, bound)
    }

    pub fn terms(&self) -> &[Rat] {
        &self.xs
    }

    pub fn bound(&self) -> &Rat {
        &self.bound
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// `FS(<x_n>_{n=1}^{l})`.
    pub fn sums_upto(&self, l: usize) -> BTreeSet<Rat> {
        finite_sums(&self.xs[..l.min(self.xs.len())])
    }

    /// Upper bound on every element of `FS(<x_n>_{n >= m})` (1-based `m`).
    pub fn tail_bound(&self, m: usize) -> Rat {
        &self.bound * &Rat::pow2_inv(m.saturating_sub(1) as u32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: u64, d: u64) -> Rat {
        Rat::new(n, d)
    }

    fn set(v: &[(u64, u64)]) -> BTreeSet<Rat> {
        v.iter().map(|&(n, d)| r(n, d)).collect()
    }

    #[test]
    fn finite_sum_examples() {
        assert_eq!(finite_sums(&[r(1, 2)]), set(&[(1, 2)]));
        assert_eq!(finite_sums(&[r(1, 2), r(1, 4)]), set(&[(1, 4), (1, 2), (3, 4)]));
    }

    /// Independent expansion over all 7 index subsets.
    #[test]
    fn finite_sums_three_terms_by_subsets() {
        let xs = [r(1, 4), r(1, 16), r(1, 64)];
        let mut expected = BTreeSet::new();
        for mask in 1u32..8 {
            let mut s = Rat::zero();
            for (i, x) in xs.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    s = &s + x;
                }
            }
            expected.insert(s);
        }
        assert_eq!(
            expected,
            set(&[(1, 64), (4, 64), (5, 64), (16, 64), (17, 64), (20, 64), (21, 64)])
        );
        assert_eq!(finite_sums(&xs), expected);
    }

    #[test]
    fn duplicates_collapse() {
        assert_eq!(finite_sums(&[r(1, 4), r(1, 4)]), set(&[(1, 4), (1, 2)]));
    }

    #[test]
    fn seed_validation() {
        assert!(FSSeed::new(vec![r(1, 4), r(1, 16)], r(1, 2)).is_ok());
        assert!(matches!(
            FSSeed::new(vec![r(1, 4), r(1, 4)], Rat::one()),
            Err(Error::InvalidSeed(_))
        ));
        assert!(matches!(
            FSSeed::new(vec![r(3, 4)], Rat::one()),
            Err(Error::InvalidSeed(_))
        ));
        assert!(FSSeed::new(vec![], Rat::one()).is_err());
        assert!(FSSeed::new(vec![r(1, 8), r(1, 16), r(3, 16)], Rat::one()).is_err());
        let s = FSSeed::tight(vec![r(1, 4), r(1, 16)]).unwrap();
        assert_eq!(s.bound(), &r(1, 2));
        assert_eq!(s.tail_bound(2), r(1, 4));
    }

    #[test]
    fn subset_sums_by_mask() {
        assert_eq!(subset_sums(&[1, 4]), vec![0, 1, 4, 5]);
    }

    proptest! {
        #[test]
        fn recursion_holds(ks in proptest::collection::vec(1u64..64, 1..10), y in 1u64..64) {
            let xs: Vec<Rat> = ks.iter().map(|&k| r(k, 64)).collect();
            let y = r(y, 64);
            let mut extended = xs.clone();
            extended.push(y.clone());
            let base = finite_sums(&xs);
            let mut expected = base.clone();
            expected.insert(y.clone());
            expected.extend(base.iter().map(|s| s + &y));
            prop_assert_eq!(finite_sums(&extended), expected);
        }
    }
}
