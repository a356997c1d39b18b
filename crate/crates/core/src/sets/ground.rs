use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::semigroup::WindowGrid;

use super::fs::MAX_SEED_LEN;
use super::spec::SetSpec;

/// A subset of a window grid. Bit `k` is the element `k/N`; bit `0` is
/// always clear.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroundSet {
    grid: WindowGrid,
    bits: Bits,
}

impl GroundSet {
    pub fn empty(grid: &WindowGrid) -> GroundSet {
        GroundSet {
            grid: grid.clone(),
            bits: Bits::new(grid.size() + 1),
        }
    }

    pub fn full(grid: &WindowGrid) -> GroundSet {
        GroundSet {
            grid: grid.clone(),
            bits: Bits::range(grid.size() + 1, 1, grid.size() + 1),
        }
    }

    /// Builds from a bit vector of length `grid.size() + 1`; bit 0 is cleared.
    pub fn from_bits(grid: &WindowGrid, mut bits: Bits) -> GroundSet {
        assert_eq!(bits.len(), grid.size() + 1, "bit length mismatch");
        bits.set(0, false);
        GroundSet {
            grid: grid.clone(),
            bits,
        }
    }

    pub fn from_indices(grid: &WindowGrid, ks: impl IntoIterator<Item = usize>) -> GroundSet {
        let bits = Bits::from_indices(
            grid.size() + 1,
            ks.into_iter().filter(|&k| k >= 1 && k <= grid.size()),
        );
        GroundSet {
            grid: grid.clone(),
            bits,
        }
    }

    pub fn grid(&self) -> &WindowGrid {
        &self.grid
    }

    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    pub fn contains_index(&self, k: usize) -> bool {
        self.bits.get(k)
    }

    pub fn contains(&self, r: &Rat) -> bool {
        self.grid
            .index_of(r)
            .map(|k| self.bits.get(k))
            .unwrap_or(false)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn elements(&self) -> Vec<Rat> {
        self.indices().map(|k| self.grid.element(k)).collect()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.any()
    }

    pub fn is_subset(&self, other: &GroundSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn union(&self, other: &GroundSet) -> GroundSet {
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        GroundSet::from_bits(&self.grid, bits)
    }

    pub fn intersect(&self, other: &GroundSet) -> GroundSet {
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        GroundSet::from_bits(&self.grid, bits)
    }

    /// `-t + A = {s : s + t in A}` for a grid numerator `t`.
    pub fn translate_down(&self, t: usize) -> GroundSet {
        GroundSet::from_bits(&self.grid, self.bits.shift_down(t))
    }

    /// Elements strictly below `delta`.
    pub fn below(&self, delta: &Rat) -> GroundSet {
        let keep = Bits::range(self.bits.len(), 1, self.grid.count_below(delta) + 1);
        let mut bits = self.bits.clone();
        bits.intersect_with(&keep);
        GroundSet::from_bits(&self.grid, bits)
    }

    /// Whether the set meets `(0, delta)`.
    pub fn meets_below(&self, delta: &Rat) -> bool {
        let n = self.grid.count_below(delta);
        self.indices().next().is_some_and(|k| k <= n)
    }
}

/// Evaluates `spec` on `grid`.
pub fn materialize(spec: &SetSpec, grid: &WindowGrid) -> Result<GroundSet> {
    let len = grid.size() + 1;
    let lattice = |r: &Rat| -> Result<usize> {
        grid.lattice_numerator(r)
            .map(|k| k.min(len as u64) as usize)
            .ok_or_else(|| Error::UnrepresentableConstant {
                value: r.clone(),
                modulus: grid.modulus(),
            })
    };
    let bits = match spec {
        SetSpec::Explicit(rs) => {
            let mut b = Bits::new(len);
            for r in rs {
                let k = lattice(r)?;
                if k >= 1 && k < len {
                    b.set(k, true);
                }
            }
            b
        }
        SetSpec::FiniteSums(xs) => {
            if xs.len() > MAX_SEED_LEN {
                return Err(Error::GuardExceeded(format!("fs of {} terms", xs.len())));
            }
            let mut sums = Bits::new(len);
            for x in xs {
                let k = lattice(x)?;
                if k == 0 {
                    return Err(Error::InvalidSeed("fs term must be positive".into()));
                }
                let mut next = sums.shift_up(k);
                next.union_with(&sums);
                if k < len {
                    next.set(k, true);
                }
                sums = next;
            }
            sums
        }
        SetSpec::Shift(a, x) => {
            let k = lattice(a)?;
            materialize(x, grid)?.bits.shift_up(k)
        }
        SetSpec::Union(a, b) => materialize(a, grid)?.union(&materialize(b, grid)?).bits,
        SetSpec::Intersect(a, b) => materialize(a, grid)?.intersect(&materialize(b, grid)?).bits,
        SetSpec::Window(x, delta) => materialize(x, grid)?.below(delta).bits,
        SetSpec::Pattern { period, residues } => {
            if *period == 0 {
                return Err(Error::Config("pattern period must be positive".into()));
            }
            let mut b = Bits::new(len);
            for k in 1..len {
                if residues.contains(&(k as u64 % period)) {
                    b.set(k, true);
                }
            }
            b
        }
        SetSpec::Complement(x) => {
            let mut b = Bits::range(len, 1, len);
            b.difference_with(materialize(x, grid)?.bits());
            b
        }
    };
    Ok(GroundSet::from_bits(grid, bits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::fs::finite_sums;
    use proptest::prelude::*;

    fn r(n: u64, d: u64) -> Rat {
        Rat::new(n, d)
    }

    #[test]
    fn materialize_examples() {
        let g = WindowGrid::dyadic(16).unwrap();
        let a = materialize(&SetSpec::Explicit(vec![r(1, 16)]), &g).unwrap();
        assert_eq!(a.indices().collect::<Vec<_>>(), vec![1]);

        let odd = materialize(&SetSpec::Pattern { period: 2, residues: vec![1] }, &g).unwrap();
        assert_eq!(odd.indices().collect::<Vec<_>>(), vec![1, 3, 5, 7, 9, 11, 13, 15]);

        let sh = SetSpec::shift(r(1, 16), SetSpec::Explicit(vec![r(1, 16), r(2, 16)]));
        assert_eq!(materialize(&sh, &g).unwrap().elements(), vec![r(2, 16), r(3, 16)]);
    }

    #[test]
    fn unrepresentable_constants() {
        let g = WindowGrid::dyadic(16).unwrap();
        assert!(matches!(
            materialize(&SetSpec::Explicit(vec![r(1, 3)]), &g),
            Err(Error::UnrepresentableConstant { .. })
        ));
        assert!(matches!(
            materialize(&SetSpec::shift(r(1, 32), SetSpec::everything()), &g),
            Err(Error::UnrepresentableConstant { .. })
        ));
        // Window radii are comparisons, not constants.
        assert!(materialize(&SetSpec::window(SetSpec::everything(), r(1, 3)), &g).is_ok());
        // Constants beyond the grid are representable, just absent.
        assert!(materialize(&SetSpec::Explicit(vec![r(2, 1)]), &g).unwrap().is_empty());
    }

    #[test]
    fn fs_matches_rational_enumeration() {
        let g = WindowGrid::dyadic(64).unwrap();
        let xs = vec![r(1, 4), r(1, 16), r(1, 64)];
        let a = materialize(&SetSpec::FiniteSums(xs.clone()), &g).unwrap();
        assert_eq!(a.elements(), finite_sums(&xs).into_iter().collect::<Vec<_>>());
    }

    fn arb_leaf() -> impl Strategy<Value = SetSpec> {
        prop_oneof![
            proptest::collection::vec(1u64..40, 0..6)
                .prop_map(|v| SetSpec::Explicit(v.into_iter().map(|k| r(k, 32)).collect())),
            (1u64..7, proptest::collection::vec(0u64..7, 0..4))
                .prop_map(|(period, residues)| SetSpec::Pattern { period, residues }),
            proptest::collection::vec(1u64..12, 1..4)
                .prop_map(|v| SetSpec::FiniteSums(v.into_iter().map(|k| r(k, 32)).collect())),
        ]
    }

    proptest! {
        #[test]
        fn window_is_intersection(spec in arb_leaf(), d in 1u64..40) {
            let g = WindowGrid::dyadic(32).unwrap();
            let delta = r(d, 32);
            let lhs = materialize(&SetSpec::window(spec.clone(), delta.clone()), &g).unwrap();
            let rhs: Vec<Rat> = materialize(&spec, &g).unwrap().elements().into_iter()
                .filter(|x| *x < delta)
                .collect();
            prop_assert_eq!(lhs.elements(), rhs);
        }

        #[test]
        fn set_ops_commute_with_bits(a in arb_leaf(), b in arb_leaf()) {
            let g = WindowGrid::dyadic(32).unwrap();
            let ma = materialize(&a, &g).unwrap();
            let mb = materialize(&b, &g).unwrap();
            let u = materialize(&SetSpec::union(a.clone(), b.clone()), &g).unwrap();
            let i = materialize(&SetSpec::intersect(a.clone(), b.clone()), &g).unwrap();
            for k in 1..=32 {
                prop_assert_eq!(u.contains_index(k), ma.contains_index(k) || mb.contains_index(k));
                prop_assert_eq!(i.contains_index(k), ma.contains_index(k) && mb.contains_index(k));
            }
            let c = materialize(&SetSpec::complement(a), &g).unwrap();
            prop_assert_eq!(c.len() + ma.len(), 32);
        }
    }
}
