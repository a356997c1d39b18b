use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::sets::{subset_sums, FSSeed, GroundSet};

use super::certificate::*;

/// Node budget for the seed backtracking.
pub const IP_NODE_BUDGET: u64 = 5_000_000;

/// Whether `FS(<x>_1^L) ⊆ A`, computed on grid numerators.
pub fn check_ip_witness(a: &GroundSet, w: &IPWitness) -> std::result::Result<(), String> {
    let terms = w.seed.terms();
    if w.length == 0 || w.length > terms.len() {
        return Err(format!("length {} outside seed of {} terms", w.length, terms.len()));
    }
    let n = a.grid().modulus();
    let mut ks = Vec::with_capacity(w.length);
    for x in &terms[..w.length] {
        ks.push(x.numerator_over(n).ok_or_else(|| format!("{x} is not on the 1/{n} lattice"))? as usize);
    }
    for (mask, s) in subset_sums(&ks).into_iter().enumerate().skip(1) {
        if s > a.grid().size() || !a.contains_index(s) {
            let missing = Rat::new(s as u64, n);
            return Err(format!("{missing} (subset {mask:#b}) is not in the set"));
        }
    }
    Ok(())
}

/// Prefix sums state for extending a seed one term at a time.
#[derive(Clone)]
pub(crate) struct SumState {
    pub sums: Bits,
    pub max: usize,
}

impl SumState {
    pub fn new(len: usize) -> SumState {
        SumState {
            sums: Bits::new(len),
            max: 0,
        }
    }

    /// Sums of the seed extended by `k`, or `None` when a new sum leaves the
    /// grid or collides with an old one.
    pub fn extend(&self, k: usize) -> Option<(SumState, Bits)> {
        let len = self.sums.len();
        if self.max + k >= len {
            return None;
        }
        let mut fresh = self.sums.shift_up(k);
        fresh.set(k, true);
        if !fresh.is_disjoint(&self.sums) {
            return None;
        }
        let mut sums = self.sums.clone();
        sums.union_with(&fresh);
        Some((
            SumState {
                sums,
                max: self.max + k,
            },
            fresh,
        ))
    }
}

fn seed_from(ks: &[usize], a: &GroundSet, bound: &Rat) -> FSSeed {
    let xs = ks.iter().map(|&k| a.grid().element(k)).collect();
    FSSeed::new(xs, bound.clone()).expect("search maintains seed invariants")
}

/// Lexicographically least `x_1, ..., x_L` with `x_n` in `A ∩ (0, r_n)`,
/// distinct subset sums and `FS(<x>_1^L) ⊆ A`.
pub fn search_ip_seed(a: &GroundSet, length: usize, profile: &[Rat]) -> Result<Verdict<IPWitness>> {
    if length == 0 || profile.len() != length {
        return Err(Error::InvalidLadder(format!(
            "profile of {} radii for length {length}",
            profile.len()
        )));
    }
    if profile.iter().any(Rat::is_zero) {
        return Err(Error::InvalidLadder("zero radius in profile".into()));
    }
    let grid = a.grid();
    let bound = profile
        .iter()
        .enumerate()
        .map(|(i, r)| r * &Rat::integer(1u64 << (i + 1)))
        .max()
        .expect("nonempty");
    let windows: Vec<usize> = profile.iter().map(|r| grid.count_below(r)).collect();

    let mut s = Search {
        a,
        windows: &windows,
        length,
        nodes: 0,
        deepest: 0,
        deepest_prefix: Vec::new(),
        prefix: Vec::new(),
    };
    let found = s.dfs(&SumState::new(grid.size() + 1));
    let caps = Caps::from([
        ("length".to_string(), length as u64),
        ("nodes".to_string(), s.nodes),
        ("node_budget".to_string(), IP_NODE_BUDGET),
    ]);
    Ok(match found {
        Some(Some(ks)) => Verdict::Certificate(IPWitness {
            seed: seed_from(&ks, a, &bound),
            length,
        }),
        None => Verdict::Inconclusive(Inconclusive {
            rung: s.deepest + 1,
            caps,
            reason: "node budget exhausted".into(),
        }),
        Some(None) => {
            let level = s.deepest;
            let radius = profile[level].clone();
            let obligation = if level == 0 || windows[level] == 0 {
                Obligation::Shifter {
                    delta: radius,
                    block: Vec::new(),
                    shifter_in_set: true,
                }
            } else {
                let mut terms: Vec<Rat> = s.deepest_prefix.iter().map(|&k| grid.element(k)).collect();
                terms.push(grid.element(1));
                if crate::sets::finite_sums(&terms).len() + 1 == 1 << terms.len() {
                    Obligation::Contains {
                        elements: crate::sets::finite_sums(&terms).into_iter().collect(),
                    }
                } else {
                    Obligation::Distinct { terms }
                }
            };
            Verdict::Refutation(Refutation {
                rung: level + 1,
                caps,
                obligation,
            })
        }
    })
}

struct Search<'a> {
    a: &'a GroundSet,
    windows: &'a [usize],
    length: usize,
    nodes: u64,
    deepest: usize,
    deepest_prefix: Vec<usize>,
    prefix: Vec<usize>,
}

impl Search<'_> {
    /// `None` when the budget runs out, `Some(None)` on exhaustion.
    fn dfs(&mut self, st: &SumState) -> Option<Option<Vec<usize>>> {
        let level = self.prefix.len();
        if level > self.deepest {
            self.deepest = level;
            self.deepest_prefix = self.prefix.clone();
        }
        if level == self.length {
            return Some(Some(self.prefix.clone()));
        }
        for k in 1..=self.windows[level] {
            self.nodes += 1;
            if self.nodes > IP_NODE_BUDGET {
                return None;
            }
            if !self.a.contains_index(k) {
                continue;
            }
            let Some((next, fresh)) = st.extend(k) else { continue };
            if !fresh.is_subset(self.a.bits()) {
                continue;
            }
            self.prefix.push(k);
            let r = self.dfs(&next)?;
            self.prefix.pop();
            if r.is_some() {
                return Some(r);
            }
        }
        Some(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detectors::replay;
    use crate::semigroup::WindowGrid;
    use crate::sets::{materialize, SetSpec};

    fn r(n: u64, d: u64) -> Rat {
        Rat::new(n, d)
    }

    #[test]
    fn witness_checks() {
        let g = WindowGrid::dyadic(64).unwrap();
        let seed = FSSeed::tight(vec![r(1, 4), r(1, 16)]).unwrap();
        let w = IPWitness { seed: seed.clone(), length: 2 };
        let fs = materialize(&SetSpec::FiniteSums(seed.terms().to_vec()), &g).unwrap();
        assert!(check_ip_witness(&fs, &w).is_ok());
        let single = materialize(&SetSpec::Explicit(vec![r(1, 4)]), &g).unwrap();
        let err = check_ip_witness(&single, &w).unwrap_err();
        assert!(err.contains("1/16"), "{err}");
        assert!(check_ip_witness(&GroundSet::full(&g), &w).is_ok());
    }

    /// Frozen from exhaustive enumeration of all pairs below the radii.
    #[test]
    fn lexicographic_least_seed() {
        let g = WindowGrid::dyadic(64).unwrap();
        let a = materialize(&SetSpec::FiniteSums(vec![r(1, 4), r(1, 16)]), &g).unwrap();
        let v = search_ip_seed(&a, 2, &[r(1, 2), r(1, 4)]).unwrap();
        let w = v.certificate().unwrap();
        assert_eq!(w.seed.terms(), &[r(1, 4), r(1, 16)]);
        assert!(replay::replay_ip(w, &a).is_ok());
    }

    #[test]
    fn odd_numerators_refute_at_level_two() {
        let g = WindowGrid::dyadic(16).unwrap();
        let odd = materialize(&SetSpec::Pattern { period: 2, residues: vec![1] }, &g).unwrap();
        let Verdict::Refutation(rf) = search_ip_seed(&odd, 2, &[r(1, 2), r(1, 4)]).unwrap() else {
            panic!("expected refutation")
        };
        assert_eq!(rf.rung, 2);
        assert!(replay::replay_refutation(&rf, &odd).is_ok());
    }

    #[test]
    fn empty_set_refutes_at_level_one() {
        let g = WindowGrid::dyadic(16).unwrap();
        let Verdict::Refutation(rf) = search_ip_seed(&GroundSet::empty(&g), 1, &[r(1, 2)]).unwrap() else {
            panic!("expected refutation")
        };
        assert_eq!(rf.rung, 1);
        assert!(replay::replay_refutation(&rf, &GroundSet::empty(&g)).is_ok());
    }
}
