//! Least seed length `L*` such that every `r`-coloring of `FS(<b>_1^L)`
//! for a distinct-sum seed has a monochromatic `FS(<d>_1^m)` over disjoint
//! index blocks.
//!
//! Colorings are colorings of the nonempty index masks. A bad coloring is
//! searched by backtracking over masks in ascending order: a family of
//! blocks is complete once its full union, the largest of its unions, is
//! colored. Colors are used in first-appearance order, which removes the
//! color-permutation symmetry.

use serde::Serialize;

use crate::detectors::hindman::{monochromatic_blocks, MAX_BLOCK_SEED};
use crate::detectors::hindman_block_oracle;
use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::rng::Rng;
use crate::sets::FSSeed;

/// Largest `L` searched exhaustively.
pub const EXHAUSTIVE_MAX_L: usize = 6;
pub const SEARCH_NODE_BUDGET: u64 = 50_000_000;
pub const SAMPLES_PER_LEVEL: usize = 2_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegressionLevel {
    pub l: usize,
    pub exhaustive: bool,
    /// Colors of masks `1..2^L`, when a bad coloring was found.
    pub bad_coloring: Option<Vec<u32>>,
    pub nodes: u64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RegressionOutcome {
    Found { l_star: usize },
    NotFound { l_max: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionRegression {
    pub r: usize,
    pub m: usize,
    pub l_max: usize,
    pub outcome: RegressionOutcome,
    /// Every level was decided exhaustively.
    pub exhaustive: bool,
    pub levels: Vec<RegressionLevel>,
}

/// Unions (other than `c` itself) of every nonempty proper subfamily, for
/// each partition of `c` into `m` blocks.
fn families(c: u32, m: usize) -> Vec<Vec<u32>> {
    fn parts(rest: u32, m: usize, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if m == 0 {
            if rest == 0 {
                out.push(acc.clone());
            }
            return;
        }
        if rest == 0 {
            return;
        }
        let low = rest & rest.wrapping_neg();
        let others = rest ^ low;
        let mut sub = others;
        loop {
            let block = low | sub;
            acc.push(block);
            parts(rest ^ block, m - 1, acc, out);
            acc.pop();
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & others;
        }
    }
    let mut blockings = Vec::new();
    parts(c, m, &mut Vec::new(), &mut blockings);
    blockings
        .into_iter()
        .map(|blocks| {
            (1u32..(1 << m) - 1)
                .map(|sel| (0..m).filter(|b| sel >> b & 1 == 1).fold(0, |u, b| u | blocks[b]))
                .collect()
        })
        .collect()
}

enum Search {
    Bad(Vec<u32>),
    None,
    Budget,
}

struct Backtrack {
    n: usize,
    r: u32,
    /// Per mask, the unions each of its block families needs colored alike.
    fams: Vec<Vec<Vec<u32>>>,
    colors: Vec<u32>,
    nodes: u64,
    budget: u64,
}

impl Backtrack {
    /// `Some(true)` once every mask is colored, `None` past the budget.
    fn go(&mut self, c: usize, used: u32) -> Option<bool> {
        if c > self.n {
            return Some(true);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        for color in 0..(used + 1).min(self.r) {
            let colors = &self.colors;
            let closes = self.fams[c]
                .iter()
                .any(|unions| unions.iter().all(|&u| colors[u as usize] == color));
            if closes {
                continue;
            }
            self.colors[c] = color;
            match self.go(c + 1, used.max(color + 1)) {
                Some(false) => {}
                other => return other,
            }
        }
        self.colors[c] = u32::MAX;
        Some(false)
    }
}

fn search_bad(l: usize, r: usize, m: usize, budget: u64) -> (Search, u64) {
    let n = (1usize << l) - 1;
    let mut bt = Backtrack {
        n,
        r: r as u32,
        fams: (0..=n as u32).map(|c| if c == 0 { Vec::new() } else { families(c, m) }).collect(),
        colors: vec![u32::MAX; n + 1],
        nodes: 0,
        budget,
    };
    let out = match bt.go(1, 0) {
        Some(true) => Search::Bad(bt.colors[1..].to_vec()),
        Some(false) => Search::None,
        None => Search::Budget,
    };
    (out, bt.nodes)
}

fn has_family(l: usize, m: usize, colors_from_one: &[u32]) -> bool {
    let mut colors = vec![0u32; 1 << l];
    colors[1..].copy_from_slice(colors_from_one);
    monochromatic_blocks(l, m, &colors).is_some()
}

pub fn compute_partition_regression(r: usize, m: usize, l_max: usize) -> Result<PartitionRegression> {
    if r == 0 || !(1..=3).contains(&m) || l_max == 0 || l_max > MAX_BLOCK_SEED {
        return Err(Error::GuardExceeded(format!(
            "partition regression needs r >= 1, m in 1..=3, 1 <= L_max <= {MAX_BLOCK_SEED} (got r={r}, m={m}, L_max={l_max})"
        )));
    }
    let mut levels = Vec::new();
    let mut outcome = RegressionOutcome::NotFound { l_max };
    for l in 1..=l_max {
        let mut level = RegressionLevel {
            l,
            exhaustive: false,
            bad_coloring: None,
            nodes: 0,
            samples: 0,
        };
        let exhaustive_ok = r <= 2 && m <= 2 && l <= EXHAUSTIVE_MAX_L;
        let mut decided = false;
        if exhaustive_ok {
            let (res, nodes) = search_bad(l, r, m, SEARCH_NODE_BUDGET);
            level.nodes = nodes;
            match res {
                Search::Bad(c) => {
                    level.bad_coloring = Some(c);
                    level.exhaustive = true;
                    decided = true;
                }
                Search::None => {
                    level.exhaustive = true;
                    decided = true;
                }
                Search::Budget => {}
            }
        }
        if !decided {
            let mut rng = Rng::new(((r as u64) << 32) ^ ((m as u64) << 16) ^ l as u64);
            let n = (1usize << l) - 1;
            for _ in 0..SAMPLES_PER_LEVEL {
                level.samples += 1;
                let c: Vec<u32> = (0..n).map(|_| rng.below(r as u64) as u32).collect();
                if !has_family(l, m, &c) {
                    level.bad_coloring = Some(c);
                    break;
                }
            }
        }
        let good = level.bad_coloring.is_none();
        levels.push(level);
        if good {
            outcome = RegressionOutcome::Found { l_star: l };
            break;
        }
    }
    Ok(PartitionRegression {
        r,
        m,
        l_max,
        exhaustive: levels.iter().all(|lv| lv.exhaustive),
        outcome,
        levels,
    })
}

/// `1/4, 1/16, ...`: a seed with distinct subset sums.
pub fn generic_seed(l: usize) -> Result<FSSeed> {
    FSSeed::tight((1..=l).map(|i| Rat::pow2_inv(2 * i as u32)).collect())
}

/// Every recorded bad coloring must defeat the block oracle on a generic
/// seed, and when `L*` has at most 15 masks every coloring at `L*` must
/// admit a family.
pub fn cross_check_with_oracle(reg: &PartitionRegression) -> std::result::Result<(), String> {
    for lv in &reg.levels {
        if let Some(c) = &lv.bad_coloring {
            let seed = generic_seed(lv.l).map_err(|e| e.to_string())?;
            let by_sum: std::collections::BTreeMap<Rat, u32> = (1..=c.len() as u32)
                .map(|mask| {
                    let s = (0..lv.l)
                        .filter(|i| mask >> i & 1 == 1)
                        .fold(Rat::zero(), |acc, i| acc + seed.terms()[i].clone());
                    (s, c[mask as usize - 1])
                })
                .collect();
            let hit = hindman_block_oracle(&seed, lv.l, |x| by_sum[x], reg.m).map_err(|e| e.to_string())?;
            if let Some(w) = hit {
                return Err(format!("L={} bad coloring has a family {:?}", lv.l, w.blocks));
            }
        }
    }
    if let RegressionOutcome::Found { l_star } = reg.outcome {
        let n = (1usize << l_star) - 1;
        if reg.exhaustive && n <= 15 && reg.r <= 2 {
            let total = (reg.r as u64).pow(n as u32);
            for code in 0..total {
                let c: Vec<u32> = (0..n).map(|i| ((code >> i) & 1) as u32).collect();
                if !has_family(l_star, reg.m, &c) {
                    return Err(format!("coloring {code:#x} at L*={l_star} has no family"));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_of_a_mask() {
        assert_eq!(families(0b111, 2).len(), 3);
        assert_eq!(families(0b1111, 2).len(), 7);
        assert_eq!(families(0b1111, 3).len(), 6);
        assert_eq!(families(0b11, 1), vec![Vec::<u32>::new()]);
    }

    #[test]
    fn single_blocks_are_immediate() {
        let reg = compute_partition_regression(2, 1, 5).unwrap();
        assert_eq!(reg.outcome, RegressionOutcome::Found { l_star: 1 });
    }

    /// Brute force over every coloring agrees with the backtracking search.
    #[test]
    fn backtracking_matches_brute_force() {
        for l in 1..=3 {
            let n = (1usize << l) - 1;
            let brute_bad = (0..1u64 << n).any(|code| {
                let c: Vec<u32> = (0..n).map(|i| ((code >> i) & 1) as u32).collect();
                !has_family(l, 2, &c)
            });
            let (res, _) = search_bad(l, 2, 2, SEARCH_NODE_BUDGET);
            assert_eq!(brute_bad, matches!(res, Search::Bad(_)), "L={l}");
        }
    }

    #[test]
    fn guard() {
        assert!(matches!(compute_partition_regression(2, 4, 3), Err(Error::GuardExceeded(_))));
        assert!(matches!(compute_partition_regression(2, 2, 21), Err(Error::GuardExceeded(_))));
    }
}
