use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::sets::{finite_sums, FSSeed, GroundSet};

use super::certificate::*;
use super::ip::SumState;
use super::ladder::Ladder;

/// Node budget for the seed backtracking.
pub const BROKEN_IP_NODE_BUDGET: u64 = 5_000_000;

/// Seeds are bounded by `b_n <= delta_max * 2^-n`.
fn term_caps(a: &GroundSet, len: usize) -> Result<Vec<usize>> {
    let grid = a.grid();
    (1..=len)
        .map(|n| {
            let cap = grid.count_upto(&(grid.delta_max() * &Rat::pow2_inv(n as u32)));
            if cap == 0 {
                Err(Error::InvalidLadder(format!(
                    "block length {len} exceeds the resolution of the 1/{} grid",
                    grid.modulus()
                )))
            } else {
                Ok(cap)
            }
        })
        .collect()
}

struct SeedSearch<'a> {
    a: &'a GroundSet,
    lengths: Vec<usize>,
    caps: Vec<usize>,
    down: Vec<Option<Bits>>,
    nodes: u64,
    prefix: Vec<usize>,
}

enum Outcome {
    Found(Vec<usize>, Vec<usize>),
    Exhausted,
    Budget,
}

impl SeedSearch<'_> {
    fn down(&mut self, sigma: usize) -> &Bits {
        if self.down[sigma].is_none() {
            self.down[sigma] = Some(self.a.bits().shift_down(sigma));
        }
        self.down[sigma].as_ref().expect("filled")
    }

    fn run(&mut self, radii: &[usize]) -> Outcome {
        let len = self.a.bits().len();
        let shifters: Vec<Bits> = radii.iter().map(|&w| Bits::range(len, 1, w + 1)).collect();
        if shifters.iter().any(|s| !s.any()) {
            return Outcome::Exhausted;
        }
        self.dfs(&SumState::new(len), shifters)
    }

    fn dfs(&mut self, st: &SumState, shifters: Vec<Bits>) -> Outcome {
        let level = self.prefix.len();
        let total = self.lengths.iter().copied().max().unwrap_or(0);
        if level == total {
            let picks = shifters.iter().map(|s| s.first_one().expect("nonempty")).collect();
            return Outcome::Found(self.prefix.clone(), picks);
        }
        for k in 1..=self.caps[level] {
            self.nodes += 1;
            if self.nodes > BROKEN_IP_NODE_BUDGET {
                return Outcome::Budget;
            }
            let Some((next, fresh)) = st.extend(k) else { continue };
            let mut mask = Bits::range(fresh.len(), 0, fresh.len());
            for sigma in fresh.ones().collect::<Vec<_>>() {
                mask.intersect_with(self.down(sigma));
            }
            let mut narrowed = shifters.clone();
            let mut alive = true;
            for (i, sh) in narrowed.iter_mut().enumerate() {
                if self.lengths[i] > level {
                    sh.intersect_with(&mask);
                    alive &= sh.any();
                }
            }
            if !alive {
                continue;
            }
            self.prefix.push(k);
            let r = self.dfs(&next, narrowed);
            self.prefix.pop();
            match r {
                Outcome::Exhausted => {}
                other => return other,
            }
        }
        Outcome::Exhausted
    }
}

/// Lexicographically least seed `b` (with `b_n <= delta_max * 2^-n` and
/// distinct subset sums) such that every rung has a shifter
/// `a_k in (0, delta_k)` with `a_k + FS(<b>_1^{L_k}) ⊆ A`; shifters are the
/// smallest available. Block lengths are `min(L_k, seed_cap)`.
pub fn check_broken_ip(a: &GroundSet, ladder: &Ladder, seed_cap: usize) -> Result<Verdict<BrokenIPCertificate>> {
    ladder.check_grid(a.grid())?;
    let grid = a.grid();
    let lengths: Vec<usize> = ladder.rungs().iter().map(|r| r.cap.min(seed_cap.max(1))).collect();
    let total = lengths.iter().copied().max().expect("nonempty ladder");
    let caps = term_caps(a, total)?;
    let radii: Vec<usize> = ladder.rungs().iter().map(|r| grid.count_below(&r.delta)).collect();
    let mut search = SeedSearch {
        a,
        lengths: lengths.clone(),
        caps: caps.clone(),
        down: vec![None; a.bits().len() + 1],
        nodes: 0,
        prefix: Vec::new(),
    };
    let outcome = search.run(&radii);
    let report_caps = |nodes: u64| {
        Caps::from([
            ("seed_cap".to_string(), seed_cap as u64),
            ("nodes".to_string(), nodes),
            ("node_budget".to_string(), BROKEN_IP_NODE_BUDGET),
        ])
    };
    let bound = grid.delta_max().clone();
    match outcome {
        Outcome::Found(seed, shifters) => {
            let xs: Vec<Rat> = seed.iter().map(|&k| grid.element(k)).collect();
            Ok(Verdict::Certificate(BrokenIPCertificate {
                seed: FSSeed::new(xs, bound).expect("search maintains seed invariants"),
                rungs: ladder
                    .rungs()
                    .iter()
                    .zip(&lengths)
                    .zip(shifters)
                    .map(|((r, &length), a)| BrokenIpRung {
                        delta: r.delta.clone(),
                        length,
                        shifter: grid.element(a),
                    })
                    .collect(),
            }))
        }
        Outcome::Budget => Ok(Verdict::Inconclusive(Inconclusive {
            rung: ladder.depth(),
            caps: report_caps(search.nodes),
            reason: "seed search node budget exhausted".into(),
        })),
        Outcome::Exhausted => {
            let mut nodes = search.nodes;
            let mut feasible: Vec<usize> = Vec::new();
            for j in 1..=ladder.depth() {
                let mut sub = SeedSearch {
                    a,
                    lengths: lengths[..j].to_vec(),
                    caps: caps.clone(),
                    down: vec![None; a.bits().len() + 1],
                    nodes: 0,
                    prefix: Vec::new(),
                };
                let r = sub.run(&radii[..j]);
                nodes += sub.nodes;
                match r {
                    Outcome::Found(seed, _) => feasible = seed,
                    Outcome::Budget => {
                        return Ok(Verdict::Inconclusive(Inconclusive {
                            rung: j,
                            caps: report_caps(nodes),
                            reason: "seed search node budget exhausted".into(),
                        }))
                    }
                    Outcome::Exhausted => {
                        let obligation = failing_block(a, &feasible, &caps, lengths[j - 1], &ladder.rung(j - 1).delta);
                        return Ok(Verdict::Refutation(Refutation {
                            rung: j,
                            caps: report_caps(nodes),
                            obligation,
                        }));
                    }
                }
            }
            unreachable!("the full ladder was shown infeasible")
        }
    }
}

/// Extends `prefix` to the lexicographically first seed of length `len` and
/// returns the shifted-block obligation for a rung of radius `delta`.
fn failing_block(a: &GroundSet, prefix: &[usize], caps: &[usize], len: usize, delta: &Rat) -> Obligation {
    let grid = a.grid();
    let mut st = SumState::new(a.bits().len());
    for &k in prefix {
        st = st.extend(k).expect("prefix is a valid seed").0;
    }
    let mut seed = prefix.to_vec();
    if let Some(ext) = extend_seed(&st, caps, len, &mut seed) {
        seed = ext;
    }
    let terms: Vec<Rat> = seed.iter().take(len).map(|&k| grid.element(k)).collect();
    if seed.len() < len {
        return Obligation::Distinct { terms };
    }
    Obligation::Shifter {
        delta: delta.clone(),
        block: finite_sums(&terms).into_iter().collect(),
        shifter_in_set: false,
    }
}

fn extend_seed(st: &SumState, caps: &[usize], len: usize, seed: &mut Vec<usize>) -> Option<Vec<usize>> {
    if seed.len() >= len {
        return Some(seed.clone());
    }
    for k in 1..=caps[seed.len()] {
        if let Some((next, _)) = st.extend(k) {
            seed.push(k);
            if let Some(done) = extend_seed(&next, caps, len, seed) {
                return Some(done);
            }
            seed.pop();
        }
    }
    None
}
