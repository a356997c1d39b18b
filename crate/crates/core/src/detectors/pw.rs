use crate::bits::Bits;
use crate::error::Result;
use crate::rat::Rat;
use crate::sets::GroundSet;

use super::certificate::*;
use super::combos::for_each_combination;
use super::ladder::Ladder;
use super::syndetic::{Covers, Search};

/// Node budget for the general (per-probe) search.
pub const PW_NODE_BUDGET: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PwParams {
    /// Level `n` draws translates from `(0, delta_n)` and tests probes on
    /// `(0, delta_{n+1})` (half the last radius at the bottom).
    pub ladder: Ladder,
    pub f_cap: usize,
    /// Largest probe `G` enumerated.
    pub probe_budget: usize,
}

struct Level {
    width: usize,
    inner: usize,
    radius: Rat,
    inner_radius: Rat,
}

fn levels(a: &GroundSet, ladder: &Ladder) -> Vec<Level> {
    let grid = a.grid();
    ladder
        .rungs()
        .iter()
        .enumerate()
        .map(|(n, r)| {
            let inner_radius = ladder.reach_floor(n);
            Level {
                width: grid.count_below(&r.delta),
                inner: grid.count_below(&inner_radius),
                radius: r.delta.clone(),
                inner_radius,
            }
        })
        .collect()
}

/// Points `g <= inner` with `g + x` outside `A - F`.
fn bad_points(a: &GroundSet, x: usize, translates: &[usize], inner: usize) -> Bits {
    let len = a.bits().len();
    let mut good = Bits::new(len);
    for &t in translates {
        good.union_with(&a.bits().shift_down(x + t));
    }
    let mut bad = Bits::range(len, 1, inner + 1);
    bad.difference_with(&good);
    bad
}

/// Searches translates `F_n ⊂ (0, delta_n)` with `|F_n| <= f_cap` and, for
/// every probe `G` of at most `probe_budget` grid points, a shift
/// `x < delta_K` with `(G ∩ (0, delta_{n+1})) + x ⊆ A - F_n` at every level.
///
/// A single shift covering every inner window is tried first; it decides the
/// question outright once probes may fill the whole window.
pub fn check_pw_syndetic(a: &GroundSet, params: &PwParams) -> Result<Verdict<PWSyndeticCertificate>> {
    params.ladder.check_grid(a.grid())?;
    let grid = a.grid();
    let f_cap = params.f_cap.max(1);
    let lv = levels(a, &params.ladder);
    let probe_radius = params.ladder.smallest().clone();
    let shifts = grid.count_below(&probe_radius);
    let universe = lv[0].inner;
    let mut nodes = 0u64;
    let mut budget_hit = false;
    let el = |ks: &[usize]| -> Vec<Rat> { ks.iter().map(|&k| grid.element(k)).collect() };

    let mut first_failure: Option<(usize, Obligation)> = None;
    'shift: for x in 1..=shifts {
        let mut chosen = Vec::with_capacity(lv.len());
        for (n, l) in lv.iter().enumerate() {
            let mut covers = Covers::new(a, x, l.width);
            let found = covers.minimal(l.inner, f_cap);
            nodes += covers.nodes();
            match found {
                Search::Found(ts) => chosen.push(ts),
                Search::Budget => {
                    budget_hit = true;
                    continue 'shift;
                }
                Search::Exhausted => {
                    first_failure.get_or_insert_with(|| {
                        let ts: Vec<usize> = (1..=l.width.min(f_cap)).collect();
                        (
                            n + 1,
                            Obligation::PointCover {
                                points: el(&(1..=l.inner).collect::<Vec<_>>()),
                                shift: grid.element(x),
                                translates: el(&ts),
                            },
                        )
                    });
                    continue 'shift;
                }
            }
        }
        return Ok(Verdict::Certificate(PWSyndeticCertificate {
            levels: lv
                .iter()
                .zip(&chosen)
                .map(|(l, ts)| PwLevel {
                    radius: l.radius.clone(),
                    translates: el(ts),
                    inner: l.inner_radius.clone(),
                })
                .collect(),
            probe_radius,
            probe_budget: params.probe_budget,
            probes: PwProbes::Uniform { shift: grid.element(x) },
        }));
    }

    let caps = |nodes: u64| {
        Caps::from([
            ("f_cap".to_string(), f_cap as u64),
            ("node_budget".to_string(), PW_NODE_BUDGET),
            ("nodes".to_string(), nodes),
            ("probe_budget".to_string(), params.probe_budget as u64),
        ])
    };
    if params.probe_budget >= universe && !budget_hit {
        let (rung, obligation) = first_failure.expect("every shift failed at some level");
        return Ok(Verdict::Refutation(Refutation {
            rung,
            caps: caps(nodes),
            obligation,
        }));
    }

    let mut g = General {
        a,
        lv: &lv,
        shifts,
        budget: params.probe_budget.min(universe),
        nodes,
        chosen: Vec::new(),
    };
    match g.levels(f_cap) {
        Search::Found((translates, entries)) => Ok(Verdict::Certificate(PWSyndeticCertificate {
            levels: lv
                .iter()
                .zip(&translates)
                .map(|(l, ts)| PwLevel {
                    radius: l.radius.clone(),
                    translates: el(ts),
                    inner: l.inner_radius.clone(),
                })
                .collect(),
            probe_radius,
            probe_budget: params.probe_budget,
            probes: PwProbes::PerProbe {
                entries: entries
                    .into_iter()
                    .map(|(probe, x)| PwProbe {
                        probe: el(&probe),
                        shift: grid.element(x),
                    })
                    .collect(),
            },
        })),
        Search::Budget => Ok(Verdict::Inconclusive(Inconclusive {
            rung: g.chosen.len().max(1),
            caps: caps(g.nodes),
            reason: "probe search node budget exhausted".into(),
        })),
        Search::Exhausted => {
            let (rung, obligation) = first_failure.expect("every shift failed at some level");
            Ok(Verdict::Refutation(Refutation {
                rung,
                caps: caps(g.nodes),
                obligation,
            }))
        }
    }
}

/// Exact search for probe budgets smaller than the window: choose maximal
/// translate sets level by level, then look for a probe that every shift
/// misses (a hitting set of the bad-point family).
struct General<'a> {
    a: &'a GroundSet,
    lv: &'a [Level],
    shifts: usize,
    budget: usize,
    nodes: u64,
    chosen: Vec<Vec<usize>>,
}

type Entries = Vec<(Vec<usize>, usize)>;

impl General<'_> {
    fn bad_family(&self) -> Vec<Bits> {
        (1..=self.shifts)
            .map(|x| {
                let mut bad = Bits::new(self.a.bits().len());
                for (l, ts) in self.lv.iter().zip(&self.chosen) {
                    bad.union_with(&bad_points(self.a, x, ts, l.inner));
                }
                bad
            })
            .collect()
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        self.nodes <= PW_NODE_BUDGET
    }

    /// Whether some probe of at most `left` points meets every family member.
    fn hitting(&mut self, family: &[Bits], hit: &mut Vec<usize>, left: usize) -> Search<()> {
        let open = family.iter().find(|b| hit.iter().all(|&g| !b.get(g)));
        let Some(open) = open else { return Search::Found(()) };
        if left == 0 {
            return Search::Exhausted;
        }
        for g in open.ones().collect::<Vec<_>>() {
            if !self.tick() {
                return Search::Budget;
            }
            hit.push(g);
            let r = self.hitting(family, hit, left - 1);
            hit.pop();
            match r {
                Search::Exhausted => {}
                other => return other,
            }
        }
        Search::Exhausted
    }

    fn levels(&mut self, f_cap: usize) -> Search<(Vec<Vec<usize>>, Entries)> {
        let family = self.bad_family();
        if !self.chosen.is_empty() || self.lv.is_empty() {
            match self.hitting(&family, &mut Vec::new(), self.budget) {
                Search::Found(()) => return Search::Exhausted,
                Search::Budget => return Search::Budget,
                Search::Exhausted => {}
            }
        }
        let n = self.chosen.len();
        if n == self.lv.len() {
            return Search::Found((self.chosen.clone(), self.entries(&family)));
        }
        let width = self.lv[n].width;
        let size = f_cap.min(width);
        let mut result = Search::Exhausted;
        let mut out_of_budget = false;
        for_each_combination(width, size, |idx| {
            if !self.tick() {
                out_of_budget = true;
                return false;
            }
            self.chosen.push(idx.iter().map(|i| i + 1).collect());
            let r = self.levels(f_cap);
            self.chosen.pop();
            match r {
                Search::Exhausted => true,
                other => {
                    result = other;
                    false
                }
            }
        });
        if out_of_budget {
            return Search::Budget;
        }
        result
    }

    /// Smallest good shift for every maximal probe.
    fn entries(&self, family: &[Bits]) -> Entries {
        let universe = self.lv.first().map_or(0, |l| l.inner);
        let mut out = Vec::new();
        for_each_combination(universe, self.budget.min(universe), |idx| {
            let probe: Vec<usize> = idx.iter().map(|i| i + 1).collect();
            let x = family
                .iter()
                .position(|b| probe.iter().all(|&g| !b.get(g)))
                .expect("no hitting set exists");
            out.push((probe, x + 1));
            true
        });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detectors::replay;
    use crate::semigroup::WindowGrid;

    fn r(n: u64, d: u64) -> Rat {
        Rat::new(n, d)
    }

    fn params(depth: usize, probe_budget: usize) -> PwParams {
        PwParams {
            ladder: Ladder::halving(&Rat::one(), depth, |_| 2).unwrap(),
            f_cap: 2,
            probe_budget,
        }
    }

    #[test]
    fn full_grid_uses_smallest_shift() {
        let g = WindowGrid::dyadic(16).unwrap();
        let full = GroundSet::full(&g);
        let c = check_pw_syndetic(&full, &params(2, 8)).unwrap();
        let c = c.certificate().unwrap();
        assert_eq!(c.probes, PwProbes::Uniform { shift: r(1, 16) });
        assert!(replay::replay_pw(c, &full).is_ok());
    }

    #[test]
    fn far_point_refutes() {
        let g = WindowGrid::dyadic(16).unwrap();
        let far = GroundSet::from_indices(&g, [16]);
        let Verdict::Refutation(rf) = check_pw_syndetic(&far, &params(2, 8)).unwrap() else {
            panic!("expected refutation")
        };
        assert!(replay::replay_refutation(&rf, &far).is_ok());
    }

    #[test]
    fn small_probe_budget_lists_probes() {
        let g = WindowGrid::dyadic(16).unwrap();
        // Even numerators plus 3/16: no shift below 1/4 covers all of (0, 1/4)
        // with translates drawn from (0, 1/4) when only one is allowed.
        let a = GroundSet::from_indices(&g, (1..=16).filter(|k| k % 4 == 0 || *k == 3));
        let p = PwParams { f_cap: 1, ..params(1, 1) };
        let v = check_pw_syndetic(&a, &p).unwrap();
        match &v {
            Verdict::Certificate(c) => assert!(replay::replay_pw(c, &a).is_ok()),
            Verdict::Refutation(rf) => assert!(replay::replay_refutation(rf, &a).is_ok()),
            Verdict::Inconclusive(_) => panic!("budget hit"),
        }
    }
}
