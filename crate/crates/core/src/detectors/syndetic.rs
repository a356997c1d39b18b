use crate::bits::Bits;
use crate::error::Result;
use crate::rat::Rat;
use crate::sets::GroundSet;

use super::certificate::*;
use super::ladder::Ladder;

/// Node budget for each cover search.
pub const COVER_NODE_BUDGET: u64 = 2_000_000;

/// Translate-cover search on grid numerators: `covers[t - 1]` has bit `s` set
/// iff `s + shift + t` lies in the set.
pub(crate) struct Covers {
    covers: Vec<Bits>,
    nodes: u64,
}

pub(crate) enum Search<T> {
    Found(T),
    Exhausted,
    Budget,
}

impl Covers {
    /// Translates `t = 1..=width` of `set` moved down by `shift`.
    pub fn new(set: &GroundSet, shift: usize, width: usize) -> Covers {
        let covers = (1..=width)
            .map(|t| {
                let mut b = set.bits().shift_down(shift + t);
                b.set(0, false);
                b
            })
            .collect();
        Covers { covers, nodes: 0 }
    }

    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    pub fn width(&self) -> usize {
        self.covers.len()
    }

    fn union_of(&self, ts: &[usize]) -> Bits {
        let mut acc = Bits::new(self.covers.first().map_or(1, Bits::len));
        for &t in ts {
            acc.union_with(&self.covers[t - 1]);
        }
        acc
    }

    /// Number of consecutive grid points from `1/N` covered by `ts`.
    pub fn reach(&self, ts: &[usize]) -> usize {
        self.union_of(ts).run_from(1)
    }

    /// Reach of the whole translate window.
    pub fn upper_reach(&self) -> usize {
        let all: Vec<usize> = (1..=self.width()).collect();
        self.reach(&all)
    }

    /// Whether some set of at most `cap` translates covers `1..=need`.
    pub fn feasible(&mut self, need: usize, cap: usize) -> Search<()> {
        let start = self.union_of(&[]);
        self.feasible_from(&start, need, cap)
    }

    fn feasible_from(&mut self, covered: &Bits, need: usize, left: usize) -> Search<()> {
        let gap = covered.run_from(1) + 1;
        if gap > need {
            return Search::Found(());
        }
        if left == 0 {
            return Search::Exhausted;
        }
        for t in 1..=self.width() {
            if !self.covers[t - 1].get(gap) {
                continue;
            }
            self.nodes += 1;
            if self.nodes > COVER_NODE_BUDGET {
                return Search::Budget;
            }
            let mut next = covered.clone();
            next.union_with(&self.covers[t - 1]);
            match self.feasible_from(&next, need, left - 1) {
                Search::Exhausted => {}
                other => return other,
            }
        }
        Search::Exhausted
    }

    /// Largest reach in `[need, upper]` attainable with at most `cap`
    /// translates, by bisection over `feasible`.
    pub fn max_reach(&mut self, need: usize, upper: usize, cap: usize) -> Search<usize> {
        match self.feasible(need, cap) {
            Search::Found(()) => {}
            Search::Exhausted => return Search::Exhausted,
            Search::Budget => return Search::Budget,
        }
        let (mut lo, mut hi) = (need, upper);
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            match self.feasible(mid, cap) {
                Search::Found(()) => lo = mid,
                Search::Exhausted => hi = mid - 1,
                Search::Budget => return Search::Budget,
            }
        }
        Search::Found(lo)
    }

    /// Lexicographically least set of exactly `size` translates covering
    /// `1..=need`.
    pub fn least_of_size(&mut self, need: usize, size: usize) -> Search<Vec<usize>> {
        let mut chosen = Vec::with_capacity(size);
        let start = self.union_of(&[]);
        self.least_from(&start, need, size, &mut chosen)
    }

    fn least_from(&mut self, covered: &Bits, need: usize, size: usize, chosen: &mut Vec<usize>) -> Search<Vec<usize>> {
        let gap = covered.run_from(1) + 1;
        if chosen.len() == size {
            return if gap > need {
                Search::Found(chosen.clone())
            } else {
                Search::Exhausted
            };
        }
        let next_t = chosen.last().map_or(1, |t| t + 1);
        let slots = size - chosen.len();
        if next_t + slots - 1 > self.width() {
            return Search::Exhausted;
        }
        if gap <= need && !(next_t..=self.width()).any(|t| self.covers[t - 1].get(gap)) {
            return Search::Exhausted;
        }
        for t in next_t..=self.width() + 1 - slots {
            self.nodes += 1;
            if self.nodes > COVER_NODE_BUDGET {
                return Search::Budget;
            }
            let mut next = covered.clone();
            next.union_with(&self.covers[t - 1]);
            chosen.push(t);
            let r = self.least_from(&next, need, size, chosen);
            chosen.pop();
            match r {
                Search::Exhausted => {}
                other => return other,
            }
        }
        Search::Exhausted
    }

    /// Smallest, then lexicographically least, set of at most `cap`
    /// translates covering `1..=need`.
    pub fn minimal(&mut self, need: usize, cap: usize) -> Search<Vec<usize>> {
        for size in 1..=cap.min(self.width()) {
            match self.least_of_size(need, size) {
                Search::Exhausted => {}
                other => return other,
            }
        }
        Search::Exhausted
    }
}

fn rat_list(set: &GroundSet, ks: &[usize]) -> Vec<Rat> {
    ks.iter().map(|&k| set.grid().element(k)).collect()
}

/// Per rung: translates `F ⊂ (0, epsilon_k)` with `|F| <= f_cap` such that
/// every grid `s <= delta_k` has `s + t` in `B` for some `t` in `F`. The
/// cover must reach the next rung's radius; `delta_k` is then maximized and
/// `F` minimized by size, then lexicographically.
pub fn check_syndetic(b: &GroundSet, ladder: &Ladder, f_cap: usize) -> Result<Verdict<SyndeticCertificate>> {
    ladder.check_grid(b.grid())?;
    let grid = b.grid();
    let f_cap = f_cap.max(1);
    let mut rungs = Vec::with_capacity(ladder.depth());
    let mut nodes = 0;
    for (k, rung) in ladder.rungs().iter().enumerate() {
        let width = grid.count_below(&rung.delta);
        let need = grid.count_below(&ladder.reach_floor(k)).max(1);
        let mut covers = Covers::new(b, 0, width);
        let upper = covers.upper_reach();
        let caps = |nodes: u64| {
            Caps::from([
                ("f_cap".to_string(), f_cap as u64),
                ("need".to_string(), need as u64),
                ("nodes".to_string(), nodes),
                ("node_budget".to_string(), COVER_NODE_BUDGET),
            ])
        };
        let refute = |translates: Vec<Rat>, nodes: u64| {
            Verdict::Refutation(Refutation {
                rung: k + 1,
                caps: caps(nodes),
                obligation: Obligation::Cover {
                    reach: grid.element(need),
                    shift: Rat::zero(),
                    translates,
                },
            })
        };
        if upper < need {
            let all: Vec<usize> = (1..=width).collect();
            return Ok(refute(rat_list(b, &all), nodes));
        }
        let best = match covers.max_reach(need, upper, f_cap) {
            Search::Found(r) => r,
            Search::Exhausted => {
                let first: Vec<usize> = (1..=width.min(f_cap)).collect();
                return Ok(refute(rat_list(b, &first), nodes + covers.nodes()));
            }
            Search::Budget => return Ok(budget_hit(k, caps(nodes + covers.nodes()))),
        };
        let translates = match covers.minimal(best, f_cap) {
            Search::Found(ts) => ts,
            Search::Exhausted => unreachable!("reach {best} was shown feasible"),
            Search::Budget => return Ok(budget_hit(k, caps(nodes + covers.nodes()))),
        };
        nodes += covers.nodes();
        rungs.push(SyndeticRung {
            epsilon: rung.delta.clone(),
            translates: rat_list(b, &translates),
            delta: grid.element(best),
        });
    }
    Ok(Verdict::Certificate(SyndeticCertificate { rungs }))
}

fn budget_hit<C>(k: usize, caps: Caps) -> Verdict<C> {
    Verdict::Inconclusive(Inconclusive {
        rung: k + 1,
        caps,
        reason: "cover search node budget exhausted".into(),
    })
}
