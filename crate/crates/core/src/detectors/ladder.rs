use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::semigroup::WindowGrid;

/// One rung of a ladder: a radius and a size cap (block length `L` for
/// broken-IP sets, piece or translate cap elsewhere).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rung {
    pub delta: Rat,
    pub cap: usize,
}

/// Finite stand-in for "for every `delta > 0` (and every `L`)": a strictly
/// decreasing list of radii.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ladder {
    rungs: Vec<Rung>,
}

impl Ladder {
    pub fn new(rungs: Vec<Rung>) -> Result<Ladder> {
        if rungs.is_empty() {
            return Err(Error::InvalidLadder("no rungs".into()));
        }
        for (i, r) in rungs.iter().enumerate() {
            if r.delta.is_zero() {
                return Err(Error::InvalidLadder(format!("rung {} has zero radius", i + 1)));
            }
            if r.cap == 0 {
                return Err(Error::InvalidLadder(format!("rung {} has zero cap", i + 1)));
            }
            if i > 0 && r.delta >= rungs[i - 1].delta {
                return Err(Error::InvalidLadder(format!(
                    "radii must strictly decrease (rung {})",
                    i + 1
                )));
            }
        }
        Ok(Ladder { rungs })
    }

    /// Radii `delta_max / 2^k` for `k = 1..=depth`, with caps from `cap`.
    pub fn halving(delta_max: &Rat, depth: usize, cap: impl Fn(usize) -> usize) -> Result<Ladder> {
        Ladder::new(
            (1..=depth)
                .map(|k| Rung {
                    delta: delta_max * &Rat::pow2_inv(k as u32),
                    cap: cap(k),
                })
                .collect(),
        )
    }

    pub fn from_pairs(pairs: &[(Rat, usize)]) -> Result<Ladder> {
        Ladder::new(
            pairs
                .iter()
                .map(|(d, c)| Rung { delta: d.clone(), cap: *c })
                .collect(),
        )
    }

    pub fn rungs(&self) -> &[Rung] {
        &self.rungs
    }

    pub fn depth(&self) -> usize {
        self.rungs.len()
    }

    pub fn rung(&self, k: usize) -> &Rung {
        &self.rungs[k]
    }

    pub fn smallest(&self) -> &Rat {
        &self.rungs.last().expect("nonempty").delta
    }

    /// The first `k` rungs.
    pub fn prefix(&self, k: usize) -> Ladder {
        Ladder {
            rungs: self.rungs[..k].to_vec(),
        }
    }

    pub fn with_caps(&self, cap: impl Fn(usize, usize) -> usize) -> Ladder {
        Ladder {
            rungs: self
                .rungs
                .iter()
                .enumerate()
                .map(|(i, r)| Rung {
                    delta: r.delta.clone(),
                    cap: cap(i, r.cap).max(1),
                })
                .collect(),
        }
    }

    /// Radius the cover at rung `k` (0-based) must reach: the next rung's
    /// radius, or half the last radius.
    pub fn reach_floor(&self, k: usize) -> Rat {
        match self.rungs.get(k + 1) {
            Some(r) => r.delta.clone(),
            None => self.rungs[k].delta.halve(),
        }
    }

    /// Every rung window must contain a grid point and lie inside the grid.
    pub fn check_grid(&self, grid: &WindowGrid) -> Result<()> {
        for (i, r) in self.rungs.iter().enumerate() {
            if &r.delta > grid.delta_max() {
                return Err(Error::InvalidLadder(format!(
                    "rung {} radius {} exceeds delta_max {}",
                    i + 1,
                    r.delta,
                    grid.delta_max()
                )));
            }
            if grid.count_below(&r.delta) == 0 {
                return Err(Error::InvalidLadder(format!(
                    "rung {} window (0, {}) holds no point of the 1/{} grid",
                    i + 1,
                    r.delta,
                    grid.modulus()
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halving_ladder() {
        let l = Ladder::halving(&Rat::one(), 3, |k| k).unwrap();
        let radii: Vec<String> = l.rungs().iter().map(|r| r.delta.to_string()).collect();
        assert_eq!(radii, ["1/2", "1/4", "1/8"]);
        assert_eq!(l.reach_floor(0), Rat::new(1, 4));
        assert_eq!(l.reach_floor(2), Rat::new(1, 16));
        assert!(l.check_grid(&WindowGrid::dyadic(16).unwrap()).is_ok());
        assert!(l.check_grid(&WindowGrid::dyadic(8).unwrap()).is_err());
    }

    #[test]
    fn rejects_non_decreasing() {
        assert!(Ladder::from_pairs(&[(Rat::new(1, 4), 1), (Rat::new(1, 2), 1)]).is_err());
        assert!(Ladder::from_pairs(&[]).is_err());
        assert!(Ladder::from_pairs(&[(Rat::new(1, 4), 0)]).is_err());
    }
}
