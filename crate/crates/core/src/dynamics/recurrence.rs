//! Recurrence and uniform recurrence near zero on rungs `delta = 1/n`.

use serde::Serialize;

use crate::detectors::replay::replay_syndetic;
use crate::detectors::{check_syndetic, Ladder, Rung, SyndeticCertificate, Verdict};
use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::semigroup::WindowGrid;
use crate::sets::GroundSet;

use super::{distance_at, first_disagreement, return_indices, shift_index, Configuration, ShiftSystem};

/// Rung windows `(0, 1/n)` for `n <= depth` must hold two grid points.
pub fn depth_guard(grid: &WindowGrid, depth: usize) -> Result<()> {
    if depth == 0 || grid.modulus() < 2 * depth as u64 || grid.count_below(&Rat::new(1, depth as u64)) < 1 {
        return Err(Error::DepthBeyondResolution {
            depth,
            modulus: grid.modulus(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecurrenceRung {
    pub n: usize,
    /// Least `s ∈ (0, 1/n)` with `d(T_s x, x) < 1/n`.
    pub witness: Option<Rat>,
    pub distance: Option<Rat>,
    /// `R_{1/n} ∩ (0, 1/n)`.
    pub returns: Vec<Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecurrenceReport {
    pub depth: usize,
    pub prefix: usize,
    pub rungs: Vec<RecurrenceRung>,
    pub recurrent: bool,
}

pub fn check_recurrent_near_zero(sys: &ShiftSystem, x: &Configuration, depth: usize) -> Result<RecurrenceReport> {
    depth_guard(x.grid(), depth)?;
    let grid = x.grid();
    let mut rungs = Vec::with_capacity(depth);
    for n in 1..=depth {
        let radius = Rat::new(1, n as u64);
        let ks = return_indices(sys, x, &radius, &radius);
        let witness = ks.first().copied();
        rungs.push(RecurrenceRung {
            n,
            witness: witness.map(|k| grid.element(k)),
            distance: witness.map(|k| distance_at(first_disagreement(shift_index(x, k).bits(), x.bits()))),
            returns: ks.into_iter().map(|k| grid.element(k)).collect(),
        });
    }
    Ok(RecurrenceReport {
        depth,
        prefix: sys.prefix,
        recurrent: rungs.iter().all(|r| r.witness.is_some()),
        rungs,
    })
}

/// Distance after shifting by `s`, recomputed bit by bit from `x`.
fn direct_distance(x: &Configuration, k: usize) -> Rat {
    let common = x.len().saturating_sub(k);
    match (0..common).find(|&t| x.bit(t + k) != x.bit(t)) {
        None => Rat::zero(),
        Some(i) => Rat::pow2_inv(i as u32 + 1),
    }
}

/// Witnesses must replay and failed rungs must have no return time in
/// their window.
pub fn replay_recurrence(report: &RecurrenceReport, sys: &ShiftSystem, x: &Configuration) -> std::result::Result<(), String> {
    let grid = x.grid();
    for r in &report.rungs {
        let radius = Rat::new(1, r.n as u64);
        let hits: Vec<usize> = (1..=grid.count_below(&radius))
            .filter(|&k| x.len() >= k + sys.prefix && direct_distance(x, k) < radius)
            .collect();
        match &r.witness {
            Some(s) => {
                let k = grid.index_of(s).map_err(|e| e.to_string())?;
                if *s >= radius || x.len() < k + sys.prefix || direct_distance(x, k) >= radius {
                    return Err(format!("rung {} witness {s} does not return", r.n));
                }
            }
            None if !hits.is_empty() => {
                return Err(format!("rung {} has a return time at {}", r.n, grid.element(hits[0])));
            }
            None => {}
        }
    }
    if report.recurrent != report.rungs.iter().all(|r| r.witness.is_some()) {
        return Err("verdict disagrees with the rungs".into());
    }
    Ok(())
}

/// Radii `1/m` for `m = from..=depth`, clipped to the grid, each with cap
/// `f_cap`.
pub fn rung_ladder(grid: &WindowGrid, from: usize, depth: usize, f_cap: usize) -> Result<Ladder> {
    let rungs: Vec<Rung> = (from.max(1)..=depth)
        .map(|m| Rat::new(1, m as u64))
        .filter(|d| d <= grid.delta_max())
        .map(|delta| Rung { delta, cap: f_cap })
        .collect();
    if rungs.is_empty() {
        return Err(Error::DepthBeyondResolution {
            depth,
            modulus: grid.modulus(),
        });
    }
    let ladder = Ladder::new(rungs)?;
    ladder.check_grid(grid)?;
    Ok(ladder)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniformRung {
    pub n: usize,
    /// `R_{1/n}` over the whole grid.
    pub returns: Vec<Rat>,
    pub verdict: Verdict<SyndeticCertificate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniformReport {
    pub depth: usize,
    pub f_cap: usize,
    pub rungs: Vec<UniformRung>,
    pub uniform: bool,
}

impl UniformReport {
    pub(crate) fn assemble(depth: usize, f_cap: usize, rungs: Vec<UniformRung>) -> UniformReport {
        UniformReport {
            depth,
            f_cap,
            uniform: rungs.iter().all(|r| r.verdict.is_certificate()),
            rungs,
        }
    }
}

/// At every rung `1/n` the return-time set `R_{1/n}` must pass the syndetic
/// check on the ladder `1/n, ..., 1/depth`.
pub fn check_uniformly_recurrent(
    sys: &ShiftSystem,
    x: &Configuration,
    depth: usize,
    f_cap: usize,
) -> Result<UniformReport> {
    depth_guard(x.grid(), depth)?;
    let grid = x.grid();
    let mut rungs = Vec::with_capacity(depth);
    for n in 1..=depth {
        let ks = return_indices(sys, x, &Rat::new(1, n as u64), &grid.delta_max().clone());
        let set = GroundSet::from_indices(grid, ks.iter().copied());
        let verdict = check_syndetic(&set, &rung_ladder(grid, n, depth, f_cap)?, f_cap)?;
        rungs.push(UniformRung {
            n,
            returns: ks.into_iter().map(|k| grid.element(k)).collect(),
            verdict,
        });
    }
    Ok(UniformReport::assemble(depth, f_cap, rungs))
}

/// Certificates replay against the listed return sets, which are in turn
/// recomputed from `returns_of(n)`.
pub fn replay_uniform(
    report: &UniformReport,
    grid: &WindowGrid,
    returns_of: impl Fn(usize) -> Vec<Rat>,
) -> std::result::Result<(), String> {
    for r in &report.rungs {
        if returns_of(r.n) != r.returns {
            return Err(format!("rung {} return set differs", r.n));
        }
        let mut idx = Vec::with_capacity(r.returns.len());
        for s in &r.returns {
            idx.push(grid.index_of(s).map_err(|e| e.to_string())?);
        }
        let set = GroundSet::from_indices(grid, idx);
        if let Verdict::Certificate(c) = &r.verdict {
            replay_syndetic(c, &set).map_err(|e| format!("rung {}: {e}", r.n))?;
        }
    }
    if report.uniform != report.rungs.iter().all(|r| r.verdict.is_certificate()) {
        return Err("verdict disagrees with the rungs".into());
    }
    Ok(())
}

/// Return times recomputed from the definition, for replay.
pub(crate) fn direct_returns(sys: &ShiftSystem, x: &Configuration, delta: &Rat, window: &Rat) -> Vec<Rat> {
    let grid = x.grid();
    (1..=grid.count_below(window))
        .filter(|&k| x.len() >= k + sys.prefix && direct_distance(x, k) < *delta)
        .map(|k| grid.element(k))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::chi;
    use crate::sets::SetSpec;

    fn r(n: u64, d: u64) -> Rat {
        Rat::new(n, d)
    }

    #[test]
    fn all_ones_recurs_at_every_rung() {
        let g = WindowGrid::dyadic(64).unwrap();
        let sys = ShiftSystem::new(Configuration::ones(&g), 6).unwrap();
        let rep = check_recurrent_near_zero(&sys, &sys.base, 4).unwrap();
        assert!(rep.recurrent);
        assert!(rep.rungs.iter().all(|g| g.witness == Some(r(1, 64))));
        assert!(replay_recurrence(&rep, &sys, &sys.base).is_ok());
        let u = check_uniformly_recurrent(&sys, &sys.base, 4, 2).unwrap();
        assert!(u.uniform);
        assert!(replay_uniform(&u, &g, |n| direct_returns(&sys, &sys.base, &r(1, n as u64), &Rat::one())).is_ok());
    }

    /// The lone point sits at the end of the domain, so every shifted copy
    /// first disagrees deep inside the prefix.
    #[test]
    fn lone_far_point_recurs_under_this_metric() {
        let g = WindowGrid::dyadic(16).unwrap();
        let sys = ShiftSystem::new(chi(&SetSpec::Explicit(vec![Rat::one()]), &g).unwrap(), 6).unwrap();
        let rep = check_recurrent_near_zero(&sys, &sys.base, 4).unwrap();
        assert!(rep.recurrent);
        assert_eq!(rep.rungs[3].distance, Some(Rat::pow2_inv(16)));
        assert!(replay_recurrence(&rep, &sys, &sys.base).is_ok());
    }

    #[test]
    fn lone_far_point_is_uniform_too() {
        let g = WindowGrid::dyadic(16).unwrap();
        let x = chi(&SetSpec::Explicit(vec![r(3, 4)]), &g).unwrap();
        let sys = ShiftSystem::new(x.clone(), 6).unwrap();
        assert!(check_uniformly_recurrent(&sys, &x, 4, 2).unwrap().uniform);
    }

    #[test]
    fn long_initial_run_is_not_uniform() {
        let g = WindowGrid::dyadic(16).unwrap();
        let x = chi(&SetSpec::Explicit((1..=8).map(|k| r(k, 16)).collect()), &g).unwrap();
        let sys = ShiftSystem::new(x.clone(), 6).unwrap();
        let u = check_uniformly_recurrent(&sys, &x, 2, 2).unwrap();
        assert!(!u.uniform);
        assert!(u.rungs[0].verdict.is_certificate());
        assert!(u.rungs[1].verdict.is_refutation());
    }

    #[test]
    fn odd_pattern_returns_on_even_shifts() {
        let g = WindowGrid::dyadic(16).unwrap();
        let odd = SetSpec::Pattern {
            period: 2,
            residues: vec![1],
        };
        let sys = ShiftSystem::new(chi(&odd, &g).unwrap(), 4).unwrap();
        let rep = check_recurrent_near_zero(&sys, &sys.base, 4).unwrap();
        assert!(rep.recurrent);
        assert_eq!(rep.rungs[1].witness, Some(r(2, 16)));
        let u = check_uniformly_recurrent(&sys, &sys.base, 4, 2).unwrap();
        assert!(u.uniform);
    }

    #[test]
    fn guard_rejects_deep_rungs() {
        let g = WindowGrid::dyadic(8).unwrap();
        let sys = ShiftSystem::new(Configuration::ones(&g), 2).unwrap();
        assert!(matches!(
            check_recurrent_near_zero(&sys, &sys.base, 5),
            Err(Error::DepthBeyondResolution { depth: 5, .. })
        ));
    }
}
