//! Independent re-verification of certificates and refutations.
//!
//! Everything here works on rationals through `GroundSet::contains` and grid
//! enumeration only; no bitset shifting or search state is reused.

use std::collections::BTreeSet;

use crate::rat::Rat;
use crate::sets::{finite_sums, GroundSet};

use super::certificate::*;
use super::combos::for_each_combination;

type Check = std::result::Result<(), String>;

fn grid_points_upto<'a>(set: &'a GroundSet, reach: &'a Rat) -> impl Iterator<Item = Rat> + 'a {
    set.grid().elements().take_while(move |s| s <= reach)
}

fn covered(set: &GroundSet, s: &Rat, shift: &Rat, translates: &[Rat]) -> bool {
    let base = s + shift;
    translates.iter().any(|t| set.contains(&(&base + t)))
}

/// Whether `ob` holds for `set`.
pub fn holds(ob: &Obligation, set: &GroundSet) -> bool {
    match ob {
        Obligation::Contains { elements } => elements.iter().all(|e| set.contains(e)),
        Obligation::Shifter {
            delta,
            block,
            shifter_in_set,
        } => set
            .grid()
            .elements()
            .take_while(|a| a < delta)
            .any(|a| {
                (!shifter_in_set || set.contains(&a))
                    && block.iter().all(|b| set.contains(&(&a + b)))
            }),
        Obligation::Cover {
            reach,
            shift,
            translates,
        } => grid_points_upto(set, reach).all(|s| covered(set, &s, shift, translates)),
        Obligation::PointCover {
            points,
            shift,
            translates,
        } => points.iter().all(|g| covered(set, g, shift, translates)),
        Obligation::Distinct { terms } => {
            terms.len() < 64 && finite_sums(terms).len() as u64 == (1u64 << terms.len()) - 1
        }
    }
}

fn require(ob: Obligation, set: &GroundSet, what: impl FnOnce() -> String) -> Check {
    if holds(&ob, set) {
        Ok(())
    } else {
        Err(what())
    }
}

/// A refutation replays when its obligation fails.
pub fn replay_refutation(r: &Refutation, set: &GroundSet) -> Check {
    if holds(&r.obligation, set) {
        Err(format!("refutation obligation at rung {} holds", r.rung))
    } else {
        Ok(())
    }
}

fn check_seed(terms: &[Rat], bound: &Rat) -> Check {
    for (i, x) in terms.iter().enumerate() {
        if x.is_zero() || *x > bound * &Rat::pow2_inv(i as u32 + 1) {
            return Err(format!("seed term {} = {x} breaks dominance", i + 1));
        }
    }
    Ok(())
}

pub fn replay_ip(w: &IPWitness, set: &GroundSet) -> Check {
    let terms = w.seed.terms();
    if w.length == 0 || w.length > terms.len() {
        return Err(format!("length {} outside seed", w.length));
    }
    check_seed(terms, w.seed.bound())?;
    let prefix = terms[..w.length].to_vec();
    if !holds(&Obligation::Distinct { terms: prefix.clone() }, set) {
        return Err("subset sums collide".into());
    }
    require(
        Obligation::Contains {
            elements: finite_sums(&prefix).into_iter().collect(),
        },
        set,
        || "a finite sum lies outside the set".into(),
    )
}

pub fn replay_syndetic(cert: &SyndeticCertificate, set: &GroundSet) -> Check {
    if cert.rungs.is_empty() {
        return Err("no rungs".into());
    }
    for (k, r) in cert.rungs.iter().enumerate() {
        if r.translates.is_empty() || r.delta.is_zero() {
            return Err(format!("rung {} is degenerate", k + 1));
        }
        if r.translates.iter().any(|t| t.is_zero() || *t >= r.epsilon) {
            return Err(format!("rung {} translate outside (0, {})", k + 1, r.epsilon));
        }
        require(
            Obligation::Cover {
                reach: r.delta.clone(),
                shift: Rat::zero(),
                translates: r.translates.clone(),
            },
            set,
            || format!("rung {} cover fails", k + 1),
        )?;
    }
    Ok(())
}

pub fn replay_broken_ip(cert: &BrokenIPCertificate, set: &GroundSet) -> Check {
    let terms = cert.seed.terms();
    check_seed(terms, cert.seed.bound())?;
    for (k, r) in cert.rungs.iter().enumerate() {
        if r.length == 0 || r.length > terms.len() {
            return Err(format!("rung {} length outside seed", k + 1));
        }
        if r.shifter.is_zero() || r.shifter >= r.delta || set.grid().index_of(&r.shifter).is_err() {
            return Err(format!("rung {} shifter outside (0, {})", k + 1, r.delta));
        }
        let prefix = terms[..r.length].to_vec();
        if !holds(&Obligation::Distinct { terms: prefix.clone() }, set) {
            return Err("subset sums collide".into());
        }
        let block: Vec<Rat> = finite_sums(&prefix).iter().map(|s| &r.shifter + s).collect();
        require(Obligation::Contains { elements: block }, set, || {
            format!("rung {} shifted block leaves the set", k + 1)
        })?;
    }
    Ok(())
}

/// Every subset of `universe` with at most `cap` elements lies inside one of
/// `pieces`.
fn pieces_cover(universe: &[Rat], cap: usize, pieces: &[BTreeSet<Rat>]) -> bool {
    let whole: BTreeSet<Rat> = universe.iter().cloned().collect();
    if pieces.iter().any(|p| whole.is_subset(p)) {
        return true;
    }
    let k = cap.min(universe.len());
    let mut ok = true;
    for_each_combination(universe.len(), k, |idx| {
        let sub: Vec<&Rat> = idx.iter().map(|&i| &universe[i]).collect();
        if !pieces.iter().any(|p| sub.iter().all(|x| p.contains(*x))) {
            ok = false;
        }
        ok
    });
    ok
}

pub fn replay_broken_syndetic(cert: &BrokenSyndeticCertificate, set: &GroundSet) -> Check {
    let grid = set.grid();
    let mut idx = Vec::new();
    for b in &cert.base_elements {
        idx.push(grid.index_of(b).map_err(|e| e.to_string())?);
    }
    let base = GroundSet::from_indices(grid, idx);
    replay_syndetic(&cert.syndetic, &base)?;
    let universe: Vec<Rat> = base
        .elements()
        .into_iter()
        .filter(|b| *b <= cert.piece_window)
        .collect();
    if universe.is_empty() {
        return Err("no base elements inside the piece window".into());
    }
    for (k, r) in cert.rungs.iter().enumerate() {
        let mut pieces = Vec::new();
        for ps in &r.pieces {
            if ps.piece.iter().any(|p| !universe.contains(p)) {
                return Err(format!("rung {} piece leaves the base window", k + 1));
            }
            if ps.shifter.is_zero() || ps.shifter >= r.delta || grid.index_of(&ps.shifter).is_err() {
                return Err(format!("rung {} shifter outside (0, {})", k + 1, r.delta));
            }
            if cert.shifter_in_set && !set.contains(&ps.shifter) {
                return Err(format!("rung {} shifter not in the set", k + 1));
            }
            let block: Vec<Rat> = ps.piece.iter().map(|p| &ps.shifter + p).collect();
            require(Obligation::Contains { elements: block }, set, || {
                format!("rung {} shifted piece leaves the set", k + 1)
            })?;
            pieces.push(ps.piece.iter().cloned().collect::<BTreeSet<_>>());
        }
        if !pieces_cover(&universe, cert.piece_cap, &pieces) {
            return Err(format!("rung {} pieces miss a subset of the base", k + 1));
        }
    }
    Ok(())
}

pub fn replay_pw(cert: &PWSyndeticCertificate, set: &GroundSet) -> Check {
    let grid = set.grid();
    for (n, lv) in cert.levels.iter().enumerate() {
        if lv.translates.is_empty() {
            return Err(format!("level {} has no translates", n + 1));
        }
        if lv.translates.iter().any(|t| t.is_zero() || *t >= lv.radius) {
            return Err(format!("level {} translate outside (0, {})", n + 1, lv.radius));
        }
    }
    let shift_ok = |x: &Rat| !x.is_zero() && *x < cert.probe_radius && grid.index_of(x).is_ok();
    match &cert.probes {
        PwProbes::Uniform { shift } => {
            if !shift_ok(shift) {
                return Err(format!("shift {shift} outside (0, {})", cert.probe_radius));
            }
            for (n, lv) in cert.levels.iter().enumerate() {
                let points: Vec<Rat> = grid.elements().take_while(|g| *g < lv.inner).collect();
                require(
                    Obligation::PointCover {
                        points,
                        shift: shift.clone(),
                        translates: lv.translates.clone(),
                    },
                    set,
                    || format!("level {} inner window not covered", n + 1),
                )?;
            }
        }
        PwProbes::PerProbe { entries } => {
            let outer = cert.levels.iter().map(|l| l.inner.clone()).max().unwrap_or_else(Rat::zero);
            let universe: Vec<Rat> = grid.elements().take_while(|g| *g < outer).collect();
            let probes: Vec<BTreeSet<Rat>> = entries
                .iter()
                .map(|e| e.probe.iter().cloned().collect())
                .collect();
            if !pieces_cover(&universe, cert.probe_budget, &probes) {
                return Err("a probe is not listed".into());
            }
            for e in entries {
                if !shift_ok(&e.shift) {
                    return Err(format!("shift {} outside (0, {})", e.shift, cert.probe_radius));
                }
                for (n, lv) in cert.levels.iter().enumerate() {
                    let points: Vec<Rat> = e.probe.iter().filter(|g| **g < lv.inner).cloned().collect();
                    require(
                        Obligation::PointCover {
                            points,
                            shift: e.shift.clone(),
                            translates: lv.translates.clone(),
                        },
                        set,
                        || format!("level {} probe not covered", n + 1),
                    )?;
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::WindowGrid;

    fn r(n: u64, d: u64) -> Rat {
        Rat::new(n, d)
    }

    #[test]
    fn obligations_on_small_sets() {
        let g = WindowGrid::dyadic(16).unwrap();
        let odd = GroundSet::from_indices(&g, (1..16).step_by(2));
        assert!(holds(&Obligation::Contains { elements: vec![r(1, 16), r(3, 16)] }, &odd));
        assert!(!holds(&Obligation::Contains { elements: vec![r(2, 16)] }, &odd));
        let sh = |block: Vec<Rat>, inset| Obligation::Shifter {
            delta: r(1, 8),
            block,
            shifter_in_set: inset,
        };
        assert!(holds(&sh(vec![r(2, 16)], false), &odd));
        assert!(holds(&sh(vec![r(2, 16)], true), &odd));
        assert!(!holds(&sh(vec![r(1, 16)], true), &odd));
        assert!(holds(&sh(vec![], true), &odd));
        let cover = |ts: Vec<Rat>| Obligation::Cover {
            reach: r(14, 16),
            shift: Rat::zero(),
            translates: ts,
        };
        assert!(!holds(&cover(vec![r(1, 16)]), &odd));
        assert!(holds(&cover(vec![r(1, 16), r(2, 16)]), &odd));
        assert!(!holds(&Obligation::Distinct { terms: vec![r(1, 4), r(1, 8), r(1, 8)] }, &odd));
    }
}
