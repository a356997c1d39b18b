//! Forcing probes: search the orbit closure of `χ_A` for (uniformly)
//! recurrent points with `y(0) = 1`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::bits::Bits;
use crate::detectors::{check_broken_syndetic, Agreement, BrokenSyndeticCertificate, BrokenSyndeticParams, Verdict};
use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::semigroup::WindowGrid;
use crate::sets::{materialize, GroundSet, SetSpec};

use super::recurrence::{check_recurrent_near_zero, check_uniformly_recurrent, depth_guard, RecurrenceReport, UniformReport};
use super::{bitstring, shift_index, Configuration, ShiftSystem};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeHit {
    /// Shift of `χ_A` that realizes the point.
    pub offset: Rat,
    /// The point on the comparison prefix.
    pub config: String,
}

/// `Y_K` holds the prefixes realized by shifts in `(0, 1/K)`, which are
/// the prefixes realized at every rung `(0, 1/k)`, `k <= K`. `K_set` is its
/// part with bit 0 set; its representatives are the shifts by elements of
/// `A ∩ (0, 1/K)`, tried in ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub depth: usize,
    pub prefix: usize,
    pub orbit_points: usize,
    pub k_set: usize,
    pub tried: usize,
    pub found: Option<ProbeHit>,
    pub recurrence: Option<RecurrenceReport>,
}

struct Closure {
    sys: ShiftSystem,
    orbit_points: usize,
    k_set: usize,
    /// Numerators of `A ∩ (0, 1/K)` whose shift leaves a full prefix.
    candidates: Vec<usize>,
}

fn closure(set: &GroundSet, depth: usize, prefix: usize) -> Result<Closure> {
    depth_guard(set.grid(), depth)?;
    let sys = ShiftSystem::of_set(set, prefix)?;
    let x = &sys.base;
    let window = set.grid().count_below(&Rat::new(1, depth as u64));
    let mut points: BTreeSet<Bits> = BTreeSet::new();
    let mut k_set: BTreeSet<Bits> = BTreeSet::new();
    let mut candidates = Vec::new();
    for k in (1..=window).filter(|&k| sys.admits(x, k)) {
        let p = x.bits().window(k, prefix);
        if set.contains_index(k) {
            k_set.insert(p.clone());
            candidates.push(k);
        }
        points.insert(p);
    }
    Ok(Closure {
        orbit_points: points.len(),
        k_set: k_set.len(),
        candidates,
        sys,
    })
}

fn hit(c: &Closure, k: usize) -> (ProbeHit, Configuration) {
    let y = shift_index(&c.sys.base, k);
    (
        ProbeHit {
            offset: c.sys.grid.element(k),
            config: bitstring(&y.bits().truncated(c.sys.prefix)),
        },
        y,
    )
}

pub fn forces_recurrence_probe(a: &SetSpec, grid: &WindowGrid, depth: usize, prefix: usize) -> Result<ProbeReport> {
    let set = materialize(a, grid)?;
    let delta = Rat::new(1, depth as u64);
    if !set.meets_below(&delta) {
        return Err(Error::NotNearZero { delta });
    }
    let c = closure(&set, depth, prefix)?;
    let mut report = ProbeReport {
        depth,
        prefix,
        orbit_points: c.orbit_points,
        k_set: c.k_set,
        tried: 0,
        found: None,
        recurrence: None,
    };
    for &k in &c.candidates {
        report.tried += 1;
        let (h, y) = hit(&c, k);
        let rec = check_recurrent_near_zero(&c.sys, &y, depth)?;
        if rec.recurrent {
            report.found = Some(h);
            report.recurrence = Some(rec);
            break;
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniformProbeReport {
    pub near_zero: bool,
    pub probe: ProbeReport,
    pub uniform: Option<UniformReport>,
    /// Some candidate's syndetic checks stopped at a budget.
    pub hit_caps: bool,
    pub broken_syndetic: Verdict<BrokenSyndeticCertificate>,
    pub agreement: Agreement,
}

/// Like the recurrence probe but the point must be uniformly recurrent;
/// the broken-syndetic checker runs on `A` with `params` alongside. A set
/// with nothing below `1/K` reports an empty `K_set` instead of an error.
pub fn forces_uniform_probe(
    a: &SetSpec,
    grid: &WindowGrid,
    depth: usize,
    prefix: usize,
    f_cap: usize,
    params: &BrokenSyndeticParams,
) -> Result<UniformProbeReport> {
    let set = materialize(a, grid)?;
    let near_zero = set.meets_below(&Rat::new(1, depth as u64));
    let c = closure(&set, depth, prefix)?;
    let mut probe = ProbeReport {
        depth,
        prefix,
        orbit_points: c.orbit_points,
        k_set: c.k_set,
        tried: 0,
        found: None,
        recurrence: None,
    };
    let mut uniform = None;
    let mut hit_caps = false;
    for &k in &c.candidates {
        probe.tried += 1;
        let (h, y) = hit(&c, k);
        let rep = check_uniformly_recurrent(&c.sys, &y, depth, f_cap)?;
        if rep.uniform {
            probe.found = Some(h);
            uniform = Some(rep);
            break;
        }
        hit_caps |= rep.rungs.iter().any(|r| matches!(r.verdict, Verdict::Inconclusive(_)));
    }
    let broken_syndetic = check_broken_syndetic(&set, params)?;
    let agreement = match (probe.found.is_some(), &broken_syndetic) {
        (true, Verdict::Certificate(_)) => Agreement::BothAccept,
        (false, Verdict::Refutation(_)) if !hit_caps => Agreement::BothRefute,
        _ => Agreement::DisagreeWithCaps,
    };
    Ok(UniformProbeReport {
        near_zero,
        probe,
        uniform,
        hit_caps,
        broken_syndetic,
        agreement,
    })
}
