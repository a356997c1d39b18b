//! Finite run of the refinement loop that turns a broken-IP set into a
//! recurrent point near zero.
//!
//! Step `i` keeps a set `S_i` of shifts `n` with `T_n χ_A` in the cylinder
//! `K_i` of length `i` (so `diam K_i < 1/i`). It picks the least `m_i` in
//! `(0, 1/i)` for which some length-`i+1` cylinder cell of
//! `{n ∈ S_i : n + m_i ∈ S_i}` still carries a broken-IP certificate, and
//! that cell becomes `S_{i+1}`. Any `y = T_n χ_A` with `n ∈ S_{depth+1}`
//! then satisfies `d(T_{m_i} y, y) < 1/i` for every `i`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::detectors::replay::replay_broken_ip;
use crate::detectors::{check_broken_ip, BrokenIPCertificate, Verdict};
use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::semigroup::WindowGrid;
use crate::sets::{materialize, GroundSet, SetSpec};

use super::recurrence::depth_guard;
use super::{bitstring, chi_of, metric_d, shift, shift_index, Configuration};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RefinementStep {
    pub step: usize,
    pub m: Rat,
    /// The chosen cylinder, as a length `step + 1` prefix.
    pub cell: String,
    pub cell_size: usize,
    pub certificate: BrokenIPCertificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Refinement {
    pub steps: Vec<RefinementStep>,
    /// `y = T_offset χ_A`.
    pub offset: Rat,
    pub point: String,
}

impl Refinement {
    pub fn m_sequence(&self) -> Vec<Rat> {
        self.steps.iter().map(|s| s.m.clone()).collect()
    }
}

pub fn ramsey_refinement(
    a: &SetSpec,
    cert: &BrokenIPCertificate,
    grid: &WindowGrid,
    depth: usize,
) -> Result<Refinement> {
    depth_guard(grid, depth)?;
    let set = materialize(a, grid)?;
    replay_broken_ip(cert, &set).map_err(|e| Error::Config(format!("certificate does not replay: {e}")))?;
    let ladder = cert.ladder()?;
    let x = chi_of(&set);
    let mut current: Vec<usize> = set.indices().collect();
    let mut steps = Vec::with_capacity(depth);
    for i in 1..=depth {
        let seed_cap = cert.seed.len().saturating_sub(i).max(1);
        let mut chosen = None;
        'shifts: for m in 1..=grid.count_below(&Rat::new(1, i as u64)) {
            let mut cells: BTreeMap<String, Vec<usize>> = BTreeMap::new();
            for &n in &current {
                if n + i <= grid.size() && current.binary_search(&(n + m)).is_ok() {
                    cells.entry(bitstring(&x.bits().window(n, i + 1))).or_default().push(n);
                }
            }
            for (cell, members) in cells {
                let cell_set = GroundSet::from_indices(grid, members.iter().copied());
                if let Verdict::Certificate(c) = check_broken_ip(&cell_set, &ladder, seed_cap)? {
                    chosen = Some((m, cell, members, c));
                    break 'shifts;
                }
            }
        }
        let Some((m, cell, members, certificate)) = chosen else {
            return Err(Error::CertificateExhausted { step: i });
        };
        steps.push(RefinementStep {
            step: i,
            m: grid.element(m),
            cell,
            cell_size: members.len(),
            certificate,
        });
        current = members;
    }
    let n = current[0];
    let y = shift_index(&x, n);
    Ok(Refinement {
        steps,
        offset: grid.element(n),
        point: y.to_string(),
    })
}

/// `d(T_{m_i} y, y) < 1/i` for every step, with `y` rebuilt from `A`.
pub fn replay_refinement(r: &Refinement, a: &SetSpec, grid: &WindowGrid) -> std::result::Result<(), String> {
    let x: Configuration = chi_of(&materialize(a, grid).map_err(|e| e.to_string())?);
    let y = shift(&x, &r.offset).map_err(|e| e.to_string())?;
    for s in &r.steps {
        let bound = Rat::new(1, s.step as u64);
        if s.m.is_zero() || s.m >= bound {
            return Err(format!("m_{} = {} outside (0, {bound})", s.step, s.m));
        }
        let d = metric_d(&shift(&y, &s.m).map_err(|e| e.to_string())?, &y).map_err(|e| e.to_string())?;
        if d >= bound {
            return Err(format!("step {}: d = {d} is not below {bound}", s.step));
        }
    }
    Ok(())
}
