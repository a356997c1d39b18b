//! Shift-space model: configurations on `{0} ∪ grid`, the shift action,
//! the first-disagreement ultrametric and return-time sets.

mod orbit;
mod probe;
mod ramsey;
pub(crate) mod recurrence;

pub use orbit::{graph_returns, minimal_invariant, orbit_graph, uniform_in_graph, OrbitEdge, OrbitGraph, OrbitNode};
pub use probe::{forces_recurrence_probe, forces_uniform_probe, ProbeHit, ProbeReport, UniformProbeReport};
pub use ramsey::{ramsey_refinement, replay_refinement, Refinement, RefinementStep};
pub use recurrence::{
    check_recurrent_near_zero, check_uniformly_recurrent, depth_guard, replay_recurrence, replay_uniform,
    rung_ladder, RecurrenceReport, RecurrenceRung, UniformReport, UniformRung,
};

use std::fmt;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::semigroup::WindowGrid;
use crate::sets::{materialize, GroundSet, SetSpec};

/// Shortest comparison domain a shifted configuration may have by default.
pub const DEFAULT_PREFIX: usize = 6;

/// A point of `{0,1}^{S ∪ {0}}` restricted to a grid, possibly on a
/// shrunken domain after shifting. Index `0` is the point `0`, index `k`
/// the element `k/N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    grid: WindowGrid,
    bits: Bits,
}

impl Configuration {
    /// `bits` may be shorter than the full domain `size + 1`.
    pub fn from_bits(grid: &WindowGrid, bits: Bits) -> Result<Configuration> {
        if bits.len() > grid.size() + 1 {
            return Err(Error::PrefixTooLong {
                prefix: bits.len(),
                available: grid.size() + 1,
            });
        }
        Ok(Configuration {
            grid: grid.clone(),
            bits,
        })
    }

    pub fn ones(grid: &WindowGrid) -> Configuration {
        Configuration {
            grid: grid.clone(),
            bits: Bits::range(grid.size() + 1, 0, grid.size() + 1),
        }
    }

    pub fn grid(&self) -> &WindowGrid {
        &self.grid
    }

    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    /// Number of indices in the domain.
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits.get(i)
    }

    /// The first `p` canonical indices.
    pub fn prefix(&self, p: usize) -> Result<Bits> {
        if p > self.len() {
            return Err(Error::PrefixTooLong {
                prefix: p,
                available: self.len(),
            });
        }
        Ok(self.bits.truncated(p))
    }
}

/// `0`/`1` characters in canonical index order.
pub fn bitstring(b: &Bits) -> String {
    (0..b.len()).map(|i| if b.get(i) { '1' } else { '0' }).collect()
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&bitstring(&self.bits))
    }
}

/// The characteristic configuration of a materialized set; bit 0 is clear.
pub fn chi_of(set: &GroundSet) -> Configuration {
    Configuration {
        grid: set.grid().clone(),
        bits: set.bits().clone(),
    }
}

pub fn chi(spec: &SetSpec, grid: &WindowGrid) -> Result<Configuration> {
    Ok(chi_of(&materialize(spec, grid)?))
}

/// Shift by the grid element with numerator `k`.
pub(crate) fn shift_index(c: &Configuration, k: usize) -> Configuration {
    let len = c.len().saturating_sub(k);
    Configuration {
        grid: c.grid.clone(),
        bits: c.bits.shift_down(k).truncated(len),
    }
}

/// `T_s(c)(t) = c(t + s)`, defined on the indices `t` with `t + s` inside
/// the domain of `c`.
pub fn shift(c: &Configuration, s: &Rat) -> Result<Configuration> {
    let k = c.grid.index_of(s)?;
    Ok(shift_index(c, k))
}

/// First index where the two bit vectors differ on their common domain.
pub(crate) fn first_disagreement(x: &Bits, y: &Bits) -> Option<usize> {
    (0..x.len().min(y.len())).find(|&i| x.get(i) != y.get(i))
}

pub(crate) fn distance_at(first: Option<usize>) -> Rat {
    match first {
        None => Rat::zero(),
        Some(i) => Rat::pow2_inv(i as u32 + 1),
    }
}

/// `0` on agreement, else `2^-i` for the 1-based position `i` of the first
/// disagreement on the common domain.
pub fn metric_d(x: &Configuration, y: &Configuration) -> Result<Rat> {
    if x.grid != y.grid {
        return Err(Error::GridMismatch);
    }
    Ok(distance_at(first_disagreement(&x.bits, &y.bits)))
}

/// A base configuration with its grid and the comparison prefix `P`.
///
/// Shifts that leave fewer than `P` indices are never compared, so
/// truncation cannot produce agreement by itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftSystem {
    pub grid: WindowGrid,
    pub base: Configuration,
    pub prefix: usize,
}

impl ShiftSystem {
    pub fn new(base: Configuration, prefix: usize) -> Result<ShiftSystem> {
        if prefix == 0 || prefix > base.len() {
            return Err(Error::PrefixTooLong {
                prefix,
                available: base.len(),
            });
        }
        Ok(ShiftSystem {
            grid: base.grid.clone(),
            base,
            prefix,
        })
    }

    pub fn of_set(set: &GroundSet, prefix: usize) -> Result<ShiftSystem> {
        ShiftSystem::new(chi_of(set), prefix)
    }

    /// Whether shifting `x` by numerator `k` keeps a comparable domain.
    pub(crate) fn admits(&self, x: &Configuration, k: usize) -> bool {
        x.len() >= k + self.prefix
    }
}

/// Numerators of `R_delta = {s ∈ (0, window) : d(T_s x, x) < delta}`.
pub(crate) fn return_indices(sys: &ShiftSystem, x: &Configuration, delta: &Rat, window: &Rat) -> Vec<usize> {
    (1..=x.grid.count_below(window))
        .filter(|&k| sys.admits(x, k))
        .filter(|&k| distance_at(first_disagreement(&x.bits.shift_down(k), &x.bits)) < *delta)
        .collect()
}

/// `R_delta` on the grid window `(0, window)`, ascending.
pub fn r_delta(sys: &ShiftSystem, x: &Configuration, delta: &Rat, window: &Rat) -> Vec<Rat> {
    return_indices(sys, x, delta, window)
        .into_iter()
        .map(|k| x.grid.element(k))
        .collect()
}
