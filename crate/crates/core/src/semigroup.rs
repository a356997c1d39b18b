//! Semigroup descriptors and the finite window grids that stand in for
//! `S ∩ (0, delta_max]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::Rat;

/// Which additive subsemigroup of the positive rationals a grid samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "modulus")]
pub enum SemigroupDescriptor {
    /// Dyadic rationals: denominators are powers of two. Dense in `(0, ∞)`.
    Dyadic,
    /// Rationals whose denominator divides the given modulus. Closed under
    /// addition but discrete, so only a finite-resolution surrogate.
    RationalMod(u64),
}

impl SemigroupDescriptor {
    pub fn is_dense(&self) -> bool {
        matches!(self, SemigroupDescriptor::Dyadic)
    }

    pub fn allows_modulus(&self, n: u64) -> bool {
        match *self {
            SemigroupDescriptor::Dyadic => n >= 2 && n.is_power_of_two(),
            SemigroupDescriptor::RationalMod(m) => n >= 2 && m % n == 0,
        }
    }
}

impl fmt::Display for SemigroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemigroupDescriptor::Dyadic => f.write_str("dyadic"),
            SemigroupDescriptor::RationalMod(m) => write!(f, "mod:{m}"),
        }
    }
}

/// Parsed form of a `--grid` argument: `dyadic:N` or `mod:M:N`
/// (grid modulus `N` inside the semigroup of denominators dividing `M`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub desc: SemigroupDescriptor,
    pub modulus: u64,
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<GridSpec, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| {
            t.parse::<u64>()
                .map_err(|_| format!("bad integer {t:?} in grid {s:?}"))
        };
        match parts.as_slice() {
            ["dyadic", n] => Ok(GridSpec {
                desc: SemigroupDescriptor::Dyadic,
                modulus: num(n)?,
            }),
            ["mod", m] => {
                let m = num(m)?;
                Ok(GridSpec {
                    desc: SemigroupDescriptor::RationalMod(m),
                    modulus: m,
                })
            }
            ["mod", m, n] => Ok(GridSpec {
                desc: SemigroupDescriptor::RationalMod(num(m)?),
                modulus: num(n)?,
            }),
            _ => Err(format!("expected dyadic:N or mod:M[:N], got {s:?}")),
        }
    }
}

/// Result of adding two grid elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GridSum {
    Sum(Rat),
    OutOfWindow,
}

/// The grid `{k/N : 1 <= k, k/N <= delta_max}`.
///
/// Element `k/N` is addressed by its numerator `k`; index `0` is reserved
/// for the point `0` of `S ∪ {0}` in configurations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WindowGrid {
    desc: SemigroupDescriptor,
    modulus: u64,
    delta_max: Rat,
    size: usize,
}

impl WindowGrid {
    pub fn build(desc: SemigroupDescriptor, modulus: u64, delta_max: Rat) -> Result<WindowGrid> {
        if !desc.allows_modulus(modulus) {
            return Err(Error::IncompatibleModulus {
                kind: desc.to_string(),
                modulus,
            });
        }
        let size = delta_max.floor_times(modulus);
        if size == 0 {
            return Err(Error::EmptyGrid { modulus, delta_max });
        }
        if size > 1 << 20 {
            return Err(Error::GuardExceeded(format!("grid of {size} elements")));
        }
        Ok(WindowGrid {
            desc,
            modulus,
            delta_max,
            size: size as usize,
        })
    }

    /// Dyadic grid with `delta_max = 1`.
    pub fn dyadic(modulus: u64) -> Result<WindowGrid> {
        WindowGrid::build(SemigroupDescriptor::Dyadic, modulus, Rat::one())
    }

    pub fn from_spec(spec: GridSpec, delta_max: Rat) -> Result<WindowGrid> {
        WindowGrid::build(spec.desc, spec.modulus, delta_max)
    }

    pub fn descriptor(&self) -> SemigroupDescriptor {
        self.desc
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn delta_max(&self) -> &Rat {
        &self.delta_max
    }

    /// Number of grid elements.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn element(&self, k: usize) -> Rat {
        debug_assert!(k >= 1 && k <= self.size);
        Rat::new(k as u64, self.modulus)
    }

    pub fn elements(&self) -> impl Iterator<Item = Rat> + '_ {
        (1..=self.size).map(move |k| self.element(k))
    }

    /// Numerator of `r` over the modulus, if `r` is on the lattice `(1/N)Z`.
    pub fn lattice_numerator(&self, r: &Rat) -> Option<u64> {
        r.numerator_over(self.modulus)
    }

    /// Numerator `k` with `r = k/N`, for `r` a grid element.
    pub fn index_of(&self, r: &Rat) -> Result<usize> {
        match self.lattice_numerator(r) {
            Some(k) if k >= 1 && k as usize <= self.size => Ok(k as usize),
            _ => Err(Error::NotGridElement(r.clone())),
        }
    }

    /// Number of grid elements strictly below `delta` (clamped to the grid).
    pub fn count_below(&self, delta: &Rat) -> usize {
        let c = delta.ceil_times(self.modulus).saturating_sub(1);
        (c as usize).min(self.size)
    }

    /// Number of grid elements in `(0, delta]` (clamped to the grid).
    pub fn count_upto(&self, delta: &Rat) -> usize {
        (delta.floor_times(self.modulus) as usize).min(self.size)
    }

    /// `S ∩ (0, delta)` on the grid, ascending.
    pub fn window(&self, delta: &Rat) -> Result<Vec<Rat>> {
        if delta.is_zero() || delta > &self.delta_max {
            return Err(Error::OutOfRange {
                value: delta.clone(),
                delta_max: self.delta_max.clone(),
            });
        }
        Ok((1..=self.count_below(delta)).map(|k| self.element(k)).collect())
    }

    pub fn add(&self, a: &Rat, b: &Rat) -> Result<GridSum> {
        let ka = self.index_of(a)?;
        let kb = self.index_of(b)?;
        Ok(if ka + kb <= self.size {
            GridSum::Sum(self.element(ka + kb))
        } else {
            GridSum::OutOfWindow
        })
    }
}
