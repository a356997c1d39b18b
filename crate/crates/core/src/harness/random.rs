//! Seeded random instances on a grid.

use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::rng::Rng;
use crate::semigroup::WindowGrid;
use crate::sets::{FSSeed, SetSpec};

fn grid_point(rng: &mut Rng, grid: &WindowGrid, upto: usize) -> Rat {
    grid.element(rng.range(1, upto.clamp(1, grid.size()) as u64) as usize)
}

/// `Pattern(p, R)` with `2 <= p <= max_period` and `R` a nonempty proper
/// subset of the residues.
pub fn random_pattern(rng: &mut Rng, max_period: u64) -> SetSpec {
    let period = rng.range(2, max_period.max(2));
    let mask = rng.range(1, (1 << period) - 2);
    SetSpec::Pattern {
        period,
        residues: (0..period).filter(|r| mask >> r & 1 == 1).collect(),
    }
}

/// Grid seed of `len` terms with `x_n <= bound 2^-n` and distinct subset
/// sums, by rejection.
pub fn random_seed(rng: &mut Rng, grid: &WindowGrid, len: usize, bound: &Rat) -> Result<FSSeed> {
    let caps: Vec<u64> = (1..=len)
        .map(|n| (bound * &Rat::pow2_inv(n as u32)).floor_times(grid.modulus()))
        .collect();
    if caps.contains(&0) {
        return Err(Error::InvalidSeed(format!(
            "bound {bound} leaves no grid point for {len} terms at modulus {}",
            grid.modulus()
        )));
    }
    for _ in 0..10_000 {
        let xs: Vec<Rat> = caps
            .iter()
            .map(|&c| Rat::new(rng.range(1, c), grid.modulus()))
            .collect();
        if let Ok(seed) = FSSeed::new(xs, bound.clone()) {
            return Ok(seed);
        }
    }
    Err(Error::InvalidSeed(format!("no distinct-sum seed of length {len} under {bound}")))
}

fn random_leaf(rng: &mut Rng, grid: &WindowGrid) -> SetSpec {
    let n = grid.size();
    match rng.below(4) {
        0 => {
            let density = rng.range(1, 7);
            SetSpec::Explicit((1..=n).filter(|_| rng.chance(density, 8)).map(|k| grid.element(k)).collect())
        }
        1 => random_pattern(rng, 8),
        2 => {
            let len = rng.range(1, 4) as usize;
            let terms = (0..len).map(|_| grid_point(rng, grid, n / 4)).collect();
            SetSpec::FiniteSums(terms)
        }
        _ => {
            let k = rng.range(1, 8);
            SetSpec::Explicit((1..=n).filter(|i| i % 8 == k as usize % 8 || *i as u64 <= k).map(|i| grid.element(i)).collect())
        }
    }
}

/// A random set description of nesting depth at most two.
pub fn random_setspec(rng: &mut Rng, grid: &WindowGrid) -> SetSpec {
    let leaf = random_leaf(rng, grid);
    match rng.below(6) {
        0 => SetSpec::union(leaf, random_leaf(rng, grid)),
        1 => SetSpec::intersect(leaf, random_leaf(rng, grid)),
        2 => SetSpec::shift(grid_point(rng, grid, grid.size() / 8), leaf),
        3 => SetSpec::window(leaf, grid_point(rng, grid, grid.size())),
        4 => SetSpec::complement(leaf),
        _ => leaf,
    }
}
