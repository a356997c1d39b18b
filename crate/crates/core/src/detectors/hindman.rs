use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::sets::FSSeed;

/// Largest seed prefix the block oracle enumerates.
pub const MAX_BLOCK_SEED: usize = 20;

/// Pairwise disjoint index blocks whose sums `d_i` have a monochromatic
/// `FS(<d>_1^m)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSumWitness {
    /// 1-based seed indices, each block ascending.
    pub blocks: Vec<Vec<usize>>,
    pub sums: Vec<Rat>,
    pub color: u32,
}

/// Nonempty masks over `l` indices ordered by their ascending index vectors.
fn masks_in_lex_order(l: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity((1 << l) - 1);
    fn walk(start: usize, l: usize, mask: u32, out: &mut Vec<u32>) {
        for i in start..l {
            let m = mask | 1 << i;
            out.push(m);
            walk(i + 1, l, m, out);
        }
    }
    walk(0, l, 0, &mut out);
    out
}

/// Lexicographically least block family `X_1 < ... < X_m` (pairwise
/// disjoint, compared by index vectors) with every union of a nonempty
/// subfamily colored alike. `colors[mask]` colors the subset sum of `mask`.
pub fn monochromatic_blocks(l: usize, m: usize, colors: &[u32]) -> Option<(Vec<u32>, u32)> {
    let order = masks_in_lex_order(l);
    let mut picked: Vec<usize> = Vec::with_capacity(m);
    fn go(order: &[u32], colors: &[u32], m: usize, from: usize, picked: &mut Vec<usize>) -> bool {
        if picked.len() == m {
            return true;
        }
        let used = picked.iter().fold(0u32, |acc, &i| acc | order[i]);
        for j in from..order.len() {
            let x = order[j];
            if x & used != 0 {
                continue;
            }
            let c = colors[x as usize];
            if let Some(&first) = picked.first() {
                if colors[order[first] as usize] != c {
                    continue;
                }
            }
            // Unions of `x` with every nonempty subfamily already picked.
            let k = picked.len();
            let ok = (1u32..1 << k).all(|sub| {
                let u = (0..k).filter(|b| sub >> b & 1 == 1).fold(x, |acc, b| acc | order[picked[b]]);
                colors[u as usize] == c
            });
            if !ok {
                continue;
            }
            picked.push(j);
            if go(order, colors, m, j + 1, picked) {
                return true;
            }
            picked.pop();
        }
        false
    }
    if go(&order, colors, m, 0, &mut picked) {
        let blocks: Vec<u32> = picked.iter().map(|&i| order[i]).collect();
        let c = colors[blocks[0] as usize];
        Some((blocks, c))
    } else {
        None
    }
}

/// Finds `d_1, ..., d_m` as sums of `seed` over pairwise disjoint index
/// blocks of `1..=L` with `FS(<d>_1^m)` inside one color class of `coloring`
/// (colors `1..=r`), or `None` after exhausting every block family.
pub fn hindman_block_oracle(
    seed: &FSSeed,
    length: usize,
    coloring: impl Fn(&Rat) -> u32,
    m: usize,
) -> Result<Option<BlockSumWitness>> {
    if length == 0 || length > MAX_BLOCK_SEED || length > seed.len() {
        return Err(Error::GuardExceeded(format!(
            "block oracle length {length} (seed {}, max {MAX_BLOCK_SEED})",
            seed.len()
        )));
    }
    if !(1..=3).contains(&m) {
        return Err(Error::GuardExceeded(format!("block count {m} outside 1..=3")));
    }
    let terms = &seed.terms()[..length];
    let sum_of = |mask: u32| -> Rat {
        (0..length)
            .filter(|i| mask >> i & 1 == 1)
            .fold(Rat::zero(), |acc, i| acc + terms[i].clone())
    };
    let mut colors = vec![0u32; 1 << length];
    for (mask, c) in colors.iter_mut().enumerate().skip(1) {
        *c = coloring(&sum_of(mask as u32));
    }
    Ok(monochromatic_blocks(length, m, &colors).map(|(blocks, color)| BlockSumWitness {
        blocks: blocks
            .iter()
            .map(|&b| (0..length).filter(|i| b >> i & 1 == 1).map(|i| i + 1).collect())
            .collect(),
        sums: blocks.iter().map(|&b| sum_of(b)).collect(),
        color,
    }))
}
