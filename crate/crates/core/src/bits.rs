//! Fixed-length bit vectors with word-level translation.

use std::fmt;

const W: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

impl Bits {
    pub fn new(len: usize) -> Bits {
        Bits {
            len,
            words: vec![0; len.div_ceil(W)],
        }
    }

    /// Ones on `lo..hi` (clamped to the length).
    pub fn range(len: usize, lo: usize, hi: usize) -> Bits {
        let mut b = Bits::new(len);
        for i in lo..hi.min(len) {
            b.set(i, true);
        }
        b
    }

    pub fn from_indices(len: usize, idx: impl IntoIterator<Item = usize>) -> Bits {
        let mut b = Bits::new(len);
        for i in idx {
            b.set(i, true);
        }
        b
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        i < self.len && (self.words[i / W] >> (i % W)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        let m = 1u64 << (i % W);
        if v {
            self.words[i / W] |= m;
        } else {
            self.words[i / W] &= !m;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn any(&self) -> bool {
        self.words.iter().any(|&w| w != 0)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * W + tz)
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.ones().next()
    }

    pub fn union_with(&mut self, other: &Bits) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &Bits) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &Bits) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn is_subset(&self, other: &Bits) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Bits) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    /// `out[i] = self[i + k]`; bits shifted past the end are zero.
    pub fn shift_down(&self, k: usize) -> Bits {
        let mut out = Bits::new(self.len);
        if k >= self.len {
            return out;
        }
        let (ws, bs) = (k / W, k % W);
        let n = self.words.len();
        for i in 0..n {
            let lo = self.words.get(i + ws).copied().unwrap_or(0);
            let hi = self.words.get(i + ws + 1).copied().unwrap_or(0);
            out.words[i] = if bs == 0 {
                lo
            } else {
                (lo >> bs) | (hi << (W - bs))
            };
        }
        out
    }

    /// `out[i + k] = self[i]`; bits shifted past the end are dropped.
    pub fn shift_up(&self, k: usize) -> Bits {
        let mut out = Bits::new(self.len);
        if k >= self.len {
            return out;
        }
        let (ws, bs) = (k / W, k % W);
        let n = self.words.len();
        for i in (0..n).rev() {
            if i < ws {
                break;
            }
            let lo = self.words[i - ws];
            let below = if i > ws { self.words[i - ws - 1] } else { 0 };
            out.words[i] = if bs == 0 {
                lo
            } else {
                (lo << bs) | (below >> (W - bs))
            };
        }
        out.mask_tail();
        out
    }

    /// The first `len` bits.
    pub fn truncated(&self, len: usize) -> Bits {
        Bits::from_indices(len.min(self.len), self.ones().take_while(|&i| i < len))
    }

    /// `len` bits starting at `start`, zero past the end.
    pub fn window(&self, start: usize, len: usize) -> Bits {
        Bits::from_indices(len, (0..len).filter(|&i| self.get(start + i)))
    }

    /// Length of the run of ones starting at `start`.
    pub fn run_from(&self, start: usize) -> usize {
        let mut i = start;
        while i < self.len && self.get(i) {
            i += 1;
        }
        i - start
    }

    fn mask_tail(&mut self) {
        let r = self.len % W;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}
