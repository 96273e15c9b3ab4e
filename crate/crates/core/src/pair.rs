//! Row-major triangular indexing of unordered pairs.
//!
//! Pairs `(first, second)` with `1 <= first < second <= size` are numbered
//! `1..=size*(size-1)/2` in lexicographic order. Attractor pairs and node
//! pairs both use this numbering; a pair of attractors is identified by its
//! flat index everywhere in the crate.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairIndex {
    pub first: usize,
    pub second: usize,
    pub size: usize,
    pub flat: usize,
}

/// Number of unordered pairs over `size` items.
#[inline]
pub const fn pair_count(size: usize) -> usize {
    size * size.saturating_sub(1) / 2
}

/// 0-based flat position of the 0-based pair `(i, j)`, `i < j < size`.
#[inline]
pub(crate) fn flat0(i: usize, j: usize, size: usize) -> usize {
    debug_assert!(i < j && j < size);
    i * size - i * (i + 1) / 2 + j - i - 1
}

/// 1-based flat index of the 1-based pair `(i1, i2)`.
pub fn triangular_index(i1: usize, i2: usize, size: usize) -> Result<PairIndex> {
    PairIndex::new(i1, i2, size)
}

impl PairIndex {
    pub fn new(first: usize, second: usize, size: usize) -> Result<Self> {
        if first == 0 || first >= second || second > size {
            return Err(Error::InvalidPair {
                first,
                second,
                size,
            });
        }
        let flat = (first - 1) * size - first * (first - 1) / 2 + second - first;
        Ok(PairIndex {
            first,
            second,
            size,
            flat,
        })
    }

    /// Inverse of [`PairIndex::new`].
    pub fn from_flat(flat: usize, size: usize) -> Result<Self> {
        let total = pair_count(size);
        if flat == 0 || flat > total {
            return Err(Error::InvalidPair {
                first: 0,
                second: flat,
                size,
            });
        }
        let mut offset = flat;
        for first in 1..size {
            let row = size - first;
            if offset <= row {
                return PairIndex::new(first, first + offset, size);
            }
            offset -= row;
        }
        unreachable!("flat index within range always resolves")
    }

    /// 0-based row of this pair in a pair-indexed matrix.
    #[inline]
    pub fn row(&self) -> usize {
        self.flat - 1
    }

    /// 0-based members.
    #[inline]
    pub fn members(&self) -> (usize, usize) {
        (self.first - 1, self.second - 1)
    }
}

/// All 0-based pairs `(i, j)`, `i < j < size`, in flat order.
pub fn pairs(size: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..size).flat_map(move |i| (i + 1..size).map(move |j| (i, j)))
}
