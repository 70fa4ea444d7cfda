//! Finite subsets of an ordered ground list, as bitmasks.
//!
//! Bit `i` stands for the `i`-th element of the enclosing ordered set `S`.
//! Subsets of `S` are enumerated in numeric bitmask order.

use std::fmt;

/// Hard ceiling on `|S|`: families over `S` are bitsets over `2^|S|` subsets
/// and must fit a `u64`.
pub const HARD_MAX_S: usize = 6;

/// Default configured ceiling on `|S|`.
pub const DEFAULT_MAX_S: usize = 5;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub const fn from_bits(bits: u32) -> Self {
        Subset(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub fn singleton(i: usize) -> Self {
        Subset(1 << i)
    }

    /// The whole ground list `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        Subset(((1u64 << n) - 1) as u32)
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> Self {
        Subset(self.0 | 1 << i)
    }

    pub fn without(self, i: usize) -> Self {
        Subset(self.0 & !(1 << i))
    }

    pub fn union(self, other: Self) -> Self {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        Subset(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Member indices in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i)
            }
        })
    }

    /// Every subset of `self`, in increasing bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = Subset> {
        let mask = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == mask {
                None
            } else {
                Some((cur | !mask).wrapping_add(1) & mask)
            };
            Some(Subset(cur))
        })
    }

    /// Packs `self ⊆ ground` into a mask over the positions of `ground`
    /// (bit `k` = the `k`-th smallest member of `ground`).
    pub fn to_local(self, ground: Subset) -> u32 {
        debug_assert!(self.is_subset_of(ground));
        let mut out = 0u32;
        for (k, i) in ground.iter().enumerate() {
            if self.contains(i) {
                out |= 1 << k;
            }
        }
        out
    }

    /// Inverse of [`Subset::to_local`].
    pub fn from_local(local: u32, ground: Subset) -> Subset {
        let mut out = 0u32;
        for (k, i) in ground.iter().enumerate() {
            if local >> k & 1 == 1 {
                out |= 1 << i;
            }
        }
        Subset(out)
    }
}

/// All subsets of an `n`-element ground list, in bitmask order.
pub fn all_subsets(n: usize) -> impl Iterator<Item = Subset> {
    Subset::full(n).subsets()
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
