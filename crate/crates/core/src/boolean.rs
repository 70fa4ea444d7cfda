//! Finite powerset Boolean algebras `2^(2^A)`, the embeddings
//! `g^A_B : 2^(2^A) → 2^(2^B)`, and the direct limit over the finite subsets
//! of `S`.
//!
//! A [`SubsetFamily`] over a ground set `A ⊆ S` is a bitset over the `2^|A|`
//! subsets of `A`: bit `m` is set when the subset with local characteristic
//! mask `m` (bit `k` = the `k`-th member of `A` in `S` order) is a member.
//!
//! Since `S` is finite the direct limit collapses onto its top index: every
//! pair `(𝕏, A)` is canonicalized to `g^A_S(𝕏)`. The pairwise operations at
//! index `A ∪ B` are kept as well so the limit construction can be checked
//! step by step.

use crate::subset::{Subset, HARD_MAX_S};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BooleanError {
    #[error("ground set {inner:?} is not contained in {outer:?}")]
    NotContained { inner: Subset, outer: Subset },
    #[error("ground set has {0} elements, more than the supported {HARD_MAX_S}")]
    GroundTooLarge(usize),
    #[error("family mask {members:#x} has bits outside the 2^{size} subsets of its ground set")]
    StrayBits { members: u64, size: usize },
    #[error("families are grounded on different sets {0:?} and {1:?}")]
    GroundMismatch(Subset, Subset),
}

/// The powerset Boolean algebra on `atoms` atoms; elements are `u64` masks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiniteBooleanAlgebra {
    atoms: u32,
}

impl FiniteBooleanAlgebra {
    pub fn new(atoms: u32) -> Self {
        assert!(atoms <= 64, "at most 64 atoms");
        FiniteBooleanAlgebra { atoms }
    }

    pub fn atoms(&self) -> u32 {
        self.atoms
    }

    /// Number of elements, `2^atoms`, saturating at `u64::MAX`.
    pub fn size(&self) -> u64 {
        1u64.checked_shl(self.atoms).unwrap_or(u64::MAX)
    }

    pub fn bottom(&self) -> u64 {
        0
    }

    pub fn top(&self) -> u64 {
        if self.atoms == 64 {
            u64::MAX
        } else {
            (1u64 << self.atoms) - 1
        }
    }

    pub fn contains(&self, x: u64) -> bool {
        x & !self.top() == 0
    }

    pub fn complement(&self, x: u64) -> u64 {
        !x & self.top()
    }

    /// Every element in increasing mask order. Only sensible for small
    /// algebras.
    pub fn elements(&self) -> impl Iterator<Item = u64> {
        let top = self.top();
        (0..=top).take_while(move |&x| x <= top)
    }
}

/// `𝕏 ⊆ 2^A`, an element of `2^(2^A)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SubsetFamily {
    ground: Subset,
    members: u64,
}

impl SubsetFamily {
    pub fn new(ground: Subset, members: u64) -> Result<Self, BooleanError> {
        let algebra = Self::algebra_over(ground)?;
        if !algebra.contains(members) {
            return Err(BooleanError::StrayBits {
                members,
                size: ground.len(),
            });
        }
        Ok(SubsetFamily { ground, members })
    }

    fn algebra_over(ground: Subset) -> Result<FiniteBooleanAlgebra, BooleanError> {
        if ground.len() > HARD_MAX_S {
            return Err(BooleanError::GroundTooLarge(ground.len()));
        }
        Ok(FiniteBooleanAlgebra::new(1 << ground.len()))
    }

    pub fn empty(ground: Subset) -> Self {
        SubsetFamily { ground, members: 0 }
    }

    /// `2^A`, the top of `2^(2^A)`.
    pub fn full(ground: Subset) -> Self {
        let top = FiniteBooleanAlgebra::new(1 << ground.len()).top();
        SubsetFamily {
            ground,
            members: top,
        }
    }

    /// The family containing exactly the given subsets of `ground`.
    pub fn from_subsets<I>(ground: Subset, subsets: I) -> Result<Self, BooleanError>
    where
        I: IntoIterator<Item = Subset>,
    {
        Self::algebra_over(ground)?;
        let mut members = 0u64;
        for x in subsets {
            if !x.is_subset_of(ground) {
                return Err(BooleanError::NotContained {
                    inner: x,
                    outer: ground,
                });
            }
            members |= 1 << x.to_local(ground);
        }
        Ok(SubsetFamily { ground, members })
    }

    pub fn ground(&self) -> Subset {
        self.ground
    }

    pub fn members(&self) -> u64 {
        self.members
    }

    pub fn len(&self) -> usize {
        self.members.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.members == 0
    }

    pub fn contains(&self, x: Subset) -> bool {
        x.is_subset_of(self.ground) && self.members >> x.to_local(self.ground) & 1 == 1
    }

    /// Member subsets of `S`, in increasing local mask order.
    pub fn iter(&self) -> impl Iterator<Item = Subset> + '_ {
        let mut rest = self.members;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let local = rest.trailing_zeros();
            rest &= rest - 1;
            Some(Subset::from_local(local, self.ground))
        })
    }

    fn same_ground(&self, other: &Self) -> Result<(), BooleanError> {
        if self.ground == other.ground {
            Ok(())
        } else {
            Err(BooleanError::GroundMismatch(self.ground, other.ground))
        }
    }

    pub fn union(&self, other: &Self) -> Result<Self, BooleanError> {
        self.same_ground(other)?;
        Ok(SubsetFamily {
            ground: self.ground,
            members: self.members | other.members,
        })
    }

    pub fn intersection(&self, other: &Self) -> Result<Self, BooleanError> {
        self.same_ground(other)?;
        Ok(SubsetFamily {
            ground: self.ground,
            members: self.members & other.members,
        })
    }

    pub fn complement(&self) -> Self {
        let full = SubsetFamily::full(self.ground);
        SubsetFamily {
            ground: self.ground,
            members: full.members & !self.members,
        }
    }

    /// Every family over `ground`, in increasing mask order.
    pub fn all_over(ground: Subset) -> impl Iterator<Item = SubsetFamily> {
        let top = SubsetFamily::full(ground).members;
        (0..=top).map(move |members| SubsetFamily { ground, members })
    }
}

/// `g^A_B(𝕏) = {X ∪ C₀ : X ∈ 𝕏, C₀ ⊆ B ∖ A}` where `A` is `fam`'s ground.
pub fn g_embed(fam: &SubsetFamily, outer: Subset) -> Result<SubsetFamily, BooleanError> {
    let inner = fam.ground;
    if !inner.is_subset_of(outer) {
        return Err(BooleanError::NotContained { inner, outer });
    }
    if outer.len() > HARD_MAX_S {
        return Err(BooleanError::GroundTooLarge(outer.len()));
    }
    let pad = outer.difference(inner);
    let mut members = 0u64;
    for x in fam.iter() {
        for c0 in pad.subsets() {
            members |= 1 << x.union(c0).to_local(outer);
        }
    }
    Ok(SubsetFamily {
        ground: outer,
        members,
    })
}

/// `(𝕏, A) ≡ (𝕐, B)` iff `g^A_{A∪B}(𝕏) = g^B_{A∪B}(𝕐)`.
pub fn equiv(x: &SubsetFamily, y: &SubsetFamily) -> bool {
    let ground = x.ground.union(y.ground);
    match (g_embed(x, ground), g_embed(y, ground)) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    }
}

/// Join of two pairs at index `A ∪ B`.
pub fn pair_join(x: &SubsetFamily, y: &SubsetFamily) -> Result<SubsetFamily, BooleanError> {
    let ground = x.ground.union(y.ground);
    g_embed(x, ground)?.union(&g_embed(y, ground)?)
}

/// Meet of two pairs at index `A ∪ B`.
pub fn pair_meet(x: &SubsetFamily, y: &SubsetFamily) -> Result<SubsetFamily, BooleanError> {
    let ground = x.ground.union(y.ground);
    g_embed(x, ground)?.intersection(&g_embed(y, ground)?)
}

/// An element of the direct limit `F_B(S)`, stored as its image over `S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LimitElement {
    repr: SubsetFamily,
}

impl LimitElement {
    pub fn representative(&self) -> &SubsetFamily {
        &self.repr
    }
}

/// The direct limit of `(2^(2^A) : A ⊆ S)` for a finite `S` of size `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LimitAlgebra {
    s: Subset,
}

impl LimitAlgebra {
    pub fn new(n: usize) -> Result<Self, BooleanError> {
        if n > HARD_MAX_S {
            return Err(BooleanError::GroundTooLarge(n));
        }
        Ok(LimitAlgebra { s: Subset::full(n) })
    }

    pub fn ground(&self) -> Subset {
        self.s
    }

    /// The limit algebra as a plain powerset algebra whose atoms are the
    /// subsets of `S`.
    pub fn as_powerset(&self) -> FiniteBooleanAlgebra {
        FiniteBooleanAlgebra::new(1 << self.s.len())
    }

    /// The class of `(𝕏, A)`, represented by `g^A_S(𝕏)`.
    pub fn canonical(&self, fam: &SubsetFamily) -> Result<LimitElement, BooleanError> {
        Ok(LimitElement {
            repr: g_embed(fam, self.s)?,
        })
    }

    pub fn bottom(&self) -> LimitElement {
        LimitElement {
            repr: SubsetFamily::empty(self.s),
        }
    }

    pub fn top(&self) -> LimitElement {
        LimitElement {
            repr: SubsetFamily::full(self.s),
        }
    }

    pub fn join(&self, x: &LimitElement, y: &LimitElement) -> LimitElement {
        LimitElement {
            repr: x.repr.union(&y.repr).expect("canonical forms share S"),
        }
    }

    pub fn meet(&self, x: &LimitElement, y: &LimitElement) -> LimitElement {
        LimitElement {
            repr: x
                .repr
                .intersection(&y.repr)
                .expect("canonical forms share S"),
        }
    }

    pub fn complement(&self, x: &LimitElement) -> LimitElement {
        LimitElement {
            repr: x.repr.complement(),
        }
    }
}
