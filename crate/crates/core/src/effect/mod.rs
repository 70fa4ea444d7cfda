//! Effect algebras: the partial sum `⊕`, its derived order, difference and
//! complement, plus the three carriers used throughout the crate.
//!
//! Undefined partial sums and differences are `None`, never errors. Errors
//! are reserved for malformed input (dangling identifiers, foreign elements).

mod lattice;
mod table;
mod tuple;

pub use lattice::{
    check_mv_identity, is_mv_effect_algebra, ChainElement, MvBasis, MvChainProduct, MvCheck,
};
pub use table::{
    validate_effect_algebra, ElemId, TableAxiom, TableDescription, TableEffectAlgebra,
    TableLattice, TableViolation, ValidationReport,
};
pub use tuple::{TupleEffect, TupleEffectAlgebra};

use std::fmt;
use std::hash::Hash;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoreError {
    #[error("unknown element identifier {0:?}")]
    UnknownElement(String),
    #[error("duplicate element identifier {0:?}")]
    DuplicateElement(String),
    #[error("conflicting sum entries for {a} ⊕ {b}")]
    ConflictingSum { a: String, b: String },
    #[error("element {0} does not belong to this algebra")]
    ForeignElement(String),
    #[error("table violates the effect algebra axioms: {0}")]
    NotEffectAlgebra(String),
    #[error("algebra is not lattice ordered: {a} and {b} have no {op}")]
    NotLattice {
        a: String,
        b: String,
        op: &'static str,
    },
    #[error("invalid interval embedding: {0}")]
    InvalidInterval(String),
    #[error("invalid algebra description: {0}")]
    InvalidDescription(String),
}

/// A partial algebra `(E; ⊕, 0, 1)` satisfying (E1)–(E4).
pub trait EffectAlgebra {
    type Elem: Clone + Eq + Hash + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;

    /// Whether `a` is a well-formed element of this algebra.
    fn contains(&self, a: &Self::Elem) -> bool;

    /// `a ⊕ b`, or `None` when `a` and `b` are not orthogonal.
    fn oplus(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem>;

    /// `b ⊖ a`, defined iff `a ≤ b`.
    fn ominus(&self, b: &Self::Elem, a: &Self::Elem) -> Option<Self::Elem>;

    /// The unique `a'` with `a ⊕ a' = 1`.
    fn complement(&self, a: &Self::Elem) -> Self::Elem;

    /// Short human-readable rendering used in reports.
    fn describe(&self, a: &Self::Elem) -> String;

    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.ominus(b, a).is_some()
    }

    fn orthogonal(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.oplus(a, b).is_some()
    }

    /// Left fold of `⊕` over a finite family; the empty family sums to `0`.
    fn big_oplus<'a, I>(&self, family: I) -> Option<Self::Elem>
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        family
            .into_iter()
            .try_fold(self.zero(), |acc, x| self.oplus(&acc, x))
    }

    /// [`EffectAlgebra::oplus`] with membership checks on both arguments.
    fn try_oplus(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Option<Self::Elem>, CoreError> {
        self.check_member(a)?;
        self.check_member(b)?;
        Ok(self.oplus(a, b))
    }

    /// [`EffectAlgebra::ominus`] with membership checks on both arguments.
    fn try_ominus(&self, b: &Self::Elem, a: &Self::Elem) -> Result<Option<Self::Elem>, CoreError> {
        self.check_member(a)?;
        self.check_member(b)?;
        Ok(self.ominus(b, a))
    }

    fn check_member(&self, a: &Self::Elem) -> Result<(), CoreError> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(CoreError::ForeignElement(format!("{a:?}")))
        }
    }
}

/// Effect algebras whose carrier can be listed.
pub trait FiniteEffectAlgebra: EffectAlgebra {
    /// Every element, in canonical order.
    fn elements(&self) -> Vec<Self::Elem>;
}

/// Lattice-ordered effect algebras.
pub trait LatticeEffectAlgebra: EffectAlgebra {
    fn meet(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn join(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// Evidence that this lattice-ordered algebra is an MV-effect algebra.
    fn certify_mv(&self) -> MvCheck<Self::Elem>;

    /// `⋀ items`, with `⋀∅ = 1`.
    fn big_meet<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items
            .into_iter()
            .fold(self.one(), |acc, x| self.meet(&acc, x))
    }

    /// `⋁ items`, with `⋁∅ = 0`.
    fn big_join<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items
            .into_iter()
            .fold(self.zero(), |acc, x| self.join(&acc, x))
    }
}
