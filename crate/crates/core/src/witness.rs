//! Witness mappings `β : Fin(S) → E` on interval effect algebras and their
//! inclusion–exclusion differences
//! `D_β(X, A) = Σ_{X⊆Z⊆A} (-1)^{|X|+|Z|} β(Z)`, computed in the ambient group.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::csm::{Csm, CsmDomain, CsmError, DTable};
use crate::effect::{
    ChainElement, EffectAlgebra, ElemId, MvChainProduct, TableEffectAlgebra, TableLattice,
    TupleEffect, TupleEffectAlgebra,
};
use crate::rational::Rational;
use crate::subset::{all_subsets, Subset};

/// An element of `Q^n` with componentwise order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupElement(pub Vec<Rational>);

impl GroupElement {
    pub fn zero(dim: usize) -> Self {
        GroupElement(vec![Rational::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `x ≥ 0` componentwise.
    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|x| !x.is_negative())
    }

    pub fn leq(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
            write!(f, "({})", parts.join(", "))
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Add<&GroupElement> for &GroupElement {
    type Output = GroupElement;
    fn add(self, rhs: &GroupElement) -> GroupElement {
        GroupElement(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub<&GroupElement> for &GroupElement {
    type Output = GroupElement;
    fn sub(self, rhs: &GroupElement) -> GroupElement {
        GroupElement(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &GroupElement {
    type Output = GroupElement;
    fn neg(self) -> GroupElement {
        GroupElement(self.0.iter().map(|a| -a).collect())
    }
}

/// Effect algebras that may be presented as an interval `[0, u]_G`.
pub trait IntervalEffectAlgebra: EffectAlgebra {
    /// Dimension of the ambient group, or `None` if no embedding is known.
    fn group_dim(&self) -> Option<usize>;

    /// The canonical embedding of `[0, u]_G` into `G`.
    fn embed(&self, a: &Self::Elem) -> Option<GroupElement>;
}

impl IntervalEffectAlgebra for TupleEffectAlgebra {
    fn group_dim(&self) -> Option<usize> {
        Some(self.dim)
    }

    fn embed(&self, a: &TupleEffect) -> Option<GroupElement> {
        Some(GroupElement(a.coords.clone()))
    }
}

impl IntervalEffectAlgebra for MvChainProduct {
    fn group_dim(&self) -> Option<usize> {
        Some(self.orders().len())
    }

    fn embed(&self, a: &ChainElement) -> Option<GroupElement> {
        Some(GroupElement(self.to_rationals(a)))
    }
}

impl IntervalEffectAlgebra for TableEffectAlgebra {
    fn group_dim(&self) -> Option<usize> {
        self.interval_coords(self.zero()).map(<[Rational]>::len)
    }

    fn embed(&self, a: &ElemId) -> Option<GroupElement> {
        self.interval_coords(*a).map(|c| GroupElement(c.to_vec()))
    }
}

impl IntervalEffectAlgebra for TableLattice {
    fn group_dim(&self) -> Option<usize> {
        self.table().group_dim()
    }

    fn embed(&self, a: &ElemId) -> Option<GroupElement> {
        self.table().embed(a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WitnessError {
    #[error("the algebra is not tagged as an interval effect algebra")]
    NotInterval,
    #[error("witness table has {got} entries, expected {expected}")]
    TableSize { got: usize, expected: usize },
    #[error("value of β({0}) is not an element of the algebra")]
    ValueOutsideAlgebra(String),
    #[error(transparent)]
    Csm(#[from] CsmError),
}

/// A mapping `β : Fin(S) → E`, stored as `2^|S|` values indexed by mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessMapping<E> {
    domain: CsmDomain<E>,
    values: Vec<E>,
}

impl<E: Clone + Eq + fmt::Debug> WitnessMapping<E> {
    pub fn new<A: EffectAlgebra<Elem = E>>(
        alg: &A,
        domain: CsmDomain<E>,
        values: Vec<E>,
    ) -> Result<Self, WitnessError> {
        let expected = 1usize << domain.len();
        if values.len() != expected {
            return Err(WitnessError::TableSize {
                got: values.len(),
                expected,
            });
        }
        if let Some(i) = values.iter().position(|v| !alg.contains(v)) {
            return Err(WitnessError::ValueOutsideAlgebra(
                domain.show(alg, Subset::from_bits(i as u32)),
            ));
        }
        Ok(WitnessMapping { domain, values })
    }

    pub fn from_fn(domain: CsmDomain<E>, f: impl FnMut(Subset) -> E) -> Self {
        let values = all_subsets(domain.len()).map(f).collect();
        WitnessMapping { domain, values }
    }

    pub fn domain(&self) -> &CsmDomain<E> {
        &self.domain
    }

    /// `β(X)`.
    pub fn value(&self, x: Subset) -> &E {
        &self.values[x.bits() as usize]
    }

    pub fn values(&self) -> &[E] {
        &self.values
    }

    pub fn with_value(mut self, x: Subset, value: E) -> Self {
        self.values[x.bits() as usize] = value;
        self
    }
}

/// `β` embedded into the ambient group, mask by mask.
fn embedded<A: IntervalEffectAlgebra>(
    alg: &A,
    beta: &WitnessMapping<A::Elem>,
) -> Result<Vec<GroupElement>, WitnessError> {
    beta.values
        .iter()
        .map(|v| alg.embed(v).ok_or(WitnessError::NotInterval))
        .collect()
}

fn closed_form(g: &[GroupElement], dim: usize, x: Subset, a: Subset) -> GroupElement {
    // Z = X ∪ Y with Y ⊆ A ∖ X, so the sign is (-1)^|Y|
    a.difference(x)
        .subsets()
        .fold(GroupElement::zero(dim), |acc, y| {
            let term = &g[x.union(y).bits() as usize];
            if y.len() % 2 == 0 {
                &acc + term
            } else {
                &acc - term
            }
        })
}

fn recursive(g: &[GroupElement], x: Subset, a: Subset) -> GroupElement {
    let free = a.difference(x);
    match free.iter().last() {
        None => g[x.bits() as usize].clone(),
        // D(X, A) = D(X, A∖c) - D(X∪c, A)
        Some(c) => &recursive(g, x, a.without(c)) - &recursive(g, x.with(c), a),
    }
}

fn check_pair(x: Subset, a: Subset) {
    assert!(x.is_subset_of(a), "D_beta needs X ⊆ A, got {x:?} and {a:?}");
}

/// `D_β(X, A)` by the alternating sum over `X ⊆ Z ⊆ A`.
///
/// Panics if `X ⊄ A`.
pub fn d_beta<A: IntervalEffectAlgebra>(
    alg: &A,
    beta: &WitnessMapping<A::Elem>,
    x: Subset,
    a: Subset,
) -> Result<GroupElement, WitnessError> {
    check_pair(x, a);
    let dim = alg.group_dim().ok_or(WitnessError::NotInterval)?;
    Ok(closed_form(&embedded(alg, beta)?, dim, x, a))
}

/// `D_β(X, A)` via `D_β(X, A) = D_β(X, A∖{c}) - D_β(X∪{c}, A)`.
pub fn d_beta_recursive<A: IntervalEffectAlgebra>(
    alg: &A,
    beta: &WitnessMapping<A::Elem>,
    x: Subset,
    a: Subset,
) -> Result<GroupElement, WitnessError> {
    check_pair(x, a);
    alg.group_dim().ok_or(WitnessError::NotInterval)?;
    Ok(recursive(&embedded(alg, beta)?, x, a))
}

/// Every `D_β(X, A)` for `X ⊆ A ⊆ S`, keyed by `(A << n) | X`.
pub struct DBetaTable {
    n: usize,
    values: Vec<Option<GroupElement>>,
}

impl DBetaTable {
    pub fn new<A: IntervalEffectAlgebra>(
        alg: &A,
        beta: &WitnessMapping<A::Elem>,
    ) -> Result<Self, WitnessError> {
        let dim = alg.group_dim().ok_or(WitnessError::NotInterval)?;
        let g = embedded(alg, beta)?;
        let n = beta.domain.len();
        let mut values = vec![None; 1 << (2 * n)];
        for a in all_subsets(n) {
            for x in a.subsets() {
                values[(a.bits() as usize) << n | x.bits() as usize] =
                    Some(closed_form(&g, dim, x, a));
            }
        }
        Ok(DBetaTable { n, values })
    }

    pub fn get(&self, x: Subset, a: Subset) -> &GroupElement {
        check_pair(x, a);
        self.values[(a.bits() as usize) << self.n | x.bits() as usize]
            .as_ref()
            .expect("filled for X ⊆ A")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegativeDifference {
    pub x: Subset,
    pub a: Subset,
    pub value: GroupElement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessReport {
    /// `β(∅) = 1`
    pub a1: bool,
    /// Indices `c` of `S` with `β({c}) ≠ c`.
    pub a2_failures: Vec<usize>,
    /// Pairs `(X, A)` with `D_β(X, A) ≱ 0`.
    pub a3_failures: Vec<NegativeDifference>,
    /// `|I(Fin(S))| = 3^|S|`.
    pub pairs_checked: usize,
}

impl WitnessReport {
    pub fn a2(&self) -> bool {
        self.a2_failures.is_empty()
    }

    pub fn a3(&self) -> bool {
        self.a3_failures.is_empty()
    }

    pub fn holds(&self) -> bool {
        self.a1 && self.a2() && self.a3()
    }
}

/// Checks (A1), (A2) and (A3) over every `X ⊆ A ⊆ S`.
pub fn verify_witness<A: IntervalEffectAlgebra>(
    alg: &A,
    beta: &WitnessMapping<A::Elem>,
) -> Result<WitnessReport, WitnessError> {
    let table = DBetaTable::new(alg, beta)?;
    let domain = &beta.domain;
    let n = domain.len();
    let a2_failures = (0..n)
        .filter(|&i| beta.value(Subset::singleton(i)) != domain.element(i))
        .collect();
    let mut report = WitnessReport {
        a1: *beta.value(Subset::EMPTY) == alg.one(),
        a2_failures,
        a3_failures: Vec::new(),
        pairs_checked: 0,
    };
    for a in all_subsets(n) {
        for x in a.subsets() {
            report.pairs_checked += 1;
            let d = table.get(x, a);
            if !d.is_nonnegative() {
                report.a3_failures.push(NegativeDifference {
                    x,
                    a,
                    value: d.clone(),
                });
            }
        }
    }
    Ok(report)
}

/// `β(X) = ⟨X|{1}⟩`.
pub fn witness_from_csm<A: IntervalEffectAlgebra>(
    alg: &A,
    csm: &Csm<A::Elem>,
) -> Result<WitnessMapping<A::Elem>, WitnessError> {
    alg.group_dim().ok_or(WitnessError::NotInterval)?;
    let domain = csm.domain().clone();
    Ok(WitnessMapping::from_fn(domain, |x| {
        csm.top_value(x).clone()
    }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DMismatch {
    pub x: Subset,
    pub a: Subset,
    /// `D(X, A)` embedded into `G`; `None` when the difference is undefined.
    pub d: Option<GroupElement>,
    pub d_beta: GroupElement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DEqualityReport {
    pub pairs_checked: usize,
    pub mismatch: Option<DMismatch>,
}

impl DEqualityReport {
    pub fn holds(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Compares `D(X, A)` from the mapping with `D_β(X, A)` on all of
/// `I(Fin(S))`, stopping at the first mismatch.
pub fn check_d_equality<A: IntervalEffectAlgebra>(
    alg: &A,
    csm: &Csm<A::Elem>,
    beta: &WitnessMapping<A::Elem>,
) -> Result<DEqualityReport, WitnessError> {
    if beta.domain.elements() != csm.domain().elements() {
        return Err(CsmError::NotSubset(
            "the witness and the mapping are defined on different S".into(),
        )
        .into());
    }
    let d = DTable::new(alg, csm);
    let table = DBetaTable::new(alg, beta)?;
    let n = beta.domain.len();
    let mut report = DEqualityReport {
        pairs_checked: 0,
        mismatch: None,
    };
    for a in all_subsets(n) {
        for x in a.subsets() {
            report.pairs_checked += 1;
            let lhs = d.get(x, a).and_then(|e| alg.embed(e));
            let rhs = table.get(x, a);
            if lhs.as_ref() != Some(rhs) {
                report.mismatch = Some(DMismatch {
                    x,
                    a,
                    d: lhs,
                    d_beta: rhs.clone(),
                });
                return Ok(report);
            }
        }
    }
    Ok(report)
}
