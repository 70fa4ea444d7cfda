//! Compatibility support mappings `⟨U|V⟩ : Fin(S) × Fin(S) → E`.
//!
//! Every mapping is materialized as a table over all `2^|S| × 2^|S|` pairs of
//! subsets of `S`, indexed by bitmask over the fixed order of `S`. The
//! closed-form constructors fill that table once; [`CsmForm`] records where
//! the values came from.

mod laws;
mod reverse;
mod strong;
mod verify;

pub use laws::{law_suite, LawCheck};
pub use reverse::{
    all_preimage_choices, csm_from_observable, csm_from_observable_sweep, preimages, PreimagePolicy,
};
pub use strong::{reconstruct_from_d, strong_property_suite, Reconstructor};
pub use verify::{verify_csm, verify_strong, Axiom, AxiomCheck, AxiomReport, Violation};

use std::fmt;

use serde::Serialize;

use crate::effect::{EffectAlgebra, LatticeEffectAlgebra, TupleEffect, TupleEffectAlgebra};
use crate::subset::{all_subsets, Subset, HARD_MAX_S};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CsmError {
    #[error("element {0} appears twice in S")]
    DuplicateElement(String),
    #[error("element {0} of S does not belong to the algebra")]
    ForeignElement(String),
    #[error("|S| = {size} exceeds the configured cap of {cap}")]
    TooLarge { size: usize, cap: usize },
    #[error("algebra is not an MV-effect algebra: {a} ∧ {b} = 0 but {a} ≰ {b}'")]
    NotMv { a: String, b: String },
    #[error("value of ⟨{u}|{v}⟩ is not an element of the algebra")]
    ValueOutsideAlgebra { u: String, v: String },
    #[error("table has {got} entries, expected {expected}")]
    TableSize { got: usize, expected: usize },
    #[error(
        "axiom breach: D({x}, {a}) is undefined because ⟨X|A∖X⟩ ≰ ⟨X|{{1}}⟩, so (b) or (a) fails"
    )]
    AxiomBreach { x: String, a: String },
    #[error("{0}")]
    NotSubset(String),
    #[error("mapping is not strong: (e*) fails at U={u}, V={v}, c={c}")]
    NotStrong { u: String, v: String, c: String },
    #[error("{0} is not in the range of the observable")]
    NotInRange(String),
    #[error("observable is not additive: α({0:#x}) is undefined")]
    ObservableUndefined(u64),
    #[error("{0}")]
    Observable(String),
    #[error("preimage sweep would visit {0} choices, above the limit")]
    TooManyChoices(u128),
}

/// The ordered set `S ⊆ E` a mapping is defined on; always contains `1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsmDomain<E> {
    elements: Vec<E>,
    unit: usize,
    unit_adjoined: bool,
}

impl<E: Clone + Eq + fmt::Debug> CsmDomain<E> {
    /// Validates `elements` and adjoins `1` at the end when it is missing.
    pub fn new<A>(alg: &A, elements: Vec<E>, max_s: usize) -> Result<Self, CsmError>
    where
        A: EffectAlgebra<Elem = E>,
    {
        let mut elements = elements;
        for (i, e) in elements.iter().enumerate() {
            if !alg.contains(e) {
                return Err(CsmError::ForeignElement(format!("{e:?}")));
            }
            if elements[..i].contains(e) {
                return Err(CsmError::DuplicateElement(alg.describe(e)));
            }
        }
        let one = alg.one();
        let (unit, unit_adjoined) = match elements.iter().position(|e| *e == one) {
            Some(i) => (i, false),
            None => {
                elements.push(one);
                (elements.len() - 1, true)
            }
        };
        let cap = max_s.min(HARD_MAX_S);
        if elements.len() > cap {
            return Err(CsmError::TooLarge {
                size: elements.len(),
                cap,
            });
        }
        Ok(CsmDomain {
            elements,
            unit,
            unit_adjoined,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[E] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &E {
        &self.elements[i]
    }

    pub fn unit_index(&self) -> usize {
        self.unit
    }

    /// `{1}` as a subset of `S`.
    pub fn unit_set(&self) -> Subset {
        Subset::singleton(self.unit)
    }

    /// Whether `1` had to be adjoined to the supplied elements.
    pub fn unit_adjoined(&self) -> bool {
        self.unit_adjoined
    }

    pub fn full(&self) -> Subset {
        Subset::full(self.len())
    }

    pub fn index_of(&self, e: &E) -> Option<usize> {
        self.elements.iter().position(|x| x == e)
    }

    /// The subset of `S` made of `items`.
    pub fn subset_of<'a, I>(&self, items: I) -> Result<Subset, CsmError>
    where
        I: IntoIterator<Item = &'a E>,
        E: 'a,
    {
        items.into_iter().try_fold(Subset::EMPTY, |acc, e| {
            self.index_of(e)
                .map(|i| acc.with(i))
                .ok_or_else(|| CsmError::NotSubset(format!("{e:?} is not in S")))
        })
    }

    pub fn members(&self, s: Subset) -> impl Iterator<Item = &E> + '_ {
        s.iter().map(move |i| &self.elements[i])
    }

    /// `{a, b}` rendered with the algebra's element names.
    pub fn show<A: EffectAlgebra<Elem = E>>(&self, alg: &A, s: Subset) -> String {
        let parts: Vec<String> = self.members(s).map(|e| alg.describe(e)).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// Where the values of a [`Csm`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CsmForm {
    /// `⟨U|V⟩ = (⋀U) ∧ (⋁V)` in an MV-effect algebra.
    JoinMeet,
    /// `⟨U|V⟩ = (⨅U).(⨆V)` over commuting effects.
    Product,
    Table,
    /// Built from an observable by choosing preimages.
    ObservableDerived,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Csm<E> {
    domain: CsmDomain<E>,
    form: CsmForm,
    values: Vec<E>,
}

impl<E: Clone + Eq + fmt::Debug> Csm<E> {
    fn index(n: usize, u: Subset, v: Subset) -> usize {
        (u.bits() as usize) << n | v.bits() as usize
    }

    /// Tabulates `f` on every pair of subsets of `S`.
    pub fn from_fn(
        domain: CsmDomain<E>,
        form: CsmForm,
        mut f: impl FnMut(Subset, Subset) -> E,
    ) -> Self {
        let n = domain.len();
        let mut values = Vec::with_capacity(1 << (2 * n));
        for u in all_subsets(n) {
            for v in all_subsets(n) {
                values.push(f(u, v));
            }
        }
        Csm {
            domain,
            form,
            values,
        }
    }

    /// A table-backed mapping; `values[(U << |S|) | V]` holds `⟨U|V⟩`.
    pub fn from_table<A>(alg: &A, domain: CsmDomain<E>, values: Vec<E>) -> Result<Self, CsmError>
    where
        A: EffectAlgebra<Elem = E>,
    {
        let expected = 1usize << (2 * domain.len());
        if values.len() != expected {
            return Err(CsmError::TableSize {
                got: values.len(),
                expected,
            });
        }
        let n = domain.len();
        for (i, value) in values.iter().enumerate() {
            if !alg.contains(value) {
                let u = Subset::from_bits((i >> n) as u32);
                let v = Subset::from_bits((i & ((1 << n) - 1)) as u32);
                return Err(CsmError::ValueOutsideAlgebra {
                    u: format!("{u:?}"),
                    v: format!("{v:?}"),
                });
            }
        }
        Ok(Csm {
            domain,
            form: CsmForm::Table,
            values,
        })
    }

    pub fn domain(&self) -> &CsmDomain<E> {
        &self.domain
    }

    pub fn form(&self) -> CsmForm {
        self.form
    }

    /// `⟨U|V⟩`.
    pub fn value(&self, u: Subset, v: Subset) -> &E {
        &self.values[Self::index(self.domain.len(), u, v)]
    }

    /// `⟨U|{1}⟩`.
    pub fn top_value(&self, u: Subset) -> &E {
        self.value(u, self.domain.unit_set())
    }

    /// Raw values in `(U, V)` bitmask order.
    pub fn values(&self) -> &[E] {
        &self.values
    }

    /// Replaces one entry; the result is a table-form mapping.
    pub fn with_value(mut self, u: Subset, v: Subset, value: E) -> Self {
        let i = Self::index(self.domain.len(), u, v);
        self.values[i] = value;
        self.form = CsmForm::Table;
        self
    }

    /// Same values, tagged as a plain table.
    pub fn into_table_form(mut self) -> Self {
        self.form = CsmForm::Table;
        self
    }

    /// Whether two mappings on the same ordered `S` agree everywhere.
    pub fn same_values(&self, other: &Self) -> bool {
        self.domain.elements == other.domain.elements && self.values == other.values
    }
}

/// `⟨U|V⟩ = (⋀U) ∧ (⋁V)` with `⋀∅ = 1`, `⋁∅ = 0`.
///
/// Fails if the algebra cannot be certified as an MV-effect algebra.
pub fn csm_joinmeet<A>(alg: &A, domain: CsmDomain<A::Elem>) -> Result<Csm<A::Elem>, CsmError>
where
    A: LatticeEffectAlgebra,
{
    let mv = alg.certify_mv();
    if !mv.holds {
        let (a, b) = mv.counterexample.expect("failing MV check carries a pair");
        return Err(CsmError::NotMv {
            a: alg.describe(&a),
            b: alg.describe(&b),
        });
    }
    let n = domain.len();
    let meets: Vec<A::Elem> = all_subsets(n)
        .map(|u| alg.big_meet(domain.members(u)))
        .collect();
    let joins: Vec<A::Elem> = all_subsets(n)
        .map(|v| alg.big_join(domain.members(v)))
        .collect();
    Ok(Csm::from_fn(domain, CsmForm::JoinMeet, |u, v| {
        alg.meet(&meets[u.bits() as usize], &joins[v.bits() as usize])
    }))
}

/// `⟨U|V⟩ = (⨅U).(⨆V)` with coordinatewise products and
/// `a ⊔ b = a + b - ab`; `⨅∅ = 1`, `⨆∅ = 0`, `⨆{c} = c`.
pub fn csm_product(alg: &TupleEffectAlgebra, domain: CsmDomain<TupleEffect>) -> Csm<TupleEffect> {
    let n = domain.len();
    let products: Vec<TupleEffect> = all_subsets(n)
        .map(|u| domain.members(u).fold(alg.one(), |acc, x| acc.product(x)))
        .collect();
    let co_products: Vec<TupleEffect> = all_subsets(n)
        .map(|v| {
            domain
                .members(v)
                .fold(alg.zero(), |acc, x| acc.co_product(x))
        })
        .collect();
    Csm::from_fn(domain, CsmForm::Product, |u, v| {
        products[u.bits() as usize].product(&co_products[v.bits() as usize])
    })
}

/// `D(X, A) = ⟨X|{1}⟩ ⊖ ⟨X|A ∖ X⟩` for `X ⊆ A ⊆ S`.
pub fn difference<A>(alg: &A, csm: &Csm<A::Elem>, x: Subset, a: Subset) -> Result<A::Elem, CsmError>
where
    A: EffectAlgebra,
{
    if !x.is_subset_of(a) {
        return Err(CsmError::NotSubset(format!("D({x:?}, {a:?}) needs X ⊆ A")));
    }
    alg.ominus(csm.top_value(x), csm.value(x, a.difference(x)))
        .ok_or_else(|| CsmError::AxiomBreach {
            x: csm.domain().show(alg, x),
            a: csm.domain().show(alg, a),
        })
}

/// Every `D(X, A)` with `X ⊆ A ⊆ S`, computed once.
#[derive(Debug, Clone)]
pub struct DTable<E> {
    n: usize,
    values: Vec<Option<E>>,
}

impl<E: Clone + Eq + fmt::Debug> DTable<E> {
    pub fn new<A>(alg: &A, csm: &Csm<E>) -> Self
    where
        A: EffectAlgebra<Elem = E>,
    {
        let n = csm.domain().len();
        let mut values = vec![None; 1 << (2 * n)];
        for a in all_subsets(n) {
            for x in a.subsets() {
                values[(a.bits() as usize) << n | x.bits() as usize] =
                    alg.ominus(csm.top_value(x), csm.value(x, a.difference(x)));
            }
        }
        DTable { n, values }
    }

    /// `D(X, A)`, or `None` when the difference is undefined.
    pub fn get(&self, x: Subset, a: Subset) -> Option<&E> {
        debug_assert!(x.is_subset_of(a));
        self.values[(a.bits() as usize) << self.n | x.bits() as usize].as_ref()
    }

    /// Like [`DTable::get`], naming the breach on failure.
    pub fn require<A>(
        &self,
        alg: &A,
        domain: &CsmDomain<E>,
        x: Subset,
        a: Subset,
    ) -> Result<&E, CsmError>
    where
        A: EffectAlgebra<Elem = E>,
    {
        self.get(x, a).ok_or_else(|| CsmError::AxiomBreach {
            x: domain.show(alg, x),
            a: domain.show(alg, a),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effect::{MvChainProduct, TableDescription, TableEffectAlgebra};
    use crate::rational::Rational;

    fn scalar(n: i64, d: i64) -> TupleEffect {
        TupleEffect::scalar(Rational::new(n, d))
    }

    #[test]
    fn domain_adjoins_unit() {
        let alg = TupleEffectAlgebra::new(1);
        let d = CsmDomain::new(&alg, vec![scalar(1, 2)], 5).unwrap();
        assert_eq!(d.len(), 2);
        assert!(d.unit_adjoined());
        assert_eq!(d.element(d.unit_index()), &alg.one());
        let d = CsmDomain::new(&alg, vec![alg.one(), scalar(1, 2)], 5).unwrap();
        assert!(!d.unit_adjoined());
        assert_eq!(d.unit_index(), 0);
    }

    #[test]
    fn domain_rejects_bad_input() {
        let alg = TupleEffectAlgebra::new(1);
        assert!(matches!(
            CsmDomain::new(&alg, vec![scalar(1, 2), scalar(2, 4)], 5),
            Err(CsmError::DuplicateElement(_))
        ));
        assert!(matches!(
            CsmDomain::new(&alg, vec![scalar(3, 2)], 5),
            Err(CsmError::ForeignElement(_))
        ));
        let many = (1..=5).map(|k| scalar(1, k + 1)).collect();
        assert!(matches!(
            CsmDomain::new(&alg, many, 5),
            Err(CsmError::TooLarge { size: 6, cap: 5 })
        ));
    }

    #[test]
    fn joinmeet_examples() {
        let chain = MvChainProduct::new(vec![2]);
        let half = chain.element(vec![1]).unwrap();
        let d = CsmDomain::new(&chain, vec![half.clone()], 5).unwrap();
        let csm = csm_joinmeet(&chain, d).unwrap();
        let h = Subset::singleton(0);
        assert_eq!(csm.value(Subset::EMPTY, h), &half);
        assert_eq!(csm.value(h, h), &half);
        assert_eq!(csm.value(Subset::EMPTY, Subset::EMPTY), &chain.zero());
        assert_eq!(csm.form(), CsmForm::JoinMeet);
    }

    #[test]
    fn joinmeet_rejects_non_mv() {
        let mo2 = TableDescription {
            elements: ["0", "a", "na", "b", "nb", "1"].map(String::from).to_vec(),
            sum: vec![
                ["0", "0", "0"],
                ["0", "a", "a"],
                ["0", "na", "na"],
                ["0", "b", "b"],
                ["0", "nb", "nb"],
                ["0", "1", "1"],
                ["a", "na", "1"],
                ["b", "nb", "1"],
            ]
            .into_iter()
            .map(|t| t.map(String::from))
            .collect(),
            zero: "0".into(),
            unit: "1".into(),
            commutative: true,
            interval: None,
        };
        let lat = TableEffectAlgebra::new(&mo2).unwrap().as_lattice().unwrap();
        let d = CsmDomain::new(&lat, vec![], 5).unwrap();
        let err = csm_joinmeet(&lat, d).unwrap_err();
        assert_eq!(
            err,
            CsmError::NotMv {
                a: "a".into(),
                b: "b".into()
            }
        );
    }

    #[test]
    fn product_examples() {
        let alg = TupleEffectAlgebra::new(1);
        let d = CsmDomain::new(&alg, vec![scalar(1, 2)], 5).unwrap();
        let csm = csm_product(&alg, d);
        let c = Subset::singleton(0);
        assert_eq!(csm.value(c, c), &scalar(1, 4));
        assert_eq!(csm.value(c, Subset::EMPTY), &alg.zero());

        let d = CsmDomain::new(&alg, vec![scalar(1, 3), scalar(1, 2)], 5).unwrap();
        let csm = csm_product(&alg, d);
        assert_eq!(
            csm.value(Subset::EMPTY, Subset::from_bits(0b11)),
            &scalar(2, 3)
        );
    }

    #[test]
    fn difference_examples() {
        let alg = TupleEffectAlgebra::new(1);
        let d = CsmDomain::new(&alg, vec![scalar(1, 2)], 5).unwrap();
        let csm = csm_product(&alg, d);
        let h = Subset::singleton(0);
        assert_eq!(
            difference(&alg, &csm, Subset::EMPTY, Subset::EMPTY).unwrap(),
            alg.one()
        );
        assert_eq!(
            difference(&alg, &csm, Subset::EMPTY, h).unwrap(),
            scalar(1, 2)
        );
        assert_eq!(difference(&alg, &csm, h, h).unwrap(), scalar(1, 2));
        assert!(difference(&alg, &csm, h, Subset::EMPTY).is_err());
    }

    #[test]
    fn difference_reports_breach() {
        let alg = TupleEffectAlgebra::new(1);
        let d = CsmDomain::new(&alg, vec![scalar(1, 2)], 5).unwrap();
        let h = Subset::singleton(0);
        // ⟨∅|{c}⟩ raised above ⟨∅|{1}⟩ is impossible, so lower ⟨∅|{1}⟩ instead.
        let csm =
            csm_product(&alg, d).with_value(Subset::EMPTY, Subset::singleton(1), scalar(1, 4));
        let err = difference(&alg, &csm, Subset::EMPTY, h).unwrap_err();
        assert!(matches!(err, CsmError::AxiomBreach { .. }));
        let table = DTable::new(&alg, &csm);
        assert!(table.get(Subset::EMPTY, h).is_none());
    }
}
