//! Exhaustive checks of the conditions (a)–(e) and (e*).

use std::fmt;

use serde::Serialize;

use super::{Csm, CsmError};
use crate::effect::EffectAlgebra;
use crate::subset::{all_subsets, Subset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Axiom {
    /// `V₁ ⊆ V₂ ⇒ ⟨U|V₁⟩ ≤ ⟨U|V₂⟩`
    #[serde(rename = "(a)")]
    A,
    /// `⟨U|V⟩ ≤ ⟨U|{1}⟩`
    #[serde(rename = "(b)")]
    B,
    /// `⟨U|∅⟩ = 0`
    #[serde(rename = "(c)")]
    C,
    /// `⟨∅|{c}⟩ = c`
    #[serde(rename = "(d)")]
    D,
    /// the exchange identity for `c ∉ U ∪ V`
    #[serde(rename = "(e)")]
    E,
    /// the exchange identity for every `c`
    #[serde(rename = "(e*)")]
    EStar,
}

impl Axiom {
    pub fn label(self) -> &'static str {
        match self {
            Axiom::A => "(a)",
            Axiom::B => "(b)",
            Axiom::C => "(c)",
            Axiom::D => "(d)",
            Axiom::E => "(e)",
            Axiom::EStar => "(e*)",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One failing instance. For (a), `v` is `V₁` and `v2` is `V₂`; for (e) and
/// (e*), `left` and `right` are the two differences (`None` = undefined).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation<E> {
    pub axiom: Axiom,
    pub u: Subset,
    pub v: Subset,
    pub v2: Option<Subset>,
    pub c: Option<usize>,
    pub left: Option<E>,
    pub right: Option<E>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomCheck<E> {
    pub axiom: Axiom,
    pub instances: usize,
    pub violations: Vec<Violation<E>>,
}

impl<E> AxiomCheck<E> {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport<E> {
    pub unit_adjoined: bool,
    pub checks: Vec<AxiomCheck<E>>,
}

impl<E> AxiomReport<E> {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(AxiomCheck::holds)
    }

    pub fn check(&self, axiom: Axiom) -> Option<&AxiomCheck<E>> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }

    /// `Some(true)` if `axiom` was checked and holds.
    pub fn status(&self, axiom: Axiom) -> Option<bool> {
        self.check(axiom).map(AxiomCheck::holds)
    }

    pub fn violations(&self) -> impl Iterator<Item = &Violation<E>> {
        self.checks.iter().flat_map(|c| c.violations.iter())
    }

    pub fn merge(mut self, other: AxiomReport<E>) -> Self {
        self.unit_adjoined |= other.unit_adjoined;
        self.checks.extend(other.checks);
        self.checks.sort_by_key(|c| c.axiom);
        self
    }
}

fn check_values<A: EffectAlgebra>(alg: &A, csm: &Csm<A::Elem>) -> Result<(), CsmError> {
    let n = csm.domain().len();
    for u in all_subsets(n) {
        for v in all_subsets(n) {
            if !alg.contains(csm.value(u, v)) {
                return Err(CsmError::ValueOutsideAlgebra {
                    u: format!("{u:?}"),
                    v: format!("{v:?}"),
                });
            }
        }
    }
    Ok(())
}

/// `⟨U∪{c}|{1}⟩ ⊖ ⟨U∪{c}|V⟩` and `⟨U|V∪{c}⟩ ⊖ ⟨U|V⟩`.
fn exchange_sides<A: EffectAlgebra>(
    alg: &A,
    csm: &Csm<A::Elem>,
    u: Subset,
    v: Subset,
    c: usize,
) -> (Option<A::Elem>, Option<A::Elem>) {
    let uc = u.with(c);
    let left = alg.ominus(csm.top_value(uc), csm.value(uc, v));
    let right = alg.ominus(csm.value(u, v.with(c)), csm.value(u, v));
    (left, right)
}

fn check_exchange<A: EffectAlgebra>(
    alg: &A,
    csm: &Csm<A::Elem>,
    strong: bool,
) -> AxiomCheck<A::Elem> {
    let n = csm.domain().len();
    let axiom = if strong { Axiom::EStar } else { Axiom::E };
    let mut check = AxiomCheck {
        axiom,
        instances: 0,
        violations: Vec::new(),
    };
    for u in all_subsets(n) {
        for v in all_subsets(n) {
            for c in 0..n {
                if !strong && u.union(v).contains(c) {
                    continue;
                }
                check.instances += 1;
                let (left, right) = exchange_sides(alg, csm, u, v, c);
                if left.is_none() || left != right {
                    check.violations.push(Violation {
                        axiom,
                        u,
                        v,
                        v2: None,
                        c: Some(c),
                        left,
                        right,
                    });
                }
            }
        }
    }
    check
}

/// Exhaustively checks (a)–(e) over every subset of `S`.
///
/// Undefinedness of either difference in (e) counts as a violation.
pub fn verify_csm<A: EffectAlgebra>(
    alg: &A,
    csm: &Csm<A::Elem>,
) -> Result<AxiomReport<A::Elem>, CsmError> {
    check_values(alg, csm)?;
    let domain = csm.domain();
    let n = domain.len();
    let unit = domain.unit_set();
    let zero = alg.zero();
    let violation = |axiom, u, v| Violation {
        axiom,
        u,
        v,
        v2: None,
        c: None,
        left: None,
        right: None,
    };

    let mut a = AxiomCheck {
        axiom: Axiom::A,
        instances: 0,
        violations: Vec::new(),
    };
    for u in all_subsets(n) {
        for v2 in all_subsets(n) {
            for v1 in v2.subsets() {
                a.instances += 1;
                if !alg.leq(csm.value(u, v1), csm.value(u, v2)) {
                    a.violations.push(Violation {
                        v2: Some(v2),
                        left: Some(csm.value(u, v1).clone()),
                        right: Some(csm.value(u, v2).clone()),
                        ..violation(Axiom::A, u, v1)
                    });
                }
            }
        }
    }

    let mut b = AxiomCheck {
        axiom: Axiom::B,
        instances: 0,
        violations: Vec::new(),
    };
    for u in all_subsets(n) {
        for v in all_subsets(n) {
            b.instances += 1;
            if !alg.leq(csm.value(u, v), csm.value(u, unit)) {
                b.violations.push(Violation {
                    left: Some(csm.value(u, v).clone()),
                    right: Some(csm.value(u, unit).clone()),
                    ..violation(Axiom::B, u, v)
                });
            }
        }
    }

    let mut c = AxiomCheck {
        axiom: Axiom::C,
        instances: 0,
        violations: Vec::new(),
    };
    for u in all_subsets(n) {
        c.instances += 1;
        if *csm.value(u, Subset::EMPTY) != zero {
            c.violations.push(Violation {
                left: Some(csm.value(u, Subset::EMPTY).clone()),
                right: Some(zero.clone()),
                ..violation(Axiom::C, u, Subset::EMPTY)
            });
        }
    }

    let mut d = AxiomCheck {
        axiom: Axiom::D,
        instances: 0,
        violations: Vec::new(),
    };
    for i in 0..n {
        d.instances += 1;
        let got = csm.value(Subset::EMPTY, Subset::singleton(i));
        if got != domain.element(i) {
            d.violations.push(Violation {
                c: Some(i),
                left: Some(got.clone()),
                right: Some(domain.element(i).clone()),
                ..violation(Axiom::D, Subset::EMPTY, Subset::singleton(i))
            });
        }
    }

    let e = check_exchange(alg, csm, false);
    Ok(AxiomReport {
        unit_adjoined: domain.unit_adjoined(),
        checks: vec![a, b, c, d, e],
    })
}

/// Exhaustively checks (e*) for every `c ∈ S`, including `c ∈ U ∪ V`.
pub fn verify_strong<A: EffectAlgebra>(
    alg: &A,
    csm: &Csm<A::Elem>,
) -> Result<AxiomReport<A::Elem>, CsmError> {
    check_values(alg, csm)?;
    Ok(AxiomReport {
        unit_adjoined: csm.domain().unit_adjoined(),
        checks: vec![check_exchange(alg, csm, true)],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csm::{csm_joinmeet, csm_product, CsmDomain};
    use crate::effect::{MvChainProduct, TupleEffect, TupleEffectAlgebra};
    use crate::rational::Rational;

    fn scalar(n: i64, d: i64) -> TupleEffect {
        TupleEffect::scalar(Rational::new(n, d))
    }

    #[test]
    fn joinmeet_on_chain_square_is_strong() {
        let m = MvChainProduct::new(vec![2, 2]);
        let s = vec![
            m.element(vec![1, 0]).unwrap(),
            m.element(vec![1, 1]).unwrap(),
            m.element(vec![0, 2]).unwrap(),
        ];
        let csm = csm_joinmeet(&m, CsmDomain::new(&m, s, 5).unwrap()).unwrap();
        let report = verify_csm(&m, &csm).unwrap();
        assert!(report.holds(), "{report:?}");
        assert!(verify_strong(&m, &csm).unwrap().holds());
        // c ranges over S, U and V over subsets of S ∖ {c}
        assert_eq!(report.check(Axiom::E).unwrap().instances, 4 * 8 * 8);
    }

    #[test]
    fn product_is_not_strong() {
        let alg = TupleEffectAlgebra::new(1);
        let csm = csm_product(&alg, CsmDomain::new(&alg, vec![scalar(1, 2)], 5).unwrap());
        assert!(verify_csm(&alg, &csm).unwrap().holds());
        let strong = verify_strong(&alg, &csm).unwrap();
        assert_eq!(strong.status(Axiom::EStar), Some(false));
        let c = Subset::singleton(0);
        let hit = strong
            .violations()
            .find(|v| v.u == c && v.v == c && v.c == Some(0))
            .expect("U = V = {c} is a counterexample");
        assert_eq!(hit.left, Some(scalar(1, 4)));
        assert_eq!(hit.right, Some(scalar(0, 1)));
    }

    #[test]
    fn injected_c_violation() {
        let alg = TupleEffectAlgebra::new(1);
        let domain = CsmDomain::new(&alg, vec![scalar(1, 2)], 5).unwrap();
        let u = Subset::singleton(0);
        let csm = csm_product(&alg, domain).with_value(u, Subset::EMPTY, scalar(1, 8));
        let report = verify_csm(&alg, &csm).unwrap();
        let c = report.check(Axiom::C).unwrap();
        assert_eq!(c.violations.len(), 1);
        assert_eq!(c.violations[0].u, u);
    }

    #[test]
    fn foreign_value_is_an_input_error() {
        let alg = TupleEffectAlgebra::new(1);
        let domain = CsmDomain::new(&alg, vec![scalar(1, 2)], 5).unwrap();
        let csm = csm_product(&alg, domain).with_value(Subset::EMPTY, Subset::EMPTY, scalar(3, 2));
        assert!(matches!(
            verify_csm(&alg, &csm),
            Err(CsmError::ValueOutsideAlgebra { .. })
        ));
    }
}
