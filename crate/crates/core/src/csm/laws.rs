//! Consequences every valid mapping must satisfy, checked exhaustively.

use serde::Serialize;

use super::{Csm, DTable};
use crate::effect::EffectAlgebra;
use crate::subset::{all_subsets, Subset};

/// Outcome of sweeping one law over all of its instances.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawCheck {
    pub name: &'static str,
    pub instances: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl LawCheck {
    pub(crate) fn new(name: &'static str) -> Self {
        LawCheck {
            name,
            instances: 0,
            failures: 0,
            first_failure: None,
        }
    }

    pub(crate) fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(detail());
            }
        }
    }

    pub fn holds(&self) -> bool {
        self.failures == 0
    }
}

/// Checks, over every subset of `S`:
///
/// * `⟨{c}|{1}⟩ = c`
/// * `D(X,A) = D(X,A∪{c}) ⊕ D(X∪{c},A∪{c})` for `c ∉ A`
/// * `(D(X∪Y, A∪C))_{Y⊆C}` is orthogonal and sums to `D(X,A)` for `C ∩ A = ∅`
pub fn law_suite<A: EffectAlgebra>(alg: &A, csm: &Csm<A::Elem>) -> Vec<LawCheck> {
    let domain = csm.domain();
    let n = domain.len();
    let d = DTable::new(alg, csm);
    let show = |s: Subset| domain.show(alg, s);

    let mut singleton = LawCheck::new("<{c}|{1}> = c");
    for i in 0..n {
        let got = csm.top_value(Subset::singleton(i));
        singleton.record(got == domain.element(i), || {
            format!(
                "<{{{}}}|{{1}}> = {}",
                alg.describe(domain.element(i)),
                alg.describe(got)
            )
        });
    }

    let mut split = LawCheck::new("D(X,A) = D(X,A+c) (+) D(X+c,A+c)");
    for a in all_subsets(n) {
        for x in a.subsets() {
            for c in (0..n).filter(|&c| !a.contains(c)) {
                let ac = a.with(c);
                let sum = match (d.get(x, ac), d.get(x.with(c), ac)) {
                    (Some(p), Some(q)) => alg.oplus(p, q),
                    _ => None,
                };
                let ok = sum.is_some() && sum.as_ref() == d.get(x, a);
                split.record(ok, || {
                    format!(
                        "X={} A={} c={}",
                        show(x),
                        show(a),
                        alg.describe(domain.element(c))
                    )
                });
            }
        }
    }

    let mut family = LawCheck::new("sum over Y of D(X+Y, A+C) = D(X,A)");
    for a in all_subsets(n) {
        let outside = domain.full().difference(a);
        for x in a.subsets() {
            for c in outside.subsets() {
                let ac = a.union(c);
                let terms: Option<Vec<&A::Elem>> =
                    c.subsets().map(|y| d.get(x.union(y), ac)).collect();
                let total = terms.and_then(|t| alg.big_oplus(t));
                let ok = total.is_some() && total.as_ref() == d.get(x, a);
                family.record(ok, || format!("X={} A={} C={}", show(x), show(a), show(c)));
            }
        }
    }

    vec![singleton, split, family]
}
