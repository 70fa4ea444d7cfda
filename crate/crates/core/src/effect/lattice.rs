//! MV-effect algebras: products of finite Łukasiewicz chains and the
//! lattice-level MV checks.

use std::fmt;

use serde::Serialize;

use super::{EffectAlgebra, FiniteEffectAlgebra, LatticeEffectAlgebra};
use crate::rational::Rational;

/// How an [`MvCheck`] verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MvBasis {
    /// Known by construction (products of MV chains or of `[0,1]`).
    Structural,
    /// Every pair of elements was checked.
    Exhaustive,
}

/// Verdict of the check "for all a, b: a ∧ b = 0 implies a ≤ b'".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MvCheck<E> {
    pub holds: bool,
    /// First violating pair in canonical order.
    pub counterexample: Option<(E, E)>,
    pub basis: MvBasis,
}

/// Sweeps every pair of a finite lattice-ordered effect algebra for the
/// MV characterization `a ∧ b = 0 ⇒ a ≤ b'`.
pub fn is_mv_effect_algebra<A>(alg: &A) -> MvCheck<A::Elem>
where
    A: LatticeEffectAlgebra + FiniteEffectAlgebra,
{
    let elems = alg.elements();
    let zero = alg.zero();
    for a in &elems {
        for b in &elems {
            if alg.meet(a, b) == zero && !alg.leq(a, &alg.complement(b)) {
                return MvCheck {
                    holds: false,
                    counterexample: Some((a.clone(), b.clone())),
                    basis: MvBasis::Exhaustive,
                };
            }
        }
    }
    MvCheck {
        holds: true,
        counterexample: None,
        basis: MvBasis::Exhaustive,
    }
}

/// Checks `(a ∨ b) ⊖ a = b ⊖ (a ∧ b)` on every pair; returns the first
/// failing pair.
pub fn check_mv_identity<A>(alg: &A) -> Option<(A::Elem, A::Elem)>
where
    A: LatticeEffectAlgebra + FiniteEffectAlgebra,
{
    let elems = alg.elements();
    for a in &elems {
        for b in &elems {
            let lhs = alg.ominus(&alg.join(a, b), a);
            let rhs = alg.ominus(b, &alg.meet(a, b));
            if lhs.is_none() || lhs != rhs {
                return Some((a.clone(), b.clone()));
            }
        }
    }
    None
}

/// Element of a chain product: the numerators `j_i` of `j_i / k_i`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChainElement(pub Vec<u32>);

impl fmt::Debug for ChainElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

/// `C_{k_1} × .. × C_{k_m}` where `C_k = {0, 1/k, .., 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MvChainProduct {
    orders: Vec<u32>,
}

impl MvChainProduct {
    pub fn new(orders: Vec<u32>) -> Self {
        assert!(!orders.is_empty(), "at least one chain");
        assert!(
            orders.iter().all(|&k| k > 0),
            "chain orders must be positive"
        );
        MvChainProduct { orders }
    }

    /// The powerset Boolean algebra `2^n`, as `C_1^n`.
    pub fn boolean(n: usize) -> Self {
        MvChainProduct::new(vec![1; n])
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn size(&self) -> usize {
        self.orders.iter().map(|&k| k as usize + 1).product()
    }

    /// Builds an element from its numerators, checking bounds.
    pub fn element(&self, steps: Vec<u32>) -> Option<ChainElement> {
        let e = ChainElement(steps);
        self.contains(&e).then_some(e)
    }

    /// Coordinates `j_i / k_i` as rationals.
    pub fn to_rationals(&self, a: &ChainElement) -> Vec<Rational> {
        a.0.iter()
            .zip(&self.orders)
            .map(|(&j, &k)| Rational::new(j as i64, k as i64))
            .collect()
    }

    /// Inverse of [`MvChainProduct::to_rationals`].
    pub fn from_rationals(&self, coords: &[Rational]) -> Option<ChainElement> {
        if coords.len() != self.orders.len() {
            return None;
        }
        let steps = coords
            .iter()
            .zip(&self.orders)
            .map(|(c, &k)| c.scaled_integer(k).and_then(|j| u32::try_from(j).ok()))
            .collect::<Option<Vec<u32>>>()?;
        self.element(steps)
    }
}

impl EffectAlgebra for MvChainProduct {
    type Elem = ChainElement;

    fn zero(&self) -> ChainElement {
        ChainElement(vec![0; self.orders.len()])
    }

    fn one(&self) -> ChainElement {
        ChainElement(self.orders.clone())
    }

    fn contains(&self, a: &ChainElement) -> bool {
        a.0.len() == self.orders.len() && a.0.iter().zip(&self.orders).all(|(j, k)| j <= k)
    }

    fn oplus(&self, a: &ChainElement, b: &ChainElement) -> Option<ChainElement> {
        a.0.iter()
            .zip(&b.0)
            .zip(&self.orders)
            .map(|((x, y), k)| (x + y <= *k).then_some(x + y))
            .collect::<Option<Vec<u32>>>()
            .map(ChainElement)
    }

    fn ominus(&self, b: &ChainElement, a: &ChainElement) -> Option<ChainElement> {
        b.0.iter()
            .zip(&a.0)
            .map(|(y, x)| y.checked_sub(*x))
            .collect::<Option<Vec<u32>>>()
            .map(ChainElement)
    }

    fn complement(&self, a: &ChainElement) -> ChainElement {
        ChainElement(a.0.iter().zip(&self.orders).map(|(j, k)| k - j).collect())
    }

    fn describe(&self, a: &ChainElement) -> String {
        let coords = self.to_rationals(a);
        if coords.len() == 1 {
            coords[0].to_string()
        } else {
            let parts: Vec<String> = coords.iter().map(ToString::to_string).collect();
            format!("({})", parts.join(", "))
        }
    }

    fn leq(&self, a: &ChainElement, b: &ChainElement) -> bool {
        a.0.iter().zip(&b.0).all(|(x, y)| x <= y)
    }
}

impl FiniteEffectAlgebra for MvChainProduct {
    /// Lexicographic order, last coordinate fastest.
    fn elements(&self) -> Vec<ChainElement> {
        let mut out = Vec::with_capacity(self.size());
        let mut cur = vec![0u32; self.orders.len()];
        loop {
            out.push(ChainElement(cur.clone()));
            let mut i = cur.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < self.orders[i] {
                    cur[i] += 1;
                    break;
                }
                cur[i] = 0;
            }
        }
    }
}

impl LatticeEffectAlgebra for MvChainProduct {
    fn meet(&self, a: &ChainElement, b: &ChainElement) -> ChainElement {
        ChainElement(a.0.iter().zip(&b.0).map(|(x, y)| *x.min(y)).collect())
    }

    fn join(&self, a: &ChainElement, b: &ChainElement) -> ChainElement {
        ChainElement(a.0.iter().zip(&b.0).map(|(x, y)| *x.max(y)).collect())
    }

    fn certify_mv(&self) -> MvCheck<ChainElement> {
        MvCheck {
            holds: true,
            counterexample: None,
            basis: MvBasis::Structural,
        }
    }
}
