//! Rational vectors in `[0,1]^n`: the interval effect algebra `[0,u]_G` for
//! `G = Q^n` with componentwise order and `u = (1, .., 1)`.
//!
//! A commuting family of Hilbert space effects, once simultaneously
//! diagonalized, lives here: one coordinate per joint eigenvalue.

use std::fmt;

use super::{EffectAlgebra, LatticeEffectAlgebra, MvBasis, MvCheck};
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TupleEffect {
    pub coords: Vec<Rational>,
}

impl TupleEffect {
    pub fn new(coords: Vec<Rational>) -> Self {
        TupleEffect { coords }
    }

    pub fn scalar(r: Rational) -> Self {
        TupleEffect { coords: vec![r] }
    }

    pub fn constant(dim: usize, r: Rational) -> Self {
        TupleEffect {
            coords: vec![r; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Rational, &Rational) -> Rational) -> Self {
        TupleEffect {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    /// Coordinatewise product `a.b`.
    pub fn product(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    /// Coordinatewise `a ⊔ b = a + b - ab`.
    pub fn co_product(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b - a * b)
    }

    /// `a.a = a`.
    pub fn is_idempotent(&self) -> bool {
        self.product(self) == *self
    }
}

impl fmt::Debug for TupleEffect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.len() == 1 {
            write!(f, "{}", self.coords[0])
        } else {
            f.write_str("(")?;
            for (i, c) in self.coords.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TupleEffectAlgebra {
    pub dim: usize,
}

impl TupleEffectAlgebra {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        TupleEffectAlgebra { dim }
    }

    /// Builds an element, returning `None` if it is outside `[0,1]^dim`.
    pub fn element(&self, coords: Vec<Rational>) -> Option<TupleEffect> {
        let e = TupleEffect::new(coords);
        self.contains(&e).then_some(e)
    }
}

impl EffectAlgebra for TupleEffectAlgebra {
    type Elem = TupleEffect;

    fn zero(&self) -> TupleEffect {
        TupleEffect::constant(self.dim, Rational::zero())
    }

    fn one(&self) -> TupleEffect {
        TupleEffect::constant(self.dim, Rational::one())
    }

    fn contains(&self, a: &TupleEffect) -> bool {
        a.dim() == self.dim && a.coords.iter().all(Rational::in_unit_interval)
    }

    fn oplus(&self, a: &TupleEffect, b: &TupleEffect) -> Option<TupleEffect> {
        let s = a.zip_with(b, |x, y| x + y);
        s.coords.iter().all(|x| *x <= Rational::one()).then_some(s)
    }

    fn ominus(&self, b: &TupleEffect, a: &TupleEffect) -> Option<TupleEffect> {
        let d = b.zip_with(a, |x, y| x - y);
        d.coords.iter().all(|x| !x.is_negative()).then_some(d)
    }

    fn complement(&self, a: &TupleEffect) -> TupleEffect {
        TupleEffect {
            coords: a.coords.iter().map(|x| Rational::one() - x).collect(),
        }
    }

    fn describe(&self, a: &TupleEffect) -> String {
        format!("{a:?}")
    }

    fn leq(&self, a: &TupleEffect, b: &TupleEffect) -> bool {
        a.coords.iter().zip(&b.coords).all(|(x, y)| x <= y)
    }
}

impl LatticeEffectAlgebra for TupleEffectAlgebra {
    fn meet(&self, a: &TupleEffect, b: &TupleEffect) -> TupleEffect {
        a.zip_with(b, |x, y| x.clone().min(y.clone()))
    }

    fn join(&self, a: &TupleEffect, b: &TupleEffect) -> TupleEffect {
        a.zip_with(b, |x, y| x.clone().max(y.clone()))
    }

    /// `[0,1]^n` is a product of standard MV-algebras.
    fn certify_mv(&self) -> MvCheck<TupleEffect> {
        MvCheck {
            holds: true,
            counterexample: None,
            basis: MvBasis::Structural,
        }
    }
}
