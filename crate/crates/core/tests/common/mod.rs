#![allow(dead_code)]

use csm_core::effect::{
    ChainElement, EffectAlgebra, FiniteEffectAlgebra, MvChainProduct, TableDescription,
    TableEffectAlgebra, TupleEffect, TupleEffectAlgebra,
};
use csm_core::observable::Observable;
use csm_core::Rational;

pub fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

pub fn scalar(n: i64, d: i64) -> TupleEffect {
    TupleEffect::scalar(r(n, d))
}

pub fn pair(a: (i64, i64), b: (i64, i64)) -> TupleEffect {
    TupleEffect::new(vec![r(a.0, a.1), r(b.0, b.1)])
}

/// Horizontal sum of two four-element Boolean algebras.
pub fn mo2_description() -> TableDescription {
    let names = ["0", "a", "na", "b", "nb", "1"];
    let mut sum = Vec::new();
    for x in names {
        sum.push(["0".to_string(), x.to_string(), x.to_string()]);
    }
    sum.push(["a".into(), "na".into(), "1".into()]);
    sum.push(["b".into(), "nb".into(), "1".into()]);
    TableDescription {
        elements: names.map(String::from).to_vec(),
        sum,
        zero: "0".into(),
        unit: "1".into(),
        commutative: true,
        interval: None,
    }
}

pub fn mo2() -> TableEffectAlgebra {
    TableEffectAlgebra::new(&mo2_description()).unwrap()
}

/// Every `k`-subset of `items`, in lexicographic index order.
pub fn combinations<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    fn go<T: Clone>(items: &[T], k: usize, start: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i].clone());
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Non-unit elements of a chain product.
pub fn non_unit(m: &MvChainProduct) -> Vec<ChainElement> {
    let one = m.one();
    m.elements().into_iter().filter(|e| *e != one).collect()
}

/// Atom `i` of the Boolean algebra `2^n` presented as a chain product.
pub fn boolean_atom(b: &MvChainProduct, n: usize, i: usize) -> ChainElement {
    let mut v = vec![0; n];
    v[i] = 1;
    b.element(v).unwrap()
}

/// The element of `2^n` whose coordinates are the bits of `mask`.
pub fn boolean_element(b: &MvChainProduct, n: usize, mask: u64) -> ChainElement {
    b.element((0..n).map(|i| ((mask >> i) & 1) as u32).collect())
        .unwrap()
}

/// The identity observable `2^n → 2^n`.
pub fn identity_observable(n: usize) -> (MvChainProduct, Observable<ChainElement>) {
    let b = MvChainProduct::boolean(n);
    let atoms = (0..n).map(|i| boolean_atom(&b, n, i)).collect();
    (b, Observable::from_atoms(atoms))
}

/// Every way to write `total` as an ordered sum of `parts` non-negative
/// integers.
pub fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

pub fn tuple(dim: usize) -> TupleEffectAlgebra {
    TupleEffectAlgebra::new(dim)
}
