//! Effect algebras given by an explicit partial sum table.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{is_mv_effect_algebra, MvCheck};
use super::{CoreError, EffectAlgebra, FiniteEffectAlgebra, LatticeEffectAlgebra};
use crate::rational::Rational;

/// Index of an element in its table, in input order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElemId(pub usize);

impl fmt::Debug for ElemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Raw table as read from a description file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableDescription {
    pub elements: Vec<String>,
    /// Entries `[a, b, a ⊕ b]`.
    pub sum: Vec<[String; 3]>,
    pub zero: String,
    pub unit: String,
    /// When set, every entry `[a, b, c]` also defines `b ⊕ a = c`.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub commutative: bool,
    /// Optional embedding of each element into a rational vector group,
    /// making the table an interval effect algebra.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<BTreeMap<String, Vec<Rational>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TableAxiom {
    E1,
    E2,
    E3,
    E4,
    Cancellativity,
    PartialOrder,
}

impl fmt::Display for TableAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = match self {
            TableAxiom::E1 => "(E1)",
            TableAxiom::E2 => "(E2)",
            TableAxiom::E3 => "(E3)",
            TableAxiom::E4 => "(E4)",
            TableAxiom::Cancellativity => "cancellativity",
            TableAxiom::PartialOrder => "partial order",
        };
        f.write_str(label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableViolation {
    pub axiom: TableAxiom,
    /// Element names witnessing the failure.
    pub witness: Vec<String>,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub elements: usize,
    pub defined_sums: usize,
    pub violations: Vec<TableViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations_of(&self, axiom: TableAxiom) -> impl Iterator<Item = &TableViolation> {
        self.violations.iter().filter(move |v| v.axiom == axiom)
    }
}

/// Parsed table before any axiom is assumed.
struct RawTable {
    names: Vec<String>,
    sum: Vec<Option<usize>>,
    zero: usize,
    unit: usize,
}

impl RawTable {
    fn parse(desc: &TableDescription) -> Result<Self, CoreError> {
        let mut index = HashMap::new();
        for (i, name) in desc.elements.iter().enumerate() {
            if index.insert(name.as_str(), i).is_some() {
                return Err(CoreError::DuplicateElement(name.clone()));
            }
        }
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| CoreError::UnknownElement(name.to_string()))
        };
        let n = desc.elements.len();
        if n == 0 {
            return Err(CoreError::InvalidDescription("no elements".into()));
        }
        let mut sum = vec![None; n * n];
        let mut put = |a: usize, b: usize, c: usize| -> Result<(), CoreError> {
            match sum[a * n + b] {
                Some(old) if old != c => Err(CoreError::ConflictingSum {
                    a: desc.elements[a].clone(),
                    b: desc.elements[b].clone(),
                }),
                _ => {
                    sum[a * n + b] = Some(c);
                    Ok(())
                }
            }
        };
        for [a, b, c] in &desc.sum {
            let (a, b, c) = (lookup(a)?, lookup(b)?, lookup(c)?);
            put(a, b, c)?;
            if desc.commutative {
                put(b, a, c)?;
            }
        }
        let zero = lookup(&desc.zero)?;
        let unit = lookup(&desc.unit)?;
        if let Some(interval) = &desc.interval {
            for name in interval.keys() {
                lookup(name)?;
            }
        }
        Ok(RawTable {
            names: desc.elements.clone(),
            sum,
            zero,
            unit,
        })
    }

    fn n(&self) -> usize {
        self.names.len()
    }

    fn get(&self, a: usize, b: usize) -> Option<usize> {
        self.sum[a * self.n() + b]
    }

    fn names(&self, ids: &[usize]) -> Vec<String> {
        ids.iter().map(|&i| self.names[i].clone()).collect()
    }

    fn leq_matrix(&self) -> Vec<bool> {
        let n = self.n();
        let mut leq = vec![false; n * n];
        for a in 0..n {
            for c in 0..n {
                if let Some(b) = self.get(a, c) {
                    leq[a * n + b] = true;
                }
            }
        }
        leq
    }

    fn validate(&self) -> ValidationReport {
        let n = self.n();
        let mut out = Vec::new();
        let mut push = |axiom, ids: &[usize], detail: String| {
            out.push(TableViolation {
                axiom,
                witness: self.names(ids),
                detail,
            })
        };
        let nm = |i: usize| self.names[i].as_str();

        for a in 0..n {
            for b in 0..n {
                if let Some(c) = self.get(a, b) {
                    if self.get(b, a) != Some(c) {
                        push(
                            TableAxiom::E1,
                            &[a, b, c],
                            format!(
                                "{} ⊕ {} = {} but {} ⊕ {} differs",
                                nm(a),
                                nm(b),
                                nm(c),
                                nm(b),
                                nm(a)
                            ),
                        );
                    }
                }
            }
        }

        for a in 0..n {
            for b in 0..n {
                let Some(ab) = self.get(a, b) else { continue };
                for c in 0..n {
                    let Some(abc) = self.get(ab, c) else { continue };
                    let rhs = self.get(b, c).and_then(|bc| self.get(a, bc));
                    if rhs != Some(abc) {
                        push(
                            TableAxiom::E2,
                            &[a, b, c],
                            format!(
                                "({} ⊕ {}) ⊕ {} = {} but {} ⊕ ({} ⊕ {}) is {}",
                                nm(a),
                                nm(b),
                                nm(c),
                                nm(abc),
                                nm(a),
                                nm(b),
                                nm(c),
                                rhs.map_or("undefined", nm)
                            ),
                        );
                    }
                }
            }
        }

        for a in 0..n {
            let comps: Vec<usize> = (0..n)
                .filter(|&x| self.get(a, x) == Some(self.unit))
                .collect();
            if comps.len() != 1 {
                let mut ids = vec![a];
                ids.extend(&comps);
                push(
                    TableAxiom::E3,
                    &ids,
                    format!("{} has {} complements", nm(a), comps.len()),
                );
            }
        }

        for a in 0..n {
            if a != self.zero && self.get(a, self.unit).is_some() {
                push(
                    TableAxiom::E4,
                    &[a, self.unit],
                    format!("{} ⊕ {} is defined", nm(a), nm(self.unit)),
                );
            }
        }

        for a in 0..n {
            for b in 0..n {
                for c in (b + 1)..n {
                    if let (Some(x), Some(y)) = (self.get(a, b), self.get(a, c)) {
                        if x == y {
                            push(
                                TableAxiom::Cancellativity,
                                &[a, b, c],
                                format!(
                                    "{} ⊕ {} = {} ⊕ {} = {}",
                                    nm(a),
                                    nm(b),
                                    nm(a),
                                    nm(c),
                                    nm(x)
                                ),
                            );
                        }
                    }
                }
            }
        }

        let leq = self.leq_matrix();
        let le = |a: usize, b: usize| leq[a * n + b];
        for a in 0..n {
            if !le(a, a) {
                push(
                    TableAxiom::PartialOrder,
                    &[a],
                    format!("{} ≤ {} fails", nm(a), nm(a)),
                );
            }
            if !le(self.zero, a) {
                push(
                    TableAxiom::PartialOrder,
                    &[self.zero, a],
                    format!("0 ≤ {} fails", nm(a)),
                );
            }
            if !le(a, self.unit) {
                push(
                    TableAxiom::PartialOrder,
                    &[a, self.unit],
                    format!("{} ≤ 1 fails", nm(a)),
                );
            }
            for b in 0..n {
                if a < b && le(a, b) && le(b, a) {
                    push(
                        TableAxiom::PartialOrder,
                        &[a, b],
                        format!(
                            "{} ≤ {} ≤ {} with {} ≠ {}",
                            nm(a),
                            nm(b),
                            nm(a),
                            nm(a),
                            nm(b)
                        ),
                    );
                }
                for c in 0..n {
                    if le(a, b) && le(b, c) && !le(a, c) {
                        push(
                            TableAxiom::PartialOrder,
                            &[a, b, c],
                            format!(
                                "{} ≤ {} ≤ {} but not {} ≤ {}",
                                nm(a),
                                nm(b),
                                nm(c),
                                nm(a),
                                nm(c)
                            ),
                        );
                    }
                }
            }
        }

        ValidationReport {
            elements: n,
            defined_sums: self.sum.iter().filter(|s| s.is_some()).count(),
            violations: out,
        }
    }
}

/// Checks (E1)–(E4), cancellativity and that the derived `≤` is a partial
/// order with bottom `zero` and top `unit`.
///
/// Malformed input (dangling or duplicate identifiers, conflicting entries)
/// is an `Err`; axiom failures are listed in the returned report.
pub fn validate_effect_algebra(desc: &TableDescription) -> Result<ValidationReport, CoreError> {
    Ok(RawTable::parse(desc)?.validate())
}

/// A validated finite effect algebra with precomputed derived tables.
#[derive(Debug, Clone, PartialEq)]
pub struct TableEffectAlgebra {
    names: Vec<String>,
    sum: Vec<Option<ElemId>>,
    diff: Vec<Option<ElemId>>,
    complement: Vec<ElemId>,
    zero: ElemId,
    unit: ElemId,
    interval: Option<Vec<Vec<Rational>>>,
}

impl TableEffectAlgebra {
    pub fn new(desc: &TableDescription) -> Result<Self, CoreError> {
        let raw = RawTable::parse(desc)?;
        let report = raw.validate();
        if let Some(first) = report.violations.first() {
            return Err(CoreError::NotEffectAlgebra(format!(
                "{} violation(s), first {}: {}",
                report.violations.len(),
                first.axiom,
                first.detail
            )));
        }
        let n = raw.n();
        let sum: Vec<Option<ElemId>> = raw.sum.iter().map(|s| s.map(ElemId)).collect();
        let mut diff = vec![None; n * n];
        for a in 0..n {
            for c in 0..n {
                if let Some(b) = raw.get(a, c) {
                    // b ⊖ a = c
                    diff[b * n + a] = Some(ElemId(c));
                }
            }
        }
        let complement = (0..n)
            .map(|a| {
                let c = (0..n).find(|&x| raw.get(a, x) == Some(raw.unit));
                ElemId(c.expect("validated (E3)"))
            })
            .collect();
        let mut alg = TableEffectAlgebra {
            names: raw.names,
            sum,
            diff,
            complement,
            zero: ElemId(raw.zero),
            unit: ElemId(raw.unit),
            interval: None,
        };
        if let Some(map) = &desc.interval {
            alg.interval = Some(alg.check_interval(map)?);
        }
        Ok(alg)
    }

    fn check_interval(
        &self,
        map: &BTreeMap<String, Vec<Rational>>,
    ) -> Result<Vec<Vec<Rational>>, CoreError> {
        let bad = |msg: String| CoreError::InvalidInterval(msg);
        let coords: Vec<Vec<Rational>> = self
            .names
            .iter()
            .map(|name| {
                map.get(name)
                    .cloned()
                    .ok_or_else(|| bad(format!("{name:?} has no coordinates")))
            })
            .collect::<Result<_, _>>()?;
        let dim = coords[0].len();
        if coords.iter().any(|c| c.len() != dim) {
            return Err(bad("coordinate vectors differ in length".into()));
        }
        let u = &coords[self.unit.0];
        if coords[self.zero.0].iter().any(|x| !x.is_zero()) {
            return Err(bad("zero is not mapped to the group identity".into()));
        }
        let n = self.names.len();
        for a in 0..n {
            let inside = coords[a]
                .iter()
                .zip(u)
                .all(|(x, top)| !x.is_negative() && x <= top);
            if !inside {
                return Err(bad(format!("{:?} lies outside [0, u]", self.names[a])));
            }
            for b in 0..n {
                if a != b && coords[a] == coords[b] {
                    return Err(bad(format!(
                        "{:?} and {:?} share coordinates",
                        self.names[a], self.names[b]
                    )));
                }
                let total: Vec<Rational> = coords[a]
                    .iter()
                    .zip(&coords[b])
                    .map(|(x, y)| x + y)
                    .collect();
                let fits = total.iter().zip(u).all(|(x, top)| x <= top);
                match self.sum[a * n + b] {
                    Some(c) if coords[c.0] != total => {
                        return Err(bad(format!(
                            "{:?} ⊕ {:?} is not the group sum",
                            self.names[a], self.names[b]
                        )))
                    }
                    None if fits => {
                        return Err(bad(format!(
                            "{:?} ⊕ {:?} is undefined but the group sum stays below u",
                            self.names[a], self.names[b]
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(coords)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, id: ElemId) -> &str {
        &self.names[id.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn id(&self, name: &str) -> Option<ElemId> {
        self.names.iter().position(|n| n == name).map(ElemId)
    }

    /// Coordinates of `id` in the ambient group, when the table is tagged as
    /// an interval effect algebra.
    pub fn interval_coords(&self, id: ElemId) -> Option<&[Rational]> {
        self.interval.as_ref().map(|c| c[id.0].as_slice())
    }

    pub fn is_interval(&self) -> bool {
        self.interval.is_some()
    }

    /// The meet/join closure of this table, if its order is a lattice.
    pub fn as_lattice(&self) -> Result<TableLattice, CoreError> {
        TableLattice::new(self.clone())
    }
}

impl EffectAlgebra for TableEffectAlgebra {
    type Elem = ElemId;

    fn zero(&self) -> ElemId {
        self.zero
    }

    fn one(&self) -> ElemId {
        self.unit
    }

    fn contains(&self, a: &ElemId) -> bool {
        a.0 < self.names.len()
    }

    fn oplus(&self, a: &ElemId, b: &ElemId) -> Option<ElemId> {
        self.sum[a.0 * self.names.len() + b.0]
    }

    fn ominus(&self, b: &ElemId, a: &ElemId) -> Option<ElemId> {
        self.diff[b.0 * self.names.len() + a.0]
    }

    fn complement(&self, a: &ElemId) -> ElemId {
        self.complement[a.0]
    }

    fn describe(&self, a: &ElemId) -> String {
        self.names
            .get(a.0)
            .cloned()
            .unwrap_or_else(|| format!("{a:?}"))
    }
}

impl FiniteEffectAlgebra for TableEffectAlgebra {
    fn elements(&self) -> Vec<ElemId> {
        (0..self.names.len()).map(ElemId).collect()
    }
}

/// A table algebra whose order is a lattice, with meet and join tables.
#[derive(Debug, Clone, PartialEq)]
pub struct TableLattice {
    table: TableEffectAlgebra,
    meet: Vec<ElemId>,
    join: Vec<ElemId>,
}

impl TableLattice {
    fn new(table: TableEffectAlgebra) -> Result<Self, CoreError> {
        let n = table.len();
        let ids = table.elements();
        let extreme = |a: ElemId, b: ElemId, lower: bool| -> Option<ElemId> {
            let bounds: Vec<ElemId> = ids
                .iter()
                .copied()
                .filter(|&x| {
                    if lower {
                        table.leq(&x, &a) && table.leq(&x, &b)
                    } else {
                        table.leq(&a, &x) && table.leq(&b, &x)
                    }
                })
                .collect();
            bounds.iter().copied().find(|&m| {
                bounds.iter().all(|&x| {
                    if lower {
                        table.leq(&x, &m)
                    } else {
                        table.leq(&m, &x)
                    }
                })
            })
        };
        let mut meet = Vec::with_capacity(n * n);
        let mut join = Vec::with_capacity(n * n);
        for &a in &ids {
            for &b in &ids {
                let err = |op| CoreError::NotLattice {
                    a: table.name(a).to_string(),
                    b: table.name(b).to_string(),
                    op,
                };
                meet.push(extreme(a, b, true).ok_or_else(|| err("meet"))?);
                join.push(extreme(a, b, false).ok_or_else(|| err("join"))?);
            }
        }
        Ok(TableLattice { table, meet, join })
    }

    pub fn table(&self) -> &TableEffectAlgebra {
        &self.table
    }
}

impl EffectAlgebra for TableLattice {
    type Elem = ElemId;

    fn zero(&self) -> ElemId {
        self.table.zero()
    }

    fn one(&self) -> ElemId {
        self.table.one()
    }

    fn contains(&self, a: &ElemId) -> bool {
        self.table.contains(a)
    }

    fn oplus(&self, a: &ElemId, b: &ElemId) -> Option<ElemId> {
        self.table.oplus(a, b)
    }

    fn ominus(&self, b: &ElemId, a: &ElemId) -> Option<ElemId> {
        self.table.ominus(b, a)
    }

    fn complement(&self, a: &ElemId) -> ElemId {
        self.table.complement(a)
    }

    fn describe(&self, a: &ElemId) -> String {
        self.table.describe(a)
    }
}

impl FiniteEffectAlgebra for TableLattice {
    fn elements(&self) -> Vec<ElemId> {
        self.table.elements()
    }
}

impl LatticeEffectAlgebra for TableLattice {
    fn meet(&self, a: &ElemId, b: &ElemId) -> ElemId {
        self.meet[a.0 * self.table.len() + b.0]
    }

    fn join(&self, a: &ElemId, b: &ElemId) -> ElemId {
        self.join[a.0 * self.table.len() + b.0]
    }

    fn certify_mv(&self) -> MvCheck<ElemId> {
        is_mv_effect_algebra(self)
    }
}
