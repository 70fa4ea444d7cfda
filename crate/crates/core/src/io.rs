//! JSON file formats: algebra, subset, mapping, witness, observable and
//! certificate files, plus element encodings for each carrier.
//!
//! Table elements are encoded by name. Tuple and chain-product elements are
//! a rational string such as `"1/2"` in dimension one, otherwise an array of
//! rational strings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::boolean::SubsetFamily;
use crate::csm::{AxiomReport, Csm, CsmDomain, CsmError, CsmForm, LawCheck};
use crate::effect::{
    ChainElement, CoreError, EffectAlgebra, ElemId, MvChainProduct, TableDescription,
    TableEffectAlgebra, TableLattice, TupleEffect, TupleEffectAlgebra, ValidationReport,
};
use crate::observable::{
    CertificateChecks, CertificateWitness, CoexistenceCertificate, Observable, ObservableError,
};
use crate::rational::Rational;
use crate::subset::{all_subsets, Subset};
use crate::witness::{WitnessError, WitnessMapping};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("{context}: invalid JSON at line {line}, column {column}: {message}")]
    Json {
        context: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Csm(#[from] CsmError),
    #[error(transparent)]
    Witness(#[from] WitnessError),
    #[error(transparent)]
    Observable(#[from] ObservableError),
}

fn format_err(msg: impl Into<String>) -> IoError {
    IoError::Format(msg.into())
}

/// Parses `text` as `T`, reporting the location of any failure.
pub fn parse_json<T: serde::de::DeserializeOwned>(context: &str, text: &str) -> Result<T, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Json {
        context: context.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_json(&path.display().to_string(), &text)
}

/// Conversion between elements and their JSON encoding.
pub trait ElementCodec: EffectAlgebra {
    fn encode(&self, e: &Self::Elem) -> Value;
    fn decode(&self, v: &Value) -> Result<Self::Elem, IoError>;

    fn decode_all(&self, values: &[Value]) -> Result<Vec<Self::Elem>, IoError> {
        values.iter().map(|v| self.decode(v)).collect()
    }
}

fn table_decode(t: &TableEffectAlgebra, v: &Value) -> Result<ElemId, IoError> {
    let name = v
        .as_str()
        .ok_or_else(|| format_err(format!("expected an element name, got {v}")))?;
    t.id(name)
        .ok_or_else(|| CoreError::UnknownElement(name.to_string()).into())
}

impl ElementCodec for TableEffectAlgebra {
    fn encode(&self, e: &ElemId) -> Value {
        Value::String(self.name(*e).to_string())
    }

    fn decode(&self, v: &Value) -> Result<ElemId, IoError> {
        table_decode(self, v)
    }
}

impl ElementCodec for TableLattice {
    fn encode(&self, e: &ElemId) -> Value {
        self.table().encode(e)
    }

    fn decode(&self, v: &Value) -> Result<ElemId, IoError> {
        table_decode(self.table(), v)
    }
}

fn encode_coords(coords: &[Rational]) -> Value {
    if coords.len() == 1 {
        Value::String(coords[0].to_string())
    } else {
        Value::Array(
            coords
                .iter()
                .map(|c| Value::String(c.to_string()))
                .collect(),
        )
    }
}

fn decode_coords(v: &Value, dim: usize) -> Result<Vec<Rational>, IoError> {
    let one = |v: &Value| -> Result<Rational, IoError> {
        let s = v
            .as_str()
            .ok_or_else(|| format_err(format!("expected a rational string, got {v}")))?;
        s.parse().map_err(|e| format_err(format!("{e}")))
    };
    let coords = match v {
        Value::Array(items) => items.iter().map(one).collect::<Result<Vec<_>, _>>()?,
        other => vec![one(other)?],
    };
    if coords.len() != dim {
        return Err(format_err(format!(
            "element {v} has {} coordinates, expected {dim}",
            coords.len()
        )));
    }
    Ok(coords)
}

impl ElementCodec for TupleEffectAlgebra {
    fn encode(&self, e: &TupleEffect) -> Value {
        encode_coords(&e.coords)
    }

    fn decode(&self, v: &Value) -> Result<TupleEffect, IoError> {
        let coords = decode_coords(v, self.dim)?;
        self.element(coords)
            .ok_or_else(|| CoreError::ForeignElement(v.to_string()).into())
    }
}

impl ElementCodec for MvChainProduct {
    fn encode(&self, e: &ChainElement) -> Value {
        encode_coords(&self.to_rationals(e))
    }

    fn decode(&self, v: &Value) -> Result<ChainElement, IoError> {
        let coords = decode_coords(v, self.orders().len())?;
        self.from_rationals(&coords)
            .ok_or_else(|| CoreError::ForeignElement(v.to_string()).into())
    }
}

/// Contents of an algebra description file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AlgebraFile {
    Table(TableDescription),
    Tuple { dim: usize },
    MvChainProduct { orders: Vec<u32> },
}

/// A loaded algebra of any supported kind.
#[derive(Debug, Clone)]
pub enum Algebra {
    Table(TableEffectAlgebra),
    Tuple(TupleEffectAlgebra),
    MvChainProduct(MvChainProduct),
}

impl AlgebraFile {
    /// Builds the algebra; table files must pass validation.
    pub fn load(&self) -> Result<Algebra, IoError> {
        match self {
            AlgebraFile::Table(desc) => Ok(Algebra::Table(TableEffectAlgebra::new(desc)?)),
            AlgebraFile::Tuple { dim } if *dim == 0 => {
                Err(format_err("tuple dimension must be positive"))
            }
            AlgebraFile::Tuple { dim } => Ok(Algebra::Tuple(TupleEffectAlgebra::new(*dim))),
            AlgebraFile::MvChainProduct { orders } if orders.is_empty() || orders.contains(&0) => {
                Err(format_err(
                    "chain orders must be a non-empty list of positive integers",
                ))
            }
            AlgebraFile::MvChainProduct { orders } => {
                Ok(Algebra::MvChainProduct(MvChainProduct::new(orders.clone())))
            }
        }
    }
}

/// A subset file: either a bare array of elements or `{"S": [...]}`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum SubsetFile {
    Bare(Vec<Value>),
    Wrapped {
        #[serde(rename = "S")]
        s: Vec<Value>,
    },
}

impl SubsetFile {
    pub fn elements(&self) -> &[Value] {
        match self {
            SubsetFile::Bare(v) | SubsetFile::Wrapped { s: v } => v,
        }
    }

    pub fn domain<A: ElementCodec>(
        &self,
        alg: &A,
        max_s: usize,
    ) -> Result<CsmDomain<A::Elem>, IoError> {
        Ok(CsmDomain::new(
            alg,
            alg.decode_all(self.elements())?,
            max_s,
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsmEntry {
    #[serde(rename = "U")]
    pub u: Vec<Value>,
    #[serde(rename = "V")]
    pub v: Vec<Value>,
    pub value: Value,
}

/// Contents of a mapping file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CsmFile {
    JoinMeet,
    Product,
    Table {
        #[serde(rename = "S")]
        s: Vec<Value>,
        entries: Vec<CsmEntry>,
    },
}

fn subset_from_values<E: Clone + Eq + std::fmt::Debug, A: ElementCodec<Elem = E>>(
    alg: &A,
    domain: &CsmDomain<E>,
    items: &[Value],
) -> Result<Subset, IoError> {
    let elems = alg.decode_all(items)?;
    if elems.len() != domain.subset_of(&elems)?.len() {
        return Err(format_err(format!(
            "repeated element in {}",
            Value::Array(items.to_vec())
        )));
    }
    Ok(domain.subset_of(&elems)?)
}

fn encode_subset<A: ElementCodec>(alg: &A, domain: &CsmDomain<A::Elem>, s: Subset) -> Value {
    Value::Array(domain.members(s).map(|e| alg.encode(e)).collect())
}

impl CsmFile {
    /// Reads a table file into a mapping; every pair `(U, V)` must appear
    /// exactly once.
    pub fn table<A: ElementCodec>(&self, alg: &A, max_s: usize) -> Result<Csm<A::Elem>, IoError> {
        let CsmFile::Table { s, entries } = self else {
            return Err(format_err("not a table mapping file"));
        };
        let domain = CsmDomain::new(alg, alg.decode_all(s)?, max_s)?;
        let n = domain.len();
        let mut values: Vec<Option<A::Elem>> = vec![None; 1 << (2 * n)];
        for entry in entries {
            let u = subset_from_values(alg, &domain, &entry.u)?;
            let v = subset_from_values(alg, &domain, &entry.v)?;
            let slot = &mut values[(u.bits() as usize) << n | v.bits() as usize];
            if slot.is_some() {
                return Err(format_err(format!(
                    "duplicate entry for U={} V={}",
                    domain.show(alg, u),
                    domain.show(alg, v)
                )));
            }
            *slot = Some(alg.decode(&entry.value)?);
        }
        let mut filled = Vec::with_capacity(values.len());
        for (i, v) in values.into_iter().enumerate() {
            let u = Subset::from_bits((i >> n) as u32);
            let vv = Subset::from_bits((i & ((1 << n) - 1)) as u32);
            filled.push(v.ok_or_else(|| {
                format_err(format!(
                    "table is not total: no entry for U={} V={}",
                    domain.show(alg, u),
                    domain.show(alg, vv)
                ))
            })?);
        }
        Ok(Csm::from_table(alg, domain, filled)?)
    }

    /// Writes any mapping as a total table.
    pub fn from_csm<A: ElementCodec>(alg: &A, csm: &Csm<A::Elem>) -> Self {
        let domain = csm.domain();
        let n = domain.len();
        let mut entries = Vec::with_capacity(1 << (2 * n));
        for u in all_subsets(n) {
            for v in all_subsets(n) {
                entries.push(CsmEntry {
                    u: subset_values(alg, domain, u),
                    v: subset_values(alg, domain, v),
                    value: alg.encode(csm.value(u, v)),
                });
            }
        }
        CsmFile::Table {
            s: domain.elements().iter().map(|e| alg.encode(e)).collect(),
            entries,
        }
    }
}

fn subset_values<A: ElementCodec>(alg: &A, domain: &CsmDomain<A::Elem>, s: Subset) -> Vec<Value> {
    domain.members(s).map(|e| alg.encode(e)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessEntry {
    #[serde(rename = "X")]
    pub x: Vec<Value>,
    pub value: Value,
}

/// Contents of a witness file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessFile {
    #[serde(rename = "S")]
    pub s: Vec<Value>,
    pub values: Vec<WitnessEntry>,
}

impl WitnessFile {
    pub fn mapping<A: ElementCodec>(
        &self,
        alg: &A,
        max_s: usize,
    ) -> Result<WitnessMapping<A::Elem>, IoError> {
        let domain = CsmDomain::new(alg, alg.decode_all(&self.s)?, max_s)?;
        let n = domain.len();
        let mut values: Vec<Option<A::Elem>> = vec![None; 1 << n];
        for entry in &self.values {
            let x = subset_from_values(alg, &domain, &entry.x)?;
            let slot = &mut values[x.bits() as usize];
            if slot.is_some() {
                return Err(format_err(format!(
                    "duplicate entry for X={}",
                    domain.show(alg, x)
                )));
            }
            *slot = Some(alg.decode(&entry.value)?);
        }
        let filled = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| {
                    format_err(format!(
                        "witness is not total: no entry for X={}",
                        domain.show(alg, Subset::from_bits(i as u32))
                    ))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(WitnessMapping::new(alg, domain, filled)?)
    }

    pub fn from_mapping<A: ElementCodec>(alg: &A, beta: &WitnessMapping<A::Elem>) -> Self {
        let domain = beta.domain();
        WitnessFile {
            s: domain.elements().iter().map(|e| alg.encode(e)).collect(),
            values: all_subsets(domain.len())
                .map(|x| WitnessEntry {
                    x: subset_values(alg, domain, x),
                    value: alg.encode(beta.value(x)),
                })
                .collect(),
        }
    }
}

/// Contents of an observable file: values on atoms (extended additively)
/// or a full table indexed by mask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObservableFile {
    Atoms { atoms: Vec<Value> },
    Table { table: Vec<Value> },
}

impl ObservableFile {
    pub fn observable<A: ElementCodec>(&self, alg: &A) -> Result<Observable<A::Elem>, IoError> {
        match self {
            ObservableFile::Atoms { atoms } if atoms.len() > 64 => {
                Err(format_err("an observable file may list at most 64 atoms"))
            }
            ObservableFile::Atoms { atoms } => Ok(Observable::from_atoms(alg.decode_all(atoms)?)),
            ObservableFile::Table { table } => Ok(Observable::from_table(alg.decode_all(table)?)?),
        }
    }
}

/// Members of `fam` as sorted lists of element encodings, in mask order.
pub fn encode_family<A: ElementCodec>(
    alg: &A,
    domain: &CsmDomain<A::Elem>,
    fam: &SubsetFamily,
) -> Value {
    Value::Array(fam.iter().map(|x| encode_subset(alg, domain, x)).collect())
}

fn decode_family<A: ElementCodec>(
    alg: &A,
    domain: &CsmDomain<A::Elem>,
    value: &Value,
) -> Result<SubsetFamily, IoError> {
    let items = value
        .as_array()
        .ok_or_else(|| format_err("a family must be a list of subsets"))?;
    let ground = domain.full();
    let subsets = items
        .iter()
        .map(|s| {
            let members = s
                .as_array()
                .ok_or_else(|| format_err("a subset must be a list of elements"))?;
            subset_from_values(alg, domain, members)
        })
        .collect::<Result<Vec<_>, _>>()?;
    SubsetFamily::from_subsets(ground, subsets).map_err(|e| format_err(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateChecksFile {
    pub decomposition: bool,
    pub diagram: bool,
    pub observable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateWitnessFile {
    pub element: Value,
    pub family: Value,
}

/// Contents of a certificate file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    #[serde(rename = "S")]
    pub s: Vec<Value>,
    pub boolean_atoms: usize,
    pub witnesses: Vec<CertificateWitnessFile>,
    pub checks: CertificateChecksFile,
    /// `D(X, S)` for each `X ⊆ S` in mask order; enough to re-check every
    /// witness without the mapping.
    pub atom_values: Vec<Value>,
    #[serde(default)]
    pub observable_exhaustive: bool,
}

impl CertificateFile {
    pub fn from_certificate<A: ElementCodec>(
        alg: &A,
        domain: &CsmDomain<A::Elem>,
        cert: &CoexistenceCertificate<A::Elem>,
    ) -> Self {
        CertificateFile {
            s: cert.s.iter().map(|e| alg.encode(e)).collect(),
            boolean_atoms: cert.boolean_atoms,
            witnesses: cert
                .witnesses
                .iter()
                .map(|w| CertificateWitnessFile {
                    element: alg.encode(&w.element),
                    family: encode_family(alg, domain, &w.family),
                })
                .collect(),
            checks: CertificateChecksFile {
                decomposition: cert.checks.decomposition,
                diagram: cert.checks.diagram,
                observable: cert.checks.observable,
            },
            atom_values: cert.atom_values.iter().map(|e| alg.encode(e)).collect(),
            observable_exhaustive: cert.observable_exhaustive,
        }
    }

    pub fn certificate<A: ElementCodec>(
        &self,
        alg: &A,
        max_s: usize,
    ) -> Result<CoexistenceCertificate<A::Elem>, IoError> {
        let domain = CsmDomain::new(alg, alg.decode_all(&self.s)?, max_s)?;
        if domain.unit_adjoined() {
            return Err(format_err("certificate S must contain the unit"));
        }
        let witnesses = self
            .witnesses
            .iter()
            .map(|w| {
                Ok(CertificateWitness {
                    element: alg.decode(&w.element)?,
                    family: decode_family(alg, &domain, &w.family)?,
                })
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        Ok(CoexistenceCertificate {
            s: domain.elements().to_vec(),
            boolean_atoms: self.boolean_atoms,
            atom_values: alg.decode_all(&self.atom_values)?,
            witnesses,
            checks: CertificateChecks {
                decomposition: self.checks.decomposition,
                diagram: self.checks.diagram,
                observable: self.checks.observable,
            },
            observable_exhaustive: self.observable_exhaustive,
        })
    }
}

/// Machine-readable rendering of an axiom report.
pub fn axiom_report_json<A: ElementCodec>(
    alg: &A,
    domain: &CsmDomain<A::Elem>,
    report: &AxiomReport<A::Elem>,
) -> Value {
    let enc = |e: &Option<A::Elem>| e.as_ref().map_or(Value::Null, |e| alg.encode(e));
    let mut axioms = BTreeMap::new();
    for check in &report.checks {
        let violations: Vec<Value> = check
            .violations
            .iter()
            .map(|v| {
                json!({
                    "U": encode_subset(alg, domain, v.u),
                    "V": encode_subset(alg, domain, v.v),
                    "V2": v.v2.map(|s| encode_subset(alg, domain, s)),
                    "c": v.c.map(|c| alg.encode(domain.element(c))),
                    "left": enc(&v.left),
                    "right": enc(&v.right),
                })
            })
            .collect();
        axioms.insert(
            check.axiom.label(),
            json!({
                "status": if check.holds() { "holds" } else { "violated" },
                "instances": check.instances,
                "violations": violations,
            }),
        );
    }
    json!({
        "holds": report.holds(),
        "unit_adjoined": report.unit_adjoined,
        "axioms": axioms,
    })
}

pub fn law_checks_json(checks: &[LawCheck]) -> Value {
    serde_json::to_value(checks).expect("law checks serialize")
}

pub fn validation_report_json(report: &ValidationReport) -> Value {
    serde_json::to_value(report).expect("validation reports serialize")
}

/// Tag used for a mapping's origin in reports.
pub fn form_label(form: CsmForm) -> &'static str {
    match form {
        CsmForm::JoinMeet => "join-meet",
        CsmForm::Product => "product",
        CsmForm::Table => "table",
        CsmForm::ObservableDerived => "observable-derived",
    }
}
