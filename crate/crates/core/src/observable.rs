//! Observables on finite powerset Boolean algebras, and the observable on the
//! limit algebra `2^(2^S)` built from a compatibility support mapping.
//!
//! The limit observable sends the atom `{X}` (for `X ⊆ S`) to `D(X, S)` and
//! extends additively. Its range contains every `a ∈ S`, witnessed by the
//! family `g^{a}_S({{a}})`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boolean::{g_embed, BooleanError, FiniteBooleanAlgebra, LimitAlgebra, SubsetFamily};
use crate::csm::{Csm, CsmError, DTable};
use crate::effect::EffectAlgebra;
use crate::subset::{all_subsets, Subset};

/// Domains with at most this many elements are verified exhaustively.
pub const EXHAUSTIVE_LIMIT: u64 = 256;

/// Default number of sampled disjoint pairs above [`EXHAUSTIVE_LIMIT`].
pub const DEFAULT_SAMPLES: usize = 100_000;

pub const DEFAULT_SEED: u64 = 0x5eed;

/// Above this many atoms, preimage and range searches give up.
pub const SEARCH_ATOM_LIMIT: u32 = 20;

/// Families over ground sets up to this size are swept exhaustively by
/// [`check_diagram`]; larger ones are checked atom by atom.
pub const DIAGRAM_EXHAUSTIVE_MAX: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ObservableError {
    #[error("decomposition breach: the sum over the family {family:?} is undefined")]
    DecompositionBreach { family: SubsetFamily },
    #[error(transparent)]
    Csm(#[from] CsmError),
    #[error(transparent)]
    Boolean(#[from] BooleanError),
    #[error("construction failed: {property} does not hold ({detail})")]
    Construction {
        property: &'static str,
        detail: String,
    },
    #[error("assignment table has {0} entries, which is not 2^k for k <= 16")]
    BadTable(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Assignment<E> {
    /// Values on atoms; other elements are additive sums.
    Atoms(Vec<E>),
    /// A value for every element, indexed by mask.
    Table(Vec<E>),
}

/// A map from a finite powerset Boolean algebra into an effect algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observable<E> {
    domain: FiniteBooleanAlgebra,
    assignment: Assignment<E>,
    hints: Vec<(E, u64)>,
}

impl<E: Clone + Eq + std::fmt::Debug> Observable<E> {
    pub fn from_atoms(values: Vec<E>) -> Self {
        Observable {
            domain: FiniteBooleanAlgebra::new(values.len() as u32),
            assignment: Assignment::Atoms(values),
            hints: Vec::new(),
        }
    }

    pub fn from_table(values: Vec<E>) -> Result<Self, ObservableError> {
        let len = values.len();
        if !len.is_power_of_two() || len > 1 << 16 {
            return Err(ObservableError::BadTable(len));
        }
        Ok(Observable {
            domain: FiniteBooleanAlgebra::new(len.trailing_zeros()),
            assignment: Assignment::Table(values),
            hints: Vec::new(),
        })
    }

    pub fn domain(&self) -> FiniteBooleanAlgebra {
        self.domain
    }

    pub fn assignment(&self) -> &Assignment<E> {
        &self.assignment
    }

    /// Records that `alpha(x) = target` is expected to hold; used as the
    /// first candidate by [`range_contains`].
    pub fn with_hint(mut self, target: E, x: u64) -> Self {
        self.hints.push((target, x));
        self
    }

    pub fn hints(&self) -> &[(E, u64)] {
        &self.hints
    }

    /// `α(x)`; `None` if the additive extension is undefined.
    pub fn eval<A: EffectAlgebra<Elem = E>>(&self, alg: &A, x: u64) -> Option<E> {
        match &self.assignment {
            Assignment::Atoms(values) => {
                let mut acc = alg.zero();
                let mut rest = x;
                while rest != 0 {
                    let i = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    acc = alg.oplus(&acc, values.get(i)?)?;
                }
                Some(acc)
            }
            Assignment::Table(values) => values.get(usize::try_from(x).ok()?).cloned(),
        }
    }
}

/// `α_A(𝕏) = ⊕_{X∈𝕏} D(X, A)` where `A` is the family's ground set.
pub fn alpha_a<A: EffectAlgebra>(
    alg: &A,
    csm: &Csm<A::Elem>,
    fam: &SubsetFamily,
) -> Result<A::Elem, ObservableError> {
    let d = DTable::new(alg, csm);
    alpha_with(alg, csm, &d, fam)
}

fn alpha_with<A: EffectAlgebra>(
    alg: &A,
    csm: &Csm<A::Elem>,
    d: &DTable<A::Elem>,
    fam: &SubsetFamily,
) -> Result<A::Elem, ObservableError> {
    let a = fam.ground();
    let terms = fam
        .iter()
        .map(|x| d.require(alg, csm.domain(), x, a))
        .collect::<Result<Vec<_>, _>>()?;
    alg.big_oplus(terms)
        .ok_or(ObservableError::DecompositionBreach { family: *fam })
}

fn alpha_opt<A: EffectAlgebra>(
    alg: &A,
    d: &DTable<A::Elem>,
    fam: &SubsetFamily,
) -> Option<A::Elem> {
    let a = fam.ground();
    let terms: Option<Vec<&A::Elem>> = fam.iter().map(|x| d.get(x, a)).collect();
    alg.big_oplus(terms?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionCheck<E> {
    pub holds: bool,
    /// `⊕_{X⊆A} D(X, A)`, when defined.
    pub total: Option<E>,
    /// `1 ⊖ total`, when defined.
    pub residual: Option<E>,
}

/// Whether `(D(X, A))_{X⊆A}` sums to exactly `1`.
pub fn check_decomposition<A: EffectAlgebra>(
    alg: &A,
    csm: &Csm<A::Elem>,
    a: Subset,
) -> DecompositionCheck<A::Elem> {
    decomposition_with(alg, &DTable::new(alg, csm), a)
}

fn decomposition_with<A: EffectAlgebra>(
    alg: &A,
    d: &DTable<A::Elem>,
    a: Subset,
) -> DecompositionCheck<A::Elem> {
    let total = alpha_opt(alg, d, &SubsetFamily::full(a));
    let residual = total.as_ref().and_then(|t| alg.ominus(&alg.one(), t));
    DecompositionCheck {
        holds: total.as_ref() == Some(&alg.one()),
        total,
        residual,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramMismatch<E> {
    pub family: SubsetFamily,
    /// `α_B(g^A_B(𝕏))`
    pub via_outer: Option<E>,
    /// `α_A(𝕏)`
    pub via_inner: Option<E>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramCheck<E> {
    pub holds: bool,
    /// Whether every family over `A` was compared (otherwise atoms only).
    pub exhaustive: bool,
    pub families: usize,
    pub mismatch: Option<DiagramMismatch<E>>,
}

/// Compares `α_B ∘ g^A_B` with `α_A` on every family over `A` (or on the
/// atoms `{X}` when `|A|` exceeds [`DIAGRAM_EXHAUSTIVE_MAX`]).
pub fn check_diagram<A: EffectAlgebra>(
    alg: &A,
    csm: &Csm<A::Elem>,
    inner: Subset,
    outer: Subset,
) -> Result<DiagramCheck<A::Elem>, ObservableError> {
    diagram_with(alg, &DTable::new(alg, csm), inner, outer)
}

fn diagram_with<A: EffectAlgebra>(
    alg: &A,
    d: &DTable<A::Elem>,
    inner: Subset,
    outer: Subset,
) -> Result<DiagramCheck<A::Elem>, ObservableError> {
    if !inner.is_subset_of(outer) {
        return Err(BooleanError::NotContained { inner, outer }.into());
    }
    let exhaustive = inner.len() <= DIAGRAM_EXHAUSTIVE_MAX;
    let families: Vec<SubsetFamily> = if exhaustive {
        SubsetFamily::all_over(inner).collect()
    } else {
        inner
            .subsets()
            .map(|x| SubsetFamily::from_subsets(inner, [x]))
            .collect::<Result<_, _>>()?
    };
    let mut out = DiagramCheck {
        holds: true,
        exhaustive,
        families: families.len(),
        mismatch: None,
    };
    for fam in families {
        let via_inner = alpha_opt(alg, d, &fam);
        let via_outer = alpha_opt(alg, d, &g_embed(&fam, outer)?);
        if via_inner.is_none() || via_inner != via_outer {
            out.holds = false;
            out.mismatch = Some(DiagramMismatch {
                family: fam,
                via_outer,
                via_inner,
            });
            break;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Exhaustive,
    Sampled {
        samples: usize,
        seed: u64,
    },
    /// Exhaustive up to [`EXHAUSTIVE_LIMIT`] elements, sampled above.
    Auto {
        samples: usize,
        seed: u64,
    },
}

impl Default for VerifyMode {
    fn default() -> Self {
        VerifyMode::Auto {
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdditivityFailure<E> {
    pub x: u64,
    pub y: u64,
    /// `α(x ∨ y)`
    pub joined: Option<E>,
    /// `α(x) ⊕ α(y)`
    pub summed: Option<E>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservableReport<E> {
    pub bottom_ok: bool,
    pub top_ok: bool,
    pub exhaustive: bool,
    pub pairs_checked: usize,
    pub failure: Option<AdditivityFailure<E>>,
}

impl<E> ObservableReport<E> {
    pub fn passes(&self) -> bool {
        self.bottom_ok && self.top_ok && self.failure.is_none()
    }
}

/// Checks `α(0) = 0`, `α(1) = 1` and `α(x ∨ y) = α(x) ⊕ α(y)` for disjoint
/// `x, y`.
pub fn verify_observable<A: EffectAlgebra>(
    alg: &A,
    alpha: &Observable<A::Elem>,
    mode: VerifyMode,
) -> ObservableReport<A::Elem> {
    let b = alpha.domain();
    let (exhaustive, samples, seed) = match mode {
        VerifyMode::Exhaustive => (true, 0, 0),
        VerifyMode::Sampled { samples, seed } => (false, samples, seed),
        VerifyMode::Auto { samples, seed } => (b.size() <= EXHAUSTIVE_LIMIT, samples, seed),
    };
    let mut report = ObservableReport {
        bottom_ok: alpha.eval(alg, b.bottom()) == Some(alg.zero()),
        top_ok: alpha.eval(alg, b.top()) == Some(alg.one()),
        exhaustive,
        pairs_checked: 0,
        failure: None,
    };
    let check = |x: u64, y: u64, report: &mut ObservableReport<A::Elem>| -> bool {
        report.pairs_checked += 1;
        let joined = alpha.eval(alg, x | y);
        let summed = match (alpha.eval(alg, x), alpha.eval(alg, y)) {
            (Some(p), Some(q)) => alg.oplus(&p, &q),
            _ => None,
        };
        if joined.is_none() || joined != summed {
            report.failure = Some(AdditivityFailure {
                x,
                y,
                joined,
                summed,
            });
            return false;
        }
        true
    };
    if exhaustive {
        let top = b.top();
        'outer: for x in b.elements() {
            // every y disjoint from x, as submasks of its complement
            let free = top & !x;
            let mut y = 0u64;
            loop {
                if !check(x, y, &mut report) {
                    break 'outer;
                }
                if y == free {
                    break;
                }
                y = (y | !free).wrapping_add(1) & free;
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let top = b.top();
        for _ in 0..samples {
            let x = rng.random::<u64>() & top;
            let y = rng.random::<u64>() & top & !x;
            if !check(x, y, &mut report) {
                break;
            }
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessMethod {
    /// Taken from the observable's construction.
    Constructive,
    /// Found by enumerating the domain.
    Search,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeWitness<E> {
    pub target: E,
    /// A domain element mapped to `target`, if one was found.
    pub element: Option<u64>,
    pub method: Option<WitnessMethod>,
    /// `false` when the domain was too large to search.
    pub searched: bool,
}

/// For each target, a domain element `x` with `α(x) = target`.
///
/// Hints recorded on the observable are tried first; otherwise the domain is
/// enumerated when it has at most [`SEARCH_ATOM_LIMIT`] atoms.
pub fn range_contains<A: EffectAlgebra>(
    alg: &A,
    alpha: &Observable<A::Elem>,
    targets: &[A::Elem],
) -> Vec<RangeWitness<A::Elem>> {
    let b = alpha.domain();
    targets
        .iter()
        .map(|t| {
            let hinted = alpha
                .hints()
                .iter()
                .filter(|(h, _)| h == t)
                .map(|&(_, x)| x)
                .find(|&x| alpha.eval(alg, x).as_ref() == Some(t));
            if let Some(x) = hinted {
                return RangeWitness {
                    target: t.clone(),
                    element: Some(x),
                    method: Some(WitnessMethod::Constructive),
                    searched: false,
                };
            }
            if b.atoms() > SEARCH_ATOM_LIMIT {
                return RangeWitness {
                    target: t.clone(),
                    element: None,
                    method: None,
                    searched: false,
                };
            }
            let found = b
                .elements()
                .find(|&x| alpha.eval(alg, x).as_ref() == Some(t));
            RangeWitness {
                target: t.clone(),
                element: found,
                method: found.map(|_| WitnessMethod::Search),
                searched: true,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateWitness<E> {
    pub element: E,
    pub family: SubsetFamily,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertificateChecks {
    pub decomposition: bool,
    pub diagram: bool,
    pub observable: bool,
}

impl CertificateChecks {
    pub fn all(&self) -> bool {
        self.decomposition && self.diagram && self.observable
    }
}

/// Evidence that `S` lies in the range of an observable on `2^(2^S)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoexistenceCertificate<E> {
    pub s: Vec<E>,
    /// `2^|S|`.
    pub boolean_atoms: usize,
    /// `D(X, S)` for every `X ⊆ S`, in bitmask order.
    pub atom_values: Vec<E>,
    pub witnesses: Vec<CertificateWitness<E>>,
    pub checks: CertificateChecks,
    pub observable_exhaustive: bool,
}

impl<E: Clone + Eq + std::fmt::Debug> CoexistenceCertificate<E> {
    /// Re-checks the certificate on its own: atom values form a
    /// decomposition of unit and each witness family sums to its element.
    pub fn recheck<A: EffectAlgebra<Elem = E>>(&self, alg: &A) -> bool {
        if self.atom_values.len() != self.boolean_atoms || !self.checks.all() {
            return false;
        }
        if alg.big_oplus(&self.atom_values) != Some(alg.one()) {
            return false;
        }
        let alpha = Observable::from_atoms(self.atom_values.clone());
        self.witnesses.iter().all(|w| {
            w.family.ground().len() == self.s.len()
                && alpha.eval(alg, w.family.members()).as_ref() == Some(&w.element)
        }) && self
            .s
            .iter()
            .all(|e| self.witnesses.iter().any(|w| &w.element == e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BuildOptions {
    pub mode: VerifyMode,
}

/// The observable `α_S` on the limit algebra `2^(2^S)`, together with a
/// certificate that `S` lies in its range.
///
/// Aborts if the decomposition of unit or the diagram commutation fails for
/// some `A ⊆ B ⊆ S`, or if the resulting map is not an observable.
pub fn build_alpha_s<A: EffectAlgebra>(
    alg: &A,
    csm: &Csm<A::Elem>,
    options: &BuildOptions,
) -> Result<(Observable<A::Elem>, CoexistenceCertificate<A::Elem>), ObservableError> {
    let domain = csm.domain();
    let n = domain.len();
    let limit = LimitAlgebra::new(n)?;
    let s_all = limit.ground();
    let d = DTable::new(alg, csm);
    let show = |s: Subset| domain.show(alg, s);

    for a in all_subsets(n) {
        let check = decomposition_with(alg, &d, a);
        if !check.holds {
            return Err(ObservableError::Construction {
                property: "decomposition of unit",
                detail: format!(
                    "A={}: sum is {}",
                    show(a),
                    check.total.map_or("undefined".into(), |t| alg.describe(&t))
                ),
            });
        }
    }
    for b in all_subsets(n) {
        for a in b.subsets() {
            let check = diagram_with(alg, &d, a, b)?;
            if let Some(m) = check.mismatch {
                return Err(ObservableError::Construction {
                    property: "diagram commutation (alpha_B after g = alpha_A)",
                    detail: format!(
                        "A={} B={} family={:?}",
                        show(a),
                        show(b),
                        m.family.iter().map(show).collect::<Vec<_>>()
                    ),
                });
            }
        }
    }

    let atom_values: Vec<A::Elem> = all_subsets(n)
        .map(|x| d.get(x, s_all).cloned().expect("decomposition checked"))
        .collect();
    let mut alpha = Observable::from_atoms(atom_values.clone());
    let report = verify_observable(alg, &alpha, options.mode);
    if !report.passes() {
        return Err(ObservableError::Construction {
            property: "observable axioms",
            detail: format!("{:?}", report.failure),
        });
    }

    let mut witnesses = Vec::with_capacity(n);
    for i in 0..n {
        let single = Subset::singleton(i);
        let fam = g_embed(&SubsetFamily::from_subsets(single, [single])?, s_all)?;
        let value = alpha.eval(alg, fam.members());
        if value.as_ref() != Some(domain.element(i)) {
            return Err(ObservableError::Construction {
                property: "range contains S",
                detail: format!(
                    "witness for {} evaluates to {:?}",
                    alg.describe(domain.element(i)),
                    value
                ),
            });
        }
        alpha = alpha.with_hint(domain.element(i).clone(), fam.members());
        witnesses.push(CertificateWitness {
            element: domain.element(i).clone(),
            family: fam,
        });
    }

    let cert = CoexistenceCertificate {
        s: domain.elements().to_vec(),
        boolean_atoms: 1 << n,
        atom_values,
        witnesses,
        checks: CertificateChecks {
            decomposition: true,
            diagram: true,
            observable: true,
        },
        observable_exhaustive: report.exhaustive,
    };
    Ok((alpha, cert))
}

/// `α_S([(𝕏, A)]) = α_A(𝕏)`, evaluated through the canonical representative.
pub fn alpha_s_of_pair<A: EffectAlgebra>(
    alg: &A,
    alpha_s: &Observable<A::Elem>,
    n: usize,
    fam: &SubsetFamily,
) -> Result<Option<A::Elem>, ObservableError> {
    let limit = LimitAlgebra::new(n)?;
    let canonical = limit.canonical(fam)?;
    Ok(alpha_s.eval(alg, canonical.representative().members()))
}
