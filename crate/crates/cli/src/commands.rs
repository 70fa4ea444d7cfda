use std::io::Write;
use std::path::Path;

use csm_core::csm::{
    csm_from_observable, csm_joinmeet, csm_product, verify_csm, verify_strong, AxiomReport, Csm,
    CsmDomain, CsmError, PreimagePolicy, Violation,
};
use csm_core::effect::{
    validate_effect_algebra, EffectAlgebra, LatticeEffectAlgebra, MvBasis, MvChainProduct,
    TableDescription, TableEffectAlgebra, TupleEffectAlgebra,
};
use csm_core::io::{
    axiom_report_json, encode_family, form_label, read_json, validation_report_json,
    CertificateFile, CsmFile, ElementCodec, ObservableFile, SubsetFile, WitnessFile,
};
use csm_core::observable::{
    build_alpha_s, verify_observable, BuildOptions, ObservableError, VerifyMode,
};
use csm_core::search::{self, SearchBudget, SearchOutcome, SearchResult};
use csm_core::witness::{
    check_d_equality, verify_witness, witness_from_csm, IntervalEffectAlgebra, WitnessMapping,
};
use csm_core::Subset;
use serde_json::{json, Value};

use crate::report::{input_error, InputError, Report, Verdict};

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub max_s: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Settings {
    fn mode(&self) -> VerifyMode {
        VerifyMode::Auto {
            samples: self.samples,
            seed: self.seed,
        }
    }
}

/// What each algebra kind supports beyond the generic pipeline.
pub trait CliAlgebra: ElementCodec + IntervalEffectAlgebra {
    fn joinmeet(&self, domain: CsmDomain<Self::Elem>) -> Result<Csm<Self::Elem>, InputError>;

    fn product(&self, _domain: CsmDomain<Self::Elem>) -> Result<Csm<Self::Elem>, InputError> {
        input_error("the product form needs a tuple algebra")
    }

    fn search_csm(
        &self,
        _domain: CsmDomain<Self::Elem>,
        _strong: bool,
        _budget: &SearchBudget,
    ) -> Result<SearchResult<Csm<Self::Elem>>, InputError> {
        input_error("search needs a finite algebra")
    }

    fn search_witness(
        &self,
        _domain: CsmDomain<Self::Elem>,
        _budget: &SearchBudget,
    ) -> Result<SearchResult<WitnessMapping<Self::Elem>>, InputError> {
        input_error("search needs a finite algebra")
    }

    fn extend(
        &self,
        _beta: &WitnessMapping<Self::Elem>,
        _budget: &SearchBudget,
    ) -> Result<SearchResult<Csm<Self::Elem>>, InputError> {
        input_error("search needs a finite algebra")
    }
}

macro_rules! finite_search {
    () => {
        fn search_csm(
            &self,
            domain: CsmDomain<Self::Elem>,
            strong: bool,
            budget: &SearchBudget,
        ) -> Result<SearchResult<Csm<Self::Elem>>, InputError> {
            Ok(search::search_csm(self, domain, strong, budget)?)
        }

        fn search_witness(
            &self,
            domain: CsmDomain<Self::Elem>,
            budget: &SearchBudget,
        ) -> Result<SearchResult<WitnessMapping<Self::Elem>>, InputError> {
            Ok(search::search_witness(self, domain, budget)?)
        }

        fn extend(
            &self,
            beta: &WitnessMapping<Self::Elem>,
            budget: &SearchBudget,
        ) -> Result<SearchResult<Csm<Self::Elem>>, InputError> {
            Ok(search::csm_extending_witness(self, beta, budget)?)
        }
    };
}

impl CliAlgebra for TableEffectAlgebra {
    fn joinmeet(&self, domain: CsmDomain<Self::Elem>) -> Result<Csm<Self::Elem>, InputError> {
        let lattice = self
            .as_lattice()
            .map_err(|e| InputError(format!("the join/meet form needs a lattice: {e}")))?;
        Ok(csm_joinmeet(&lattice, domain)?)
    }

    finite_search!();
}

impl CliAlgebra for MvChainProduct {
    fn joinmeet(&self, domain: CsmDomain<Self::Elem>) -> Result<Csm<Self::Elem>, InputError> {
        Ok(csm_joinmeet(self, domain)?)
    }

    finite_search!();
}

impl CliAlgebra for TupleEffectAlgebra {
    fn joinmeet(&self, domain: CsmDomain<Self::Elem>) -> Result<Csm<Self::Elem>, InputError> {
        Ok(csm_joinmeet(self, domain)?)
    }

    fn product(&self, domain: CsmDomain<Self::Elem>) -> Result<Csm<Self::Elem>, InputError> {
        Ok(csm_product(self, domain))
    }
}

fn subset_domain<A: CliAlgebra>(
    alg: &A,
    subset: Option<&Path>,
    settings: &Settings,
) -> Result<CsmDomain<A::Elem>, InputError> {
    let Some(path) = subset else {
        return input_error("--subset is required here");
    };
    let file: SubsetFile = read_json(path)?;
    Ok(file.domain(alg, settings.max_s)?)
}

/// Loads a mapping file; a table file carries its own `S`, which wins over
/// `--subset`.
pub fn load_csm<A: CliAlgebra>(
    alg: &A,
    csm: &Path,
    subset: Option<&Path>,
    settings: &Settings,
) -> Result<Csm<A::Elem>, InputError> {
    let file: CsmFile = read_json(csm)?;
    match &file {
        CsmFile::Table { .. } => {
            if subset.is_some() {
                eprintln!(
                    "note: {} lists its own S; --subset is ignored",
                    csm.display()
                );
            }
            Ok(file.table(alg, settings.max_s)?)
        }
        CsmFile::JoinMeet => alg.joinmeet(subset_domain(alg, subset, settings)?),
        CsmFile::Product => alg.product(subset_domain(alg, subset, settings)?),
    }
}

fn write_json(path: &Path, value: &Value) -> Result<(), InputError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| InputError(format!("cannot write {}: {e}", path.display())))
}

fn describe_opt<A: EffectAlgebra>(alg: &A, e: &Option<A::Elem>) -> String {
    e.as_ref()
        .map_or_else(|| "undefined".to_string(), |e| alg.describe(e))
}

fn show_violation<A: EffectAlgebra>(
    alg: &A,
    domain: &CsmDomain<A::Elem>,
    v: &Violation<A::Elem>,
) -> String {
    let mut at = format!("U={}, V={}", domain.show(alg, v.u), domain.show(alg, v.v));
    if let Some(v2) = v.v2 {
        at.push_str(&format!(", V'={}", domain.show(alg, v2)));
    }
    if let Some(c) = v.c {
        at.push_str(&format!(", c={}", alg.describe(domain.element(c))));
    }
    format!(
        "{at}: left {}, right {}",
        describe_opt(alg, &v.left),
        describe_opt(alg, &v.right)
    )
}

fn axiom_lines<A: EffectAlgebra>(
    report: &mut Report,
    alg: &A,
    domain: &CsmDomain<A::Elem>,
    axioms: &AxiomReport<A::Elem>,
) {
    for check in &axioms.checks {
        match check.violations.first() {
            None => report.line(format!(
                "{} holds on {} instances",
                check.axiom, check.instances
            )),
            Some(v) => report.line(format!(
                "{} violated on {} of {} instances; first at {}",
                check.axiom,
                check.violations.len(),
                check.instances,
                show_violation(alg, domain, v)
            )),
        }
        // the instance U = V = {c} is the one worth quoting for (e*)
        let diagonal = check.violations.iter().skip(1).find(|v| {
            v.c.is_some_and(|c| v.u == Subset::singleton(c) && v.v == v.u)
        });
        if let Some(v) = diagonal {
            report.line(format!(
                "{} also violated at {}",
                check.axiom,
                show_violation(alg, domain, v)
            ));
        }
    }
}

fn verify_into<A: CliAlgebra>(
    report: &mut Report,
    alg: &A,
    csm: &Csm<A::Elem>,
    strong: bool,
) -> Result<bool, InputError> {
    let mut axioms = verify_csm(alg, csm)?;
    if strong {
        axioms = axioms.merge(verify_strong(alg, csm)?);
    }
    let domain = csm.domain();
    report.line(format!(
        "mapping: {} on S = {}",
        form_label(csm.form()),
        domain.show(alg, domain.full())
    ));
    if axioms.unit_adjoined {
        report.line("1 was adjoined to S");
    }
    axiom_lines(report, alg, domain, &axioms);
    report.field("axioms", axiom_report_json(alg, domain, &axioms));
    report.fold(Verdict::from_bool(axioms.holds()));
    Ok(axioms.holds())
}

// ---------------------------------------------------------------------------

pub fn validate_table(desc: &TableDescription, mv: bool) -> Result<Report, InputError> {
    let mut report = Report::new();
    let validation = validate_effect_algebra(desc)?;
    report.field("validation", validation_report_json(&validation));
    report.line(format!(
        "{} elements, {} defined sums",
        validation.elements, validation.defined_sums
    ));
    if !validation.is_valid() {
        for v in &validation.violations {
            report.line(format!(
                "{} violated at {}: {}",
                v.axiom,
                v.witness.join(", "),
                v.detail
            ));
        }
        report.fold(Verdict::Violated);
        return Ok(report);
    }
    report.line("(E1)-(E4) hold");
    if mv {
        let alg = TableEffectAlgebra::new(desc)?;
        match alg.as_lattice() {
            Err(e) => {
                report.line(format!(
                    "not an MV-effect algebra: the order is not a lattice ({e})"
                ));
                report.field("mv", json!({ "holds": false, "lattice": false }));
                report.fold(Verdict::Violated);
            }
            Ok(lattice) => mv_lines(&mut report, &lattice),
        }
    }
    Ok(report)
}

pub fn validate_builtin<A: LatticeEffectAlgebra>(
    what: &str,
    alg: &A,
    mv: bool,
) -> Result<Report, InputError> {
    let mut report = Report::new();
    report.line(format!("{what}: (E1)-(E4) hold by construction"));
    report.field("validation", json!({ "elements": null, "violations": [] }));
    if mv {
        mv_lines(&mut report, alg);
    }
    Ok(report)
}

fn mv_lines<A: LatticeEffectAlgebra>(report: &mut Report, alg: &A) {
    let check = alg.certify_mv();
    let basis = match check.basis {
        MvBasis::Structural => "structural",
        MvBasis::Exhaustive => "exhaustive",
    };
    match &check.counterexample {
        None => report.line(format!("MV-effect algebra ({basis} check)")),
        Some((a, b)) => report.line(format!(
            "not an MV-effect algebra: {a} ∧ {b} = 0 but {a} ≰ {b}'",
            a = alg.describe(a),
            b = alg.describe(b)
        )),
    }
    report.field(
        "mv",
        json!({
            "holds": check.holds,
            "basis": basis,
            "counterexample": check.counterexample.as_ref().map(|(a, b)| [alg.describe(a), alg.describe(b)]),
        }),
    );
    report.fold(Verdict::from_bool(check.holds));
}

pub fn verify_csm_cmd<A: CliAlgebra>(
    alg: &A,
    csm: &Path,
    subset: Option<&Path>,
    strong: bool,
    settings: &Settings,
) -> Result<Report, InputError> {
    let csm = load_csm(alg, csm, subset, settings)?;
    let mut report = Report::new();
    verify_into(&mut report, alg, &csm, strong)?;
    Ok(report)
}

pub fn coexist<A: CliAlgebra>(
    alg: &A,
    csm: &Path,
    subset: Option<&Path>,
    out: Option<&Path>,
    settings: &Settings,
) -> Result<Report, InputError> {
    let csm = load_csm(alg, csm, subset, settings)?;
    let mut report = Report::new();
    if !verify_into(&mut report, alg, &csm, false)? {
        return Ok(report);
    }
    let options = BuildOptions {
        mode: settings.mode(),
    };
    let (_, cert) = match build_alpha_s(alg, &csm, &options) {
        Ok(built) => built,
        Err(ObservableError::Construction { property, detail }) => {
            report.line(format!("construction failed: {property} ({detail})"));
            report.field("failed_property", property.into());
            report.fold(Verdict::Violated);
            return Ok(report);
        }
        Err(e) => return Err(e.into()),
    };
    let domain = csm.domain();
    report.line(format!(
        "Boolean domain: 2^{} = {} elements",
        cert.boolean_atoms,
        1u128 << cert.boolean_atoms
    ));
    report.line(format!(
        "observable axioms checked {}",
        if cert.observable_exhaustive {
            "exhaustively"
        } else {
            "on a seeded sample"
        }
    ));
    for w in &cert.witnesses {
        report.line(format!(
            "{} = α({})",
            alg.describe(&w.element),
            encode_family(alg, domain, &w.family)
        ));
    }
    let recheck = cert.recheck(alg);
    if !recheck {
        report.line("certificate fails its own re-check");
    }
    report.fold(Verdict::from_bool(cert.checks.all() && recheck));
    let file = serde_json::to_value(CertificateFile::from_certificate(alg, domain, &cert))?;
    if let Some(path) = out {
        write_json(path, &file)?;
        report.line(format!("certificate written to {}", path.display()));
    }
    report.field("certificate", file);
    Ok(report)
}

pub fn check_certificate<A: CliAlgebra>(
    alg: &A,
    path: &Path,
    settings: &Settings,
) -> Result<Report, InputError> {
    let file: CertificateFile = read_json(path)?;
    let cert = file.certificate(alg, settings.max_s)?;
    let mut report = Report::new();
    let ok = cert.recheck(alg);
    report.line(format!(
        "certificate for S of size {} over 2^{} atoms: {}",
        cert.s.len(),
        cert.boolean_atoms,
        if ok { "re-checks" } else { "does not re-check" }
    ));
    report.field("recheck", ok.into());
    report.fold(Verdict::from_bool(ok));
    Ok(report)
}

pub fn reverse<A: CliAlgebra>(
    alg: &A,
    observable: &Path,
    subset: Option<&Path>,
    out: Option<&Path>,
    settings: &Settings,
) -> Result<Report, InputError> {
    let file: ObservableFile = read_json(observable)?;
    let alpha = file.observable(alg)?;
    let domain = subset_domain(alg, subset, settings)?;
    let mut report = Report::new();
    let checked = verify_observable(alg, &alpha, settings.mode());
    if !checked.passes() {
        let reason = if !checked.bottom_ok {
            "α(0) ≠ 0".to_string()
        } else if !checked.top_ok {
            "α(1) ≠ 1".to_string()
        } else {
            let f = checked
                .failure
                .as_ref()
                .expect("a failing report names its pair");
            format!(
                "α(x ∨ y) = {} but α(x) ⊕ α(y) = {} at x={:#b}, y={:#b}",
                describe_opt(alg, &f.joined),
                describe_opt(alg, &f.summed),
                f.x,
                f.y
            )
        };
        report.line(format!("not an observable: {reason}"));
        report.fold(Verdict::Violated);
        return Ok(report);
    }
    let csm = match csm_from_observable(alg, &alpha, domain, &PreimagePolicy::First) {
        Ok(csm) => csm,
        Err(CsmError::NotInRange(e)) => {
            return input_error(format!("{e} is not in the range of the observable"))
        }
        Err(e) => return Err(e.into()),
    };
    verify_into(&mut report, alg, &csm, true)?;
    let file = serde_json::to_value(CsmFile::from_csm(alg, &csm))?;
    if let Some(path) = out {
        write_json(path, &file)?;
        report.line(format!("mapping written to {}", path.display()));
    }
    report.field("csm", file);
    Ok(report)
}

pub fn witness<A: CliAlgebra>(
    alg: &A,
    csm: &Path,
    subset: Option<&Path>,
    beta: Option<&Path>,
    out: Option<&Path>,
    settings: &Settings,
) -> Result<Report, InputError> {
    let csm = load_csm(alg, csm, subset, settings)?;
    let mut report = Report::new();
    if !verify_into(&mut report, alg, &csm, false)? {
        return Ok(report);
    }
    let beta = match beta {
        Some(path) => {
            let file: WitnessFile = read_json(path)?;
            let beta = file.mapping(alg, settings.max_s)?;
            if beta.domain().elements() != csm.domain().elements() {
                return input_error("the witness file and the mapping use different S");
            }
            beta
        }
        None => witness_from_csm(alg, &csm)?,
    };
    let domain = beta.domain();
    let axioms = verify_witness(alg, &beta)?;
    report.line(if axioms.a1 {
        "(A1) holds"
    } else {
        "(A1) violated: β(∅) ≠ 1"
    });
    match axioms.a2_failures.first() {
        None => report.line("(A2) holds"),
        Some(&c) => report.line(format!(
            "(A2) violated at c={}: β({{c}}) = {}",
            alg.describe(domain.element(c)),
            alg.describe(beta.value(Subset::singleton(c)))
        )),
    }
    match axioms.a3_failures.first() {
        None => report.line(format!("(A3) holds on {} pairs", axioms.pairs_checked)),
        Some(f) => report.line(format!(
            "(A3) violated on {} of {} pairs; first at X={}, A={}: D_β = {}",
            axioms.a3_failures.len(),
            axioms.pairs_checked,
            domain.show(alg, f.x),
            domain.show(alg, f.a),
            f.value
        )),
    }
    let equality = check_d_equality(alg, &csm, &beta)?;
    match &equality.mismatch {
        None => report.line(format!("D = D_β on all {} pairs", equality.pairs_checked)),
        Some(m) => report.line(format!(
            "D ≠ D_β at X={}, A={}: D = {}, D_β = {}",
            domain.show(alg, m.x),
            domain.show(alg, m.a),
            m.d.as_ref()
                .map_or_else(|| "undefined".to_string(), |d| d.to_string()),
            m.d_beta
        )),
    }
    report.field(
        "witness_axioms",
        json!({
            "(A1)": axioms.a1,
            "(A2)": axioms.a2(),
            "(A3)": axioms.a3(),
            "pairs": axioms.pairs_checked,
        }),
    );
    report.field(
        "d_equality",
        json!({ "holds": equality.holds(), "pairs": equality.pairs_checked }),
    );
    report.fold(Verdict::from_bool(axioms.holds() && equality.holds()));
    let file = serde_json::to_value(WitnessFile::from_mapping(alg, &beta))?;
    if let Some(path) = out {
        write_json(path, &file)?;
        report.line(format!("witness written to {}", path.display()));
    }
    report.field("witness", file);
    Ok(report)
}

#[derive(Debug, Clone)]
pub enum SearchQuery<'a> {
    Csm { strong: bool },
    Witness,
    Extend(&'a Path),
}

pub fn search_cmd<A: CliAlgebra>(
    alg: &A,
    subset: Option<&Path>,
    query: SearchQuery<'_>,
    budget: &SearchBudget,
    out: Option<&Path>,
    log: Option<&Path>,
    settings: &Settings,
) -> Result<Report, InputError> {
    let mut report = Report::new();
    let (record, output): (_, Option<Value>) = match query {
        SearchQuery::Csm { strong } => {
            let result = alg.search_csm(subset_domain(alg, subset, settings)?, strong, budget)?;
            let output = found_csm(&mut report, alg, &result.outcome, strong)?;
            (
                result.log_record(if strong { "csm-strong" } else { "csm" }),
                output,
            )
        }
        SearchQuery::Extend(path) => {
            let file: WitnessFile = read_json(path)?;
            let beta = file.mapping(alg, settings.max_s)?;
            let result = alg.extend(&beta, budget)?;
            let output = found_csm(&mut report, alg, &result.outcome, false)?;
            if let Some(csm) = result.outcome.found() {
                let tops_match = csm
                    .domain()
                    .full()
                    .subsets()
                    .all(|x| csm.top_value(x) == beta.value(x));
                report.line(if tops_match {
                    "⟨X|{1}⟩ = β(X) for every X"
                } else {
                    "found mapping does not extend β"
                });
                report.fold(Verdict::from_bool(tops_match));
            }
            (result.log_record("extend"), output)
        }
        SearchQuery::Witness => {
            let result = alg.search_witness(subset_domain(alg, subset, settings)?, budget)?;
            let output = match result.outcome.found() {
                Some(beta) => {
                    let ok = verify_witness(alg, beta)?.holds();
                    report.line(if ok {
                        "found witness re-verified: (A1)-(A3) hold"
                    } else {
                        "found witness fails (A1)-(A3)"
                    });
                    report.fold(Verdict::from_bool(ok));
                    Some(serde_json::to_value(WitnessFile::from_mapping(alg, beta))?)
                }
                None => None,
            };
            (result.log_record("witness"), output)
        }
    };
    let verdict = match record.outcome {
        "found" => Verdict::Holds,
        "exhausted" => Verdict::Violated,
        _ => Verdict::Inconclusive,
    };
    report.fold(verdict);
    match record.outcome {
        "exhausted" => report.line("search space exhausted: no solution exists"),
        "budget-out" => report.line("budget exhausted before a decision; nothing is known"),
        _ => {}
    }
    report.line(format!(
        "{}: {} after {} nodes in {:.1} ms (instance {})",
        record.query,
        record.outcome,
        record.nodes,
        record.elapsed_ms,
        &record.instance[..16]
    ));
    let line = record.to_json_line();
    if let Some(path) = log {
        let mut f = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| InputError(format!("cannot open {}: {e}", path.display())))?;
        writeln!(f, "{line}")
            .map_err(|e| InputError(format!("cannot write {}: {e}", path.display())))?;
    }
    report.field("log", serde_json::from_str(&line)?);
    if let Some(value) = output {
        if let Some(path) = out {
            write_json(path, &value)?;
            report.line(format!("result written to {}", path.display()));
        }
        report.field("result", value);
    }
    Ok(report)
}

fn found_csm<A: CliAlgebra>(
    report: &mut Report,
    alg: &A,
    outcome: &SearchOutcome<Csm<A::Elem>>,
    strong: bool,
) -> Result<Option<Value>, InputError> {
    let Some(csm) = outcome.found() else {
        return Ok(None);
    };
    verify_into(report, alg, csm, strong)?;
    Ok(Some(serde_json::to_value(CsmFile::from_csm(alg, csm))?))
}
