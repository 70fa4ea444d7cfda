//! Backtracking search for mappings over small finite effect algebras.
//!
//! Values are tried in the algebra's canonical element order. Each constraint
//! is checked as soon as the last entry it mentions has been assigned, so
//! "exhausted" means no table of values in `E` exists.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::csm::{Csm, CsmDomain, CsmError};
use crate::effect::{FiniteEffectAlgebra, TableDescription};
use crate::rational::Rational;
use crate::subset::{all_subsets, Subset};
use crate::witness::{GroupElement, IntervalEffectAlgebra, WitnessError, WitnessMapping};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    /// Maximum number of value assignments tried.
    pub max_nodes: u64,
    pub time_limit: Option<Duration>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: 10_000_000,
            time_limit: None,
        }
    }
}

impl SearchBudget {
    pub fn nodes(max_nodes: u64) -> Self {
        SearchBudget {
            max_nodes,
            time_limit: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome<T> {
    Found(T),
    /// The whole space was explored without a solution.
    Exhausted,
    /// The budget ran out first; nothing is known.
    BudgetOut,
}

impl<T> SearchOutcome<T> {
    pub fn label(&self) -> &'static str {
        match self {
            SearchOutcome::Found(_) => "found",
            SearchOutcome::Exhausted => "exhausted",
            SearchOutcome::BudgetOut => "budget-out",
        }
    }

    pub fn found(&self) -> Option<&T> {
        match self {
            SearchOutcome::Found(t) => Some(t),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult<T> {
    pub outcome: SearchOutcome<T>,
    pub nodes: u64,
    pub elapsed: Duration,
    /// SHA-256 of a canonical rendering of the query.
    pub instance: String,
}

impl<T> SearchResult<T> {
    pub fn log_record(&self, query: &'static str) -> SearchLogRecord {
        SearchLogRecord {
            query,
            instance: self.instance.clone(),
            outcome: self.outcome.label(),
            nodes: self.nodes,
            elapsed_ms: self.elapsed.as_secs_f64() * 1e3,
        }
    }
}

/// One line of the JSON-lines result log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchLogRecord {
    pub query: &'static str,
    pub instance: String,
    pub outcome: &'static str,
    pub nodes: u64,
    pub elapsed_ms: f64,
}

impl SearchLogRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("log records serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("the algebra has {0} elements; search handles at most 65535")]
    TooLarge(usize),
    #[error(transparent)]
    Csm(#[from] CsmError),
    #[error(transparent)]
    Witness(#[from] WitnessError),
}

/// The algebra in index form: elements `0..m` in canonical order.
struct Indexed<E> {
    elements: Vec<E>,
    index: HashMap<E, u16>,
    leq: Vec<bool>,
    /// `ominus[b * m + a] = b ⊖ a`
    ominus: Vec<Option<u16>>,
}

impl<E: Clone + Eq + std::hash::Hash> Indexed<E> {
    fn new<A: FiniteEffectAlgebra<Elem = E>>(alg: &A) -> Result<Self, SearchError> {
        let elements = alg.elements();
        let m = elements.len();
        if m > u16::MAX as usize {
            return Err(SearchError::TooLarge(m));
        }
        let index: HashMap<E, u16> = elements.iter().cloned().zip(0..).collect();
        let mut leq = vec![false; m * m];
        let mut ominus = vec![None; m * m];
        for (bi, b) in elements.iter().enumerate() {
            for (ai, a) in elements.iter().enumerate() {
                let d = alg.ominus(b, a);
                leq[ai * m + bi] = d.is_some();
                ominus[bi * m + ai] = d.map(|d| index[&d]);
            }
        }
        Ok(Indexed {
            elements,
            index,
            leq,
            ominus,
        })
    }

    fn m(&self) -> usize {
        self.elements.len()
    }

    fn id(&self, e: &E) -> u16 {
        self.index[e]
    }
}

enum Constraint {
    /// `val[a] ≤ val[b]`
    Leq(usize, usize),
    /// `val[l1] ⊖ val[l2]` is defined and equals `val[r1] ⊖ val[r2]`
    Exchange {
        l1: usize,
        l2: usize,
        r1: usize,
        r2: usize,
    },
    /// `Σ sign · embed(val[var]) ≥ 0`
    NonNegative(Vec<(usize, bool)>),
}

struct Problem {
    /// Variables in assignment order.
    order: Vec<usize>,
    /// Candidate values per position.
    domains: Vec<Vec<u16>>,
    /// Constraints whose last variable sits at each position.
    checks: Vec<Vec<Constraint>>,
    n_vars: usize,
}

impl Problem {
    fn new(
        n_vars: usize,
        order: Vec<usize>,
        m: usize,
        forced: &[Option<u16>],
        conflict: bool,
        constraints: Vec<Constraint>,
    ) -> Self {
        let mut position = vec![0; n_vars];
        for (p, &v) in order.iter().enumerate() {
            position[v] = p;
        }
        let domains = order
            .iter()
            .map(|&v| match forced[v] {
                _ if conflict => Vec::new(),
                Some(x) => vec![x],
                None => (0..m as u16).collect(),
            })
            .collect();
        let mut checks: Vec<Vec<Constraint>> = (0..order.len()).map(|_| Vec::new()).collect();
        for c in constraints {
            let last = match &c {
                Constraint::Leq(a, b) => position[*a].max(position[*b]),
                Constraint::Exchange { l1, l2, r1, r2 } => [l1, l2, r1, r2]
                    .iter()
                    .map(|&&v| position[v])
                    .max()
                    .unwrap(),
                Constraint::NonNegative(terms) => {
                    terms.iter().map(|&(v, _)| position[v]).max().unwrap()
                }
            };
            checks[last].push(c);
        }
        Problem {
            order,
            domains,
            checks,
            n_vars,
        }
    }
}

struct Solver<'a, E> {
    alg: &'a Indexed<E>,
    embedded: Option<Vec<GroupElement>>,
}

impl<E: Clone + Eq + std::hash::Hash> Solver<'_, E> {
    fn holds(&self, c: &Constraint, vals: &[u16]) -> bool {
        let m = self.alg.m();
        match *c {
            Constraint::Leq(a, b) => self.alg.leq[vals[a] as usize * m + vals[b] as usize],
            Constraint::Exchange { l1, l2, r1, r2 } => {
                let left = self.alg.ominus[vals[l1] as usize * m + vals[l2] as usize];
                left.is_some() && left == self.alg.ominus[vals[r1] as usize * m + vals[r2] as usize]
            }
            Constraint::NonNegative(ref terms) => {
                let g = self
                    .embedded
                    .as_ref()
                    .expect("witness search embeds values");
                let dim = g[0].dim();
                let mut acc = vec![Rational::zero(); dim];
                for &(v, positive) in terms {
                    for (slot, x) in acc.iter_mut().zip(&g[vals[v] as usize].0) {
                        *slot = if positive { &*slot + x } else { &*slot - x };
                    }
                }
                acc.iter().all(|x| !x.is_negative())
            }
        }
    }

    fn run(&self, p: &Problem, budget: &SearchBudget) -> (Option<Vec<u16>>, bool, u64) {
        let start = Instant::now();
        let len = p.order.len();
        let mut vals = vec![0u16; p.n_vars];
        let mut next = vec![0usize; len];
        let mut nodes = 0u64;
        let mut pos = 0usize;
        if len == 0 {
            return (Some(vals), false, 0);
        }
        loop {
            let var = p.order[pos];
            let mut placed = false;
            while next[pos] < p.domains[pos].len() {
                if nodes >= budget.max_nodes {
                    return (None, true, nodes);
                }
                if nodes.is_multiple_of(4096)
                    && budget.time_limit.is_some_and(|t| start.elapsed() > t)
                {
                    return (None, true, nodes);
                }
                nodes += 1;
                vals[var] = p.domains[pos][next[pos]];
                next[pos] += 1;
                if p.checks[pos].iter().all(|c| self.holds(c, &vals)) {
                    placed = true;
                    break;
                }
            }
            if placed {
                pos += 1;
                if pos == len {
                    return (Some(vals), false, nodes);
                }
                next[pos] = 0;
            } else if pos == 0 {
                return (None, false, nodes);
            } else {
                pos -= 1;
            }
        }
    }
}

fn instance_hash<E: Clone + Eq + std::hash::Hash>(
    kind: &str,
    describe: impl Fn(&E) -> String,
    alg: &Indexed<E>,
    sums: &[Option<u16>],
    s: &[E],
    extra: &[String],
) -> String {
    let mut h = Sha256::new();
    let mut line = |text: String| {
        h.update(text.as_bytes());
        h.update(b"\n");
    };
    line(kind.to_string());
    line(
        alg.elements
            .iter()
            .map(&describe)
            .collect::<Vec<_>>()
            .join(","),
    );
    line(
        sums.iter()
            .map(|s| s.map_or("-".to_string(), |x| x.to_string()))
            .collect::<Vec<_>>()
            .join(","),
    );
    line(s.iter().map(&describe).collect::<Vec<_>>().join(","));
    for e in extra {
        line(e.clone());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn sum_table<A: FiniteEffectAlgebra>(alg: &A, ix: &Indexed<A::Elem>) -> Vec<Option<u16>> {
    let mut out = Vec::with_capacity(ix.m() * ix.m());
    for a in &ix.elements {
        for b in &ix.elements {
            out.push(alg.oplus(a, b).map(|c| ix.id(&c)));
        }
    }
    out
}

/// The constraint system of (a), (b) and (e) or (e*), with entries forced by
/// (c), (d) and `⟨{c}|{1}⟩ = c`, plus any extra forced `⟨X|{1}⟩`.
fn csm_problem<E: Clone + Eq + std::hash::Hash + std::fmt::Debug>(
    ix: &Indexed<E>,
    domain: &CsmDomain<E>,
    zero: u16,
    strong: bool,
    top_values: Option<&[E]>,
) -> Problem {
    let n = domain.len();
    let var = |u: Subset, v: Subset| (u.bits() as usize) << n | v.bits() as usize;
    let n_vars = 1 << (2 * n);
    let unit = domain.unit_set();

    let mut forced: Vec<Option<u16>> = vec![None; n_vars];
    let mut conflict = false;
    let mut force = |slot: usize, value: u16| match forced[slot] {
        Some(old) if old != value => conflict = true,
        _ => forced[slot] = Some(value),
    };
    for u in all_subsets(n) {
        force(var(u, Subset::EMPTY), zero);
    }
    for i in 0..n {
        let c = ix.id(domain.element(i));
        force(var(Subset::EMPTY, Subset::singleton(i)), c);
        force(var(Subset::singleton(i), unit), c);
    }
    if let Some(tops) = top_values {
        for u in all_subsets(n) {
            force(var(u, unit), ix.id(&tops[u.bits() as usize]));
        }
    }

    let mut constraints = Vec::new();
    for u in all_subsets(n) {
        for v in all_subsets(n) {
            for c in (0..n).filter(|&c| !v.contains(c)) {
                // covering pairs suffice for (a) by transitivity
                constraints.push(Constraint::Leq(var(u, v), var(u, v.with(c))));
            }
            constraints.push(Constraint::Leq(var(u, v), var(u, unit)));
            for c in 0..n {
                if !strong && u.union(v).contains(c) {
                    continue;
                }
                let uc = u.with(c);
                constraints.push(Constraint::Exchange {
                    l1: var(uc, unit),
                    l2: var(uc, v),
                    r1: var(u, v.with(c)),
                    r2: var(u, v),
                });
            }
        }
    }

    let mut order: Vec<usize> = (0..n_vars).collect();
    order.sort_by_key(|&i| {
        let u = Subset::from_bits((i >> n) as u32);
        let v = Subset::from_bits((i & ((1 << n) - 1)) as u32);
        (u.len() + v.len(), i)
    });
    Problem::new(n_vars, order, ix.m(), &forced, conflict, constraints)
}

fn search_csm_inner<A: FiniteEffectAlgebra>(
    alg: &A,
    domain: CsmDomain<A::Elem>,
    strong: bool,
    top_values: Option<&[A::Elem]>,
    kind: &'static str,
    budget: &SearchBudget,
) -> Result<SearchResult<Csm<A::Elem>>, SearchError> {
    let start = Instant::now();
    let ix = Indexed::new(alg)?;
    let extra: Vec<String> = top_values
        .map(|t| t.iter().map(|e| alg.describe(e)).collect())
        .unwrap_or_default();
    let instance = instance_hash(
        kind,
        |e| alg.describe(e),
        &ix,
        &sum_table(alg, &ix),
        domain.elements(),
        &extra,
    );
    let problem = csm_problem(&ix, &domain, ix.id(&alg.zero()), strong, top_values);
    let solver = Solver {
        alg: &ix,
        embedded: None,
    };
    let (solution, out_of_budget, nodes) = solver.run(&problem, budget);
    let outcome = match solution {
        Some(vals) => {
            let values = vals
                .iter()
                .map(|&x| ix.elements[x as usize].clone())
                .collect();
            SearchOutcome::Found(Csm::from_table(alg, domain, values)?)
        }
        None if out_of_budget => SearchOutcome::BudgetOut,
        None => SearchOutcome::Exhausted,
    };
    Ok(SearchResult {
        outcome,
        nodes,
        elapsed: start.elapsed(),
        instance,
    })
}

/// Searches for a mapping on `S` satisfying (a)–(e), and (e*) when `strong`.
pub fn search_csm<A: FiniteEffectAlgebra>(
    alg: &A,
    domain: CsmDomain<A::Elem>,
    strong: bool,
    budget: &SearchBudget,
) -> Result<SearchResult<Csm<A::Elem>>, SearchError> {
    let kind = if strong { "csm-strong" } else { "csm" };
    search_csm_inner(alg, domain, strong, None, kind, budget)
}

/// Searches for a mapping with `⟨X|{1}⟩ = β(X)` for every `X ⊆ S`.
pub fn csm_extending_witness<A: FiniteEffectAlgebra>(
    alg: &A,
    beta: &WitnessMapping<A::Elem>,
    budget: &SearchBudget,
) -> Result<SearchResult<Csm<A::Elem>>, SearchError> {
    search_csm_inner(
        alg,
        beta.domain().clone(),
        false,
        Some(beta.values()),
        "extend",
        budget,
    )
}

/// Searches for `β` satisfying (A1)–(A3), assigning `β(X)` in increasing
/// `(|X|, X)` order and checking `D_β(X, A) ≥ 0` once `β(A)` is set.
pub fn search_witness<A: FiniteEffectAlgebra + IntervalEffectAlgebra>(
    alg: &A,
    domain: CsmDomain<A::Elem>,
    budget: &SearchBudget,
) -> Result<SearchResult<WitnessMapping<A::Elem>>, SearchError> {
    let start = Instant::now();
    let ix = Indexed::new(alg)?;
    let embedded = ix
        .elements
        .iter()
        .map(|e| alg.embed(e).ok_or(WitnessError::NotInterval))
        .collect::<Result<Vec<_>, _>>()?;
    let instance = instance_hash(
        "witness",
        |e| alg.describe(e),
        &ix,
        &sum_table(alg, &ix),
        domain.elements(),
        &[],
    );

    let n = domain.len();
    let n_vars = 1 << n;
    let mut forced = vec![None; n_vars];
    forced[0] = Some(ix.id(&alg.one()));
    for i in 0..n {
        forced[1 << i] = Some(ix.id(domain.element(i)));
    }
    let mut constraints = Vec::new();
    for a in all_subsets(n) {
        for x in a.subsets() {
            let terms = a
                .difference(x)
                .subsets()
                .map(|y| (x.union(y).bits() as usize, y.len() % 2 == 0))
                .collect();
            constraints.push(Constraint::NonNegative(terms));
        }
    }
    let mut order: Vec<usize> = (0..n_vars).collect();
    order.sort_by_key(|&i| (i.count_ones(), i));
    let problem = Problem::new(n_vars, order, ix.m(), &forced, false, constraints);
    let solver = Solver {
        alg: &ix,
        embedded: Some(embedded),
    };
    let (solution, out_of_budget, nodes) = solver.run(&problem, budget);
    let outcome = match solution {
        Some(vals) => {
            let values = vals
                .iter()
                .map(|&x| ix.elements[x as usize].clone())
                .collect();
            SearchOutcome::Found(WitnessMapping::new(alg, domain, values)?)
        }
        None if out_of_budget => SearchOutcome::BudgetOut,
        None => SearchOutcome::Exhausted,
    };
    Ok(SearchResult {
        outcome,
        nodes,
        elapsed: start.elapsed(),
        instance,
    })
}

/// A finite algebra written out as a table, with interval coordinates when
/// the algebra has an embedding. Element names come from `describe`.
pub fn tabulate<A: FiniteEffectAlgebra + IntervalEffectAlgebra>(alg: &A) -> TableDescription {
    let elements = alg.elements();
    let names: Vec<String> = elements.iter().map(|e| alg.describe(e)).collect();
    let mut sum = Vec::new();
    for (i, a) in elements.iter().enumerate() {
        for (j, b) in elements.iter().enumerate() {
            if let Some(c) = alg.oplus(a, b) {
                let k = elements
                    .iter()
                    .position(|e| *e == c)
                    .expect("closed under ⊕");
                sum.push([names[i].clone(), names[j].clone(), names[k].clone()]);
            }
        }
    }
    let interval = alg.group_dim().map(|_| {
        elements
            .iter()
            .zip(&names)
            .map(|(e, name)| (name.clone(), alg.embed(e).expect("embedding is total").0))
            .collect()
    });
    TableDescription {
        elements: names,
        sum,
        zero: alg.describe(&alg.zero()),
        unit: alg.describe(&alg.one()),
        commutative: false,
        interval,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csm::{verify_csm, verify_strong};
    use crate::effect::{EffectAlgebra, MvChainProduct, TableEffectAlgebra};
    use crate::witness::verify_witness;

    fn chain(k: u32) -> TableEffectAlgebra {
        TableEffectAlgebra::new(&tabulate(&MvChainProduct::new(vec![k]))).unwrap()
    }

    #[test]
    fn tabulated_chain_is_interval() {
        let t = chain(2);
        assert_eq!(t.names(), &["0", "1/2", "1"]);
        assert!(t.is_interval());
    }

    #[test]
    fn unit_only_is_immediate() {
        let t = chain(2);
        let domain = CsmDomain::new(&t, vec![], 5).unwrap();
        let r = search_csm(&t, domain, true, &SearchBudget::default()).unwrap();
        let csm = r.outcome.found().expect("trivial mapping");
        assert!(verify_csm(&t, csm).unwrap().holds());
        // four entries, all forced
        assert_eq!(r.nodes, 4);
    }

    #[test]
    fn chain_strong_found_and_deterministic() {
        let t = chain(2);
        let half = t.id("1/2").unwrap();
        let run = || {
            let domain = CsmDomain::new(&t, vec![half], 5).unwrap();
            search_csm(&t, domain, true, &SearchBudget::default()).unwrap()
        };
        let r = run();
        let csm = r.outcome.found().unwrap();
        assert!(verify_csm(&t, csm).unwrap().holds());
        assert!(verify_strong(&t, csm).unwrap().holds());
        let again = run();
        assert_eq!(again.nodes, r.nodes);
        assert_eq!(again.instance, r.instance);
        assert_eq!(again.outcome, r.outcome);
    }

    #[test]
    fn tiny_budget_is_inconclusive() {
        let t = chain(2);
        let half = t.id("1/2").unwrap();
        let domain = CsmDomain::new(&t, vec![half], 5).unwrap();
        let r = search_csm(&t, domain, false, &SearchBudget::nodes(1)).unwrap();
        assert_eq!(r.outcome, SearchOutcome::BudgetOut);
        assert_eq!(r.log_record("csm").outcome, "budget-out");
    }

    #[test]
    fn witness_search_on_chain() {
        let t = chain(2);
        let half = t.id("1/2").unwrap();
        let domain = CsmDomain::new(&t, vec![half], 5).unwrap();
        let r = search_witness(&t, domain, &SearchBudget::default()).unwrap();
        let beta = r.outcome.found().unwrap();
        assert!(verify_witness(&t, beta).unwrap().holds());
        assert_eq!(beta.value(Subset::from_bits(0b11)), &half);
    }

    #[test]
    fn extension_conflict_is_exhausted() {
        let t = chain(2);
        let half = t.id("1/2").unwrap();
        let domain = CsmDomain::new(&t, vec![half], 5).unwrap();
        // β({1/2}) = 1 contradicts ⟨{c}|{1}⟩ = c
        let beta = WitnessMapping::new(&t, domain, vec![t.one(), t.one(), t.one(), half]).unwrap();
        let r = csm_extending_witness(&t, &beta, &SearchBudget::default()).unwrap();
        assert_eq!(r.outcome, SearchOutcome::Exhausted);
        assert_eq!(r.nodes, 0);
    }
}
