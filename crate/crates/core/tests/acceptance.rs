//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines reach stdout uncaptured.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use csm_core::boolean::FiniteBooleanAlgebra;
use csm_core::csm::{
    csm_from_observable, csm_from_observable_sweep, csm_joinmeet, csm_product, law_suite,
    strong_property_suite, verify_csm, verify_strong, Axiom, Csm, CsmDomain, LawCheck,
    PreimagePolicy,
};
use csm_core::effect::{EffectAlgebra, MvChainProduct, TableEffectAlgebra, TupleEffect};
use csm_core::observable::{
    build_alpha_s, check_decomposition, check_diagram, verify_observable, BuildOptions, Observable,
    VerifyMode,
};
use csm_core::search::{
    csm_extending_witness, search_csm, search_witness, tabulate, SearchBudget, SearchOutcome,
};
use csm_core::subset::{all_subsets, Subset};
use csm_core::witness::{
    check_d_equality, d_beta, d_beta_recursive, verify_witness, witness_from_csm, GroupElement,
    IntervalEffectAlgebra, WitnessMapping,
};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn laws_hold(what: &str, checks: &[LawCheck]) -> Result<usize, String> {
    let mut instances = 0;
    for c in checks {
        instances += c.instances;
        ensure(c.holds(), || {
            format!("{what}: {} fails at {:?}", c.name, c.first_failure)
        })?;
    }
    Ok(instances)
}

/// Sums (a)–(e) and (e*) instance counts, failing on any violation.
fn fully_strong<A: EffectAlgebra>(
    what: &str,
    alg: &A,
    csm: &Csm<A::Elem>,
) -> Result<usize, String> {
    let report = verify_csm(alg, csm)
        .map_err(|e| e.to_string())?
        .merge(verify_strong(alg, csm).map_err(|e| e.to_string())?);
    ensure(report.holds(), || {
        format!(
            "{what}: {:?}",
            report.violations().next().map(|v| (v.axiom, v.u, v.v, v.c))
        )
    })?;
    Ok(report.checks.iter().map(|c| c.instances).sum())
}

// ---------------------------------------------------------------------------

fn criterion_1() -> Outcome {
    let mut mappings = 0;
    let mut instances = 0;
    for orders in [vec![2, 2], vec![3, 4]] {
        let m = MvChainProduct::new(orders.clone());
        for triple in combinations(&non_unit(&m), 3) {
            let domain = CsmDomain::new(&m, triple, 5).map_err(|e| e.to_string())?;
            ensure(domain.len() == 4, || "S should have four elements".into())?;
            let csm = csm_joinmeet(&m, domain).map_err(|e| e.to_string())?;
            let report = verify_csm(&m, &csm).map_err(|e| e.to_string())?;
            let strong = verify_strong(&m, &csm).map_err(|e| e.to_string())?;
            ensure(
                report.check(Axiom::E).unwrap().instances == 4 * 8 * 8,
                || "(e) instance count".into(),
            )?;
            ensure(
                strong.check(Axiom::EStar).unwrap().instances == 16 * 16 * 4,
                || "(e*) instance count".into(),
            )?;
            instances += fully_strong(&format!("{orders:?}"), &m, &csm)?;
            mappings += 1;
        }
    }
    Ok(format!("{mappings} join/meet mappings over [2,2] and [3,4], every 3-subset of non-unit elements; {instances} axiom instances, none violated"))
}

fn criterion_2() -> Outcome {
    let alg1 = tuple(1);
    let alg2 = tuple(2);
    let scalars = vec![
        scalar(1, 2),
        scalar(1, 3),
        scalar(2, 3),
        scalar(1, 4),
        scalar(3, 4),
    ];
    let pairs = vec![
        pair((1, 2), (1, 3)),
        pair((1, 4), (1, 1)),
        pair((0, 1), (1, 2)),
        pair((2, 3), (2, 3)),
    ];
    let mut checked = 0;
    let mut half_instance = None;
    for (alg, pool) in [(&alg1, &scalars), (&alg2, &pairs)] {
        for k in 1..=3 {
            for s in combinations(pool, k) {
                let domain = CsmDomain::new(alg, s, 5).map_err(|e| e.to_string())?;
                let csm = csm_product(alg, domain);
                let report = verify_csm(alg, &csm).map_err(|e| e.to_string())?;
                ensure(report.holds(), || {
                    format!("(a)-(e) fail for {:?}", csm.domain().elements())
                })?;
                let strong = verify_strong(alg, &csm).map_err(|e| e.to_string())?;
                ensure(strong.status(Axiom::EStar) == Some(false), || {
                    "(e*) unexpectedly holds".into()
                })?;
                for (i, c) in csm.domain().elements().iter().enumerate() {
                    if c.is_idempotent() {
                        continue;
                    }
                    let cs = Subset::singleton(i);
                    let v = strong
                        .violations()
                        .find(|v| v.u == cs && v.v == cs && v.c == Some(i))
                        .ok_or_else(|| format!("no (e*) violation at U=V={{{c:?}}}"))?;
                    let expected_left = alg.ominus(c, &c.product(c));
                    ensure(
                        v.left == expected_left && v.right == Some(alg.zero()),
                        || format!("U=V={{{c:?}}}: left {:?}, right {:?}", v.left, v.right),
                    )?;
                    if *c == scalar(1, 2) {
                        half_instance = Some((v.left.clone(), v.right.clone()));
                    }
                }
                checked += 1;
            }
        }
    }
    let (left, right) = half_instance.ok_or("c = 1/2 never examined")?;
    ensure(
        left == Some(scalar(1, 4)) && right == Some(scalar(0, 1)),
        || format!("c = 1/2 gives left {left:?}, right {right:?}"),
    )?;
    Ok(format!("{checked} product mappings satisfy (a)-(e) and fail (e*); c=1/2, U=V={{c}}: left 1/4, right 0"))
}

/// Derived-law sweep for one mapping; returns the number of instances.
fn law_sweep<A: EffectAlgebra>(what: &str, alg: &A, csm: &Csm<A::Elem>) -> Result<usize, String> {
    let report = verify_csm(alg, csm).map_err(|e| e.to_string())?;
    ensure(report.holds(), || format!("{what} is not a valid mapping"))?;
    let mut instances = laws_hold(what, &law_suite(alg, csm))?;
    let n = csm.domain().len();
    for a in all_subsets(n) {
        let d = check_decomposition(alg, csm, a);
        ensure(d.holds, || {
            format!("{what}: decomposition of unit fails at A={a:?}")
        })?;
        instances += 1;
        for b in all_subsets(n).filter(|b| a.is_subset_of(*b)) {
            let diagram = check_diagram(alg, csm, a, b).map_err(|e| e.to_string())?;
            ensure(diagram.holds, || {
                format!("{what}: diagram fails at A={a:?} B={b:?}")
            })?;
            ensure(diagram.exhaustive || a.len() > 3, || {
                "diagram not exhaustive".into()
            })?;
            instances += diagram.families;
        }
    }
    Ok(instances)
}

fn builtin_tuple_mappings() -> Vec<(String, Csm<TupleEffect>)> {
    let mut out = Vec::new();
    let alg1 = tuple(1);
    let alg2 = tuple(2);
    for s in [
        vec![scalar(1, 2)],
        vec![scalar(1, 2), scalar(1, 3)],
        vec![scalar(1, 3), scalar(1, 2), scalar(3, 4)],
    ] {
        let domain = CsmDomain::new(&alg1, s, 5).unwrap();
        out.push((
            format!("product {:?}", domain.elements()),
            csm_product(&alg1, domain.clone()),
        ));
        out.push((
            format!("join/meet {:?}", domain.elements()),
            csm_joinmeet(&alg1, domain).unwrap(),
        ));
    }
    let s = vec![
        pair((1, 2), (1, 3)),
        pair((1, 4), (1, 1)),
        pair((0, 1), (1, 2)),
    ];
    let domain = CsmDomain::new(&alg2, s, 5).unwrap();
    out.push((
        format!("product {:?}", domain.elements()),
        csm_product(&alg2, domain.clone()),
    ));
    out.push((
        format!("join/meet {:?}", domain.elements()),
        csm_joinmeet(&alg2, domain).unwrap(),
    ));
    out
}

fn criterion_3() -> Outcome {
    let mut mappings = 0;
    let mut instances = 0;
    for (name, csm) in builtin_tuple_mappings() {
        let alg = tuple(csm.domain().element(0).dim());
        instances += law_sweep(&name, &alg, &csm)?;
        mappings += 1;
    }
    for orders in [vec![2, 2], vec![3, 4]] {
        let m = MvChainProduct::new(orders);
        for triple in combinations(&non_unit(&m), 3) {
            let csm = csm_joinmeet(&m, CsmDomain::new(&m, triple, 5).unwrap()).unwrap();
            instances += law_sweep("join/meet", &m, &csm)?;
            mappings += 1;
        }
    }
    let (b, alpha) = identity_observable(3);
    let s: Vec<_> = (1..4).map(|x| boolean_element(&b, 3, x)).collect();
    let derived = csm_from_observable(
        &b,
        &alpha,
        CsmDomain::new(&b, s, 5).unwrap(),
        &PreimagePolicy::First,
    )
    .map_err(|e| e.to_string())?;
    instances += law_sweep("observable-derived", &b, &derived)?;
    mappings += 1;
    Ok(format!("{mappings} mappings with |S| <= 4: monotonicity and D laws, decomposition of unit and diagram commutation hold on {instances} instances"))
}

fn criterion_4() -> Outcome {
    let mut summary = Vec::new();
    let mut slowest = Duration::ZERO;
    let alg = tuple(1);
    let m = MvChainProduct::new(vec![2, 2]);
    let cases: Vec<(String, Box<dyn Fn() -> Result<(usize, u64, usize), String>>)> = vec![
        (
            "S={1}".into(),
            Box::new(move || {
                run_theorem_1(
                    &tuple(1),
                    &csm_product(&tuple(1), CsmDomain::new(&tuple(1), vec![], 5).unwrap()),
                )
            }),
        ),
        (
            "product S={1/2,1}".into(),
            Box::new(move || {
                let d = CsmDomain::new(&alg, vec![scalar(1, 2)], 5).unwrap();
                run_theorem_1(&alg, &csm_product(&alg, d))
            }),
        ),
        (
            "product S={1/2,1/3,1}".into(),
            Box::new(|| {
                let alg = tuple(1);
                let d = CsmDomain::new(&alg, vec![scalar(1, 2), scalar(1, 3)], 5).unwrap();
                run_theorem_1(&alg, &csm_product(&alg, d))
            }),
        ),
        (
            "join/meet [2,2] |S|=3".into(),
            Box::new(move || {
                let s = vec![
                    m.element(vec![1, 0]).unwrap(),
                    m.element(vec![1, 2]).unwrap(),
                ];
                let csm = csm_joinmeet(&m, CsmDomain::new(&m, s, 5).unwrap()).unwrap();
                run_theorem_1(&m, &csm)
            }),
        ),
        (
            "product [0,1]^2 |S|=3".into(),
            Box::new(|| {
                let alg = tuple(2);
                let d = CsmDomain::new(&alg, vec![pair((1, 2), (1, 3)), pair((1, 4), (1, 1))], 5)
                    .unwrap();
                run_theorem_1(&alg, &csm_product(&alg, d))
            }),
        ),
    ];
    for (name, run) in cases {
        let start = Instant::now();
        let (s, size, pairs) = run().map_err(|e| format!("{name}: {e}"))?;
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);
        if s == 3 {
            ensure(elapsed < Duration::from_secs(60), || {
                format!("{name} took {elapsed:?}")
            })?;
        }
        summary.push(format!("{name}: {size} elements, {pairs} disjoint pairs"));
    }
    Ok(format!("{}; slowest {:.2?}", summary.join("; "), slowest))
}

fn run_theorem_1<A: EffectAlgebra>(
    alg: &A,
    csm: &Csm<A::Elem>,
) -> Result<(usize, u64, usize), String> {
    let options = BuildOptions {
        mode: VerifyMode::Exhaustive,
    };
    let (alpha, cert) = build_alpha_s(alg, csm, &options).map_err(|e| e.to_string())?;
    let n = csm.domain().len();
    let size = alpha.domain().size();
    ensure(size == 1u64 << (1u64 << n), || {
        format!("domain has {size} elements")
    })?;
    let report = verify_observable(alg, &alpha, VerifyMode::Exhaustive);
    ensure(report.passes() && report.exhaustive, || {
        format!("observable check failed: {:?}", report.failure)
    })?;
    ensure(report.pairs_checked == 3usize.pow(1 << n), || {
        "pair count".into()
    })?;
    ensure(cert.witnesses.len() == n, || "missing witnesses".into())?;
    for w in &cert.witnesses {
        ensure(
            alpha.eval(alg, w.family.members()).as_ref() == Some(&w.element),
            || format!("witness for {:?} misses", w.element),
        )?;
        // the family of g^{a}_S({{a}}): every X ⊆ S containing a
        let i = csm.domain().index_of(&w.element).unwrap();
        let expected: Vec<Subset> = all_subsets(n).filter(|x| x.contains(i)).collect();
        ensure(w.family.iter().collect::<Vec<_>>() == expected, || {
            "unexpected witness family".into()
        })?;
    }
    ensure(cert.recheck(alg), || "certificate does not re-check".into())?;
    Ok((n, size, report.pairs_checked))
}

fn criterion_5() -> Outcome {
    // every preimage choice for many observables with |B| <= 16
    let mut observables = 0;
    let mut mappings = 0;
    let chain = MvChainProduct::new(vec![4]);
    for atoms in 1..=4usize {
        for comp in compositions(4, atoms) {
            let values: Vec<_> = comp
                .iter()
                .map(|&j| chain.element(vec![j]).unwrap())
                .collect();
            mappings += sweep_reverse(&chain, Observable::from_atoms(values))?;
            observables += 1;
        }
    }
    let b2 = MvChainProduct::boolean(2);
    for atoms in 1..=4usize {
        // each atom of 2^2 goes to exactly one atom of the domain
        for owner in 0..atoms.pow(2) {
            let (first, second) = (owner % atoms, owner / atoms);
            let values: Vec<_> = (0..atoms)
                .map(|i| {
                    let mask = u64::from(i == first) | u64::from(i == second) << 1;
                    boolean_element(&b2, 2, mask)
                })
                .collect();
            mappings += sweep_reverse(&b2, Observable::from_atoms(values))?;
            observables += 1;
        }
    }

    // the non-strong product mapping does not come back
    let alg = tuple(1);
    let original = csm_product(&alg, CsmDomain::new(&alg, vec![scalar(1, 2)], 5).unwrap());
    let (alpha_s, _) =
        build_alpha_s(&alg, &original, &BuildOptions::default()).map_err(|e| e.to_string())?;
    let round_trips = csm_from_observable_sweep(&alg, &alpha_s, original.domain(), 1 << 16)
        .map_err(|e| e.to_string())?;
    for (choice, csm) in &round_trips {
        ensure(
            verify_strong(&alg, csm).map_err(|e| e.to_string())?.holds(),
            || format!("{choice:?} not strong"),
        )?;
        ensure(!csm.same_values(&original), || {
            format!("{choice:?} reproduced the product table")
        })?;
    }
    let c = Subset::singleton(0);
    let first = csm_from_observable(
        &alg,
        &alpha_s,
        original.domain().clone(),
        &PreimagePolicy::First,
    )
    .map_err(|e| e.to_string())?;

    // the identity observable with p_a = a gives back join/meet
    let (b, identity) = identity_observable(3);
    let masks = [0b001u64, 0b011, 0b110];
    let s: Vec<_> = masks.iter().map(|&x| boolean_element(&b, 3, x)).collect();
    let domain = CsmDomain::new(&b, s, 5).unwrap();
    let mut explicit = masks.to_vec();
    explicit.push(0b111);
    let reversed = csm_from_observable(
        &b,
        &identity,
        domain.clone(),
        &PreimagePolicy::Explicit(explicit),
    )
    .map_err(|e| e.to_string())?;
    let direct = csm_joinmeet(&b, domain).map_err(|e| e.to_string())?;
    ensure(reversed.same_values(&direct), || {
        "identity round trip differs from join/meet".into()
    })?;

    Ok(format!(
        "{mappings} mappings from {observables} observables (all preimage choices) pass (e*); product round trip: {} choices, all strong, none equal to the input (<{{c}}|{{c}}> = {:?} vs 1/4); identity observable reproduces join/meet",
        round_trips.len(),
        first.value(c, c)
    ))
}

fn sweep_reverse<A: EffectAlgebra>(alg: &A, alpha: Observable<A::Elem>) -> Result<usize, String> {
    let report = verify_observable(alg, &alpha, VerifyMode::Exhaustive);
    ensure(report.passes(), || "test observable is invalid".into())?;
    let b: FiniteBooleanAlgebra = alpha.domain();
    let mut range: Vec<A::Elem> = Vec::new();
    for x in b.elements() {
        let v = alpha.eval(alg, x).unwrap();
        if v != alg.one() && !range.contains(&v) {
            range.push(v);
        }
    }
    range.truncate(3);
    let domain = CsmDomain::new(alg, range, 5).map_err(|e| e.to_string())?;
    let sweep =
        csm_from_observable_sweep(alg, &alpha, &domain, 1 << 20).map_err(|e| e.to_string())?;
    for (choice, csm) in &sweep {
        fully_strong(&format!("choice {choice:?}"), alg, csm)?;
    }
    Ok(sweep.len())
}

fn criterion_6() -> Outcome {
    let mut mappings = 0;
    let mut instances = 0;
    for (name, csm) in builtin_tuple_mappings() {
        let alg = tuple(csm.domain().element(0).dim());
        let suite = strong_property_suite(&alg, &csm);
        if verify_strong(&alg, &csm).unwrap().holds() {
            instances += laws_hold(&name, &suite)?;
            mappings += 1;
        } else {
            // reported only
            let failing: Vec<_> = suite
                .iter()
                .filter(|c| !c.holds())
                .map(|c| c.name)
                .collect();
            println!("    note: {name} is not strong; failing properties {failing:?}");
        }
    }
    for orders in [vec![2, 2], vec![3, 4]] {
        let m = MvChainProduct::new(orders);
        for triple in combinations(&non_unit(&m), 3) {
            let csm = csm_joinmeet(&m, CsmDomain::new(&m, triple, 5).unwrap()).unwrap();
            instances += laws_hold("join/meet", &strong_property_suite(&m, &csm))?;
            mappings += 1;
        }
    }
    let alg = tuple(1);
    let product = csm_product(
        &alg,
        CsmDomain::new(&alg, vec![scalar(1, 2), scalar(1, 3)], 5).unwrap(),
    );
    let (alpha_s, _) =
        build_alpha_s(&alg, &product, &BuildOptions::default()).map_err(|e| e.to_string())?;
    let derived = csm_from_observable(
        &alg,
        &alpha_s,
        product.domain().clone(),
        &PreimagePolicy::First,
    )
    .map_err(|e| e.to_string())?;
    instances += laws_hold("observable-derived", &strong_property_suite(&alg, &derived))?;
    mappings += 1;
    Ok(format!("{mappings} strong mappings with |S| <= 4: all strong-mapping laws hold on {instances} instances"))
}

fn witness_sweep<A: IntervalEffectAlgebra>(alg: &A, csm: &Csm<A::Elem>) -> Result<usize, String> {
    let beta = witness_from_csm(alg, csm).map_err(|e| e.to_string())?;
    let report = verify_witness(alg, &beta).map_err(|e| e.to_string())?;
    ensure(report.holds(), || {
        format!("witness axioms fail: {report:?}")
    })?;
    let n = csm.domain().len();
    ensure(report.pairs_checked == 3usize.pow(n as u32), || {
        "3^|S| pairs".into()
    })?;
    let eq = check_d_equality(alg, csm, &beta).map_err(|e| e.to_string())?;
    ensure(eq.holds(), || format!("D != D_beta at {:?}", eq.mismatch))?;
    compare_d_beta(alg, &beta)?;
    Ok(eq.pairs_checked)
}

/// Closed form against recursion, and the splitting identity, on all pairs.
fn compare_d_beta<A: IntervalEffectAlgebra>(
    alg: &A,
    beta: &WitnessMapping<A::Elem>,
) -> Result<(), String> {
    let n = beta.domain().len();
    for a in all_subsets(n) {
        for x in a.subsets() {
            let closed = d_beta(alg, beta, x, a).unwrap();
            let rec = d_beta_recursive(alg, beta, x, a).unwrap();
            ensure(closed == rec, || {
                format!("closed {closed:?} vs recursive {rec:?} at X={x:?} A={a:?}")
            })?;
            for c in (0..n).filter(|&c| !a.contains(c)) {
                let ac = a.with(c);
                let split: GroupElement =
                    &d_beta(alg, beta, x, ac).unwrap() + &d_beta(alg, beta, x.with(c), ac).unwrap();
                ensure(split == closed, || {
                    format!("split identity fails at X={x:?} A={a:?} c={c}")
                })?;
            }
        }
    }
    Ok(())
}

fn criterion_7() -> Outcome {
    let mut mappings = 0;
    let mut pairs = 0;
    for (_, csm) in builtin_tuple_mappings() {
        let alg = tuple(csm.domain().element(0).dim());
        pairs += witness_sweep(&alg, &csm)?;
        mappings += 1;
    }
    let m = MvChainProduct::new(vec![3, 4]);
    for triple in combinations(&non_unit(&m), 3) {
        let csm = csm_joinmeet(&m, CsmDomain::new(&m, triple, 5).unwrap()).unwrap();
        pairs += witness_sweep(&m, &csm)?;
        mappings += 1;
    }
    // arbitrary β, valid or not: the two D_β computations still agree
    let alg = tuple(1);
    let domain = CsmDomain::new(&alg, vec![scalar(1, 2), scalar(1, 3), scalar(1, 5)], 5).unwrap();
    let mut k = 0;
    let arbitrary = WitnessMapping::from_fn(domain, |_| {
        k += 3;
        scalar(k % 7, 7)
    });
    compare_d_beta(&alg, &arbitrary)?;

    let product = csm_product(
        &alg,
        CsmDomain::new(&alg, vec![scalar(1, 2), scalar(1, 3)], 5).unwrap(),
    );
    let beta = witness_from_csm(&alg, &product).map_err(|e| e.to_string())?;
    let d = d_beta(&alg, &beta, Subset::EMPTY, Subset::from_bits(0b011)).unwrap();
    ensure(d == GroupElement(vec![r(1, 3)]), || {
        format!("D_beta(0, {{a,b}}) = {d:?}")
    })?;
    Ok(format!("{mappings} mappings: (A1)-(A3) and D = D_beta on {pairs} pairs; closed form = recursion; D_beta(0,{{1/2,1/3}}) = {d}"))
}

fn criterion_8() -> Outcome {
    let budget = SearchBudget {
        max_nodes: 50_000_000,
        time_limit: Some(Duration::from_secs(120)),
    };
    let mut lines = Vec::new();
    let mut mv_instances: Vec<(String, TableEffectAlgebra, Vec<&str>)> = Vec::new();
    let boolean = TableEffectAlgebra::new(&tabulate(&MvChainProduct::boolean(2))).unwrap();
    mv_instances.push(("2^2, S={atom,1}".into(), boolean.clone(), vec!["(1, 0)"]));
    mv_instances.push((
        "2^2, S={both atoms,1}".into(),
        boolean,
        vec!["(1, 0)", "(0, 1)"],
    ));
    let c2 = TableEffectAlgebra::new(&tabulate(&MvChainProduct::new(vec![2]))).unwrap();
    mv_instances.push(("C2, S={1/2,1}".into(), c2, vec!["1/2"]));
    let c4 = TableEffectAlgebra::new(&tabulate(&MvChainProduct::new(vec![4]))).unwrap();
    mv_instances.push(("C4, S={1/4,1/2,1}".into(), c4, vec!["1/4", "1/2"]));
    let c12 = TableEffectAlgebra::new(&tabulate(&MvChainProduct::new(vec![1, 2]))).unwrap();
    mv_instances.push((
        "C1xC2, S={(1,0),(0,1/2),1}".into(),
        c12,
        vec!["(1, 0)", "(0, 1/2)"],
    ));
    let c33 = TableEffectAlgebra::new(&tabulate(&MvChainProduct::new(vec![3, 3]))).unwrap();
    mv_instances.push((
        "C3xC3, S={(1/3,2/3),(1,0),1}".into(),
        c33,
        vec!["(1/3, 2/3)", "(1, 0)"],
    ));

    for (name, alg, names) in &mv_instances {
        let s: Vec<_> = names.iter().map(|n| alg.id(n).unwrap()).collect();
        for strong in [false, true] {
            let domain = CsmDomain::new(alg, s.clone(), 5).unwrap();
            let result =
                search_csm(alg, domain.clone(), strong, &budget).map_err(|e| e.to_string())?;
            ensure(result.elapsed < Duration::from_secs(120), || {
                format!("{name}: too slow")
            })?;
            let csm = match &result.outcome {
                SearchOutcome::Found(csm) => csm,
                other => return Err(format!("{name} strong={strong}: {}", other.label())),
            };
            let report = verify_csm(alg, csm).map_err(|e| e.to_string())?;
            ensure(report.holds(), || {
                format!("{name}: returned mapping fails verification")
            })?;
            if strong {
                ensure(verify_strong(alg, csm).unwrap().holds(), || {
                    format!("{name}: not strong")
                })?;
            }
            // witness and extension searches on the same instance
            let beta = witness_from_csm(alg, csm).map_err(|e| e.to_string())?;
            let extended = csm_extending_witness(alg, &beta, &budget).map_err(|e| e.to_string())?;
            ensure(extended.outcome.found().is_some(), || {
                format!("{name}: no extension of its own witness")
            })?;
            let witness = search_witness(alg, domain, &budget).map_err(|e| e.to_string())?;
            let found = witness
                .outcome
                .found()
                .ok_or_else(|| format!("{name}: witness search failed"))?;
            ensure(verify_witness(alg, found).unwrap().holds(), || {
                format!("{name}: bad witness")
            })?;
            lines.push(format!(
                "{name}{} found in {} nodes",
                if strong { " strong" } else { "" },
                result.nodes
            ));
        }
    }

    let mo2 = mo2();
    let s = vec![mo2.id("a").unwrap(), mo2.id("b").unwrap()];
    for strong in [false, true] {
        let result = search_csm(
            &mo2,
            CsmDomain::new(&mo2, s.clone(), 5).unwrap(),
            strong,
            &budget,
        )
        .map_err(|e| e.to_string())?;
        ensure(matches!(result.outcome, SearchOutcome::Exhausted), || {
            format!("MO2 strong={strong}: {}", result.outcome.label())
        })?;
        ensure(result.elapsed < Duration::from_secs(120), || {
            "MO2 too slow".into()
        })?;
        lines.push(format!(
            "MO2{} exhausted in {} nodes",
            if strong { " strong" } else { "" },
            result.nodes
        ));
    }

    // independent cross-check: no observable from 2^k, k <= 3, reaches both a and b
    let elements = [
        mo2.zero(),
        mo2.id("a").unwrap(),
        mo2.id("na").unwrap(),
        mo2.id("b").unwrap(),
        mo2.id("nb").unwrap(),
        mo2.one(),
    ];
    let (a, b) = (elements[1], elements[3]);
    let mut valid = 0;
    for k in 1..=3u32 {
        let mut digits = vec![0usize; k as usize];
        loop {
            let alpha = Observable::from_atoms(digits.iter().map(|&d| elements[d]).collect());
            if verify_observable(&mo2, &alpha, VerifyMode::Exhaustive).passes() {
                valid += 1;
                let range: Vec<_> = alpha
                    .domain()
                    .elements()
                    .filter_map(|x| alpha.eval(&mo2, x))
                    .collect();
                ensure(!(range.contains(&a) && range.contains(&b)), || {
                    format!("observable {digits:?} reaches a and b")
                })?;
            }
            let mut i = 0;
            loop {
                if i == digits.len() {
                    break;
                }
                digits[i] += 1;
                if digits[i] < elements.len() {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            if i == digits.len() {
                break;
            }
        }
    }
    lines.push(format!(
        "cross-check: {valid} observables from 2^k (k<=3) into MO2, none reaches both a and b"
    ));
    Ok(lines.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Option<u64>); 8] = [
        ("1 join/meet mappings are strong", criterion_1, Some(5)),
        (
            "2 product mappings and the (e*) counterexample",
            criterion_2,
            Some(5),
        ),
        ("3 derived laws of every mapping", criterion_3, Some(30)),
        ("4 observable on the limit algebra", criterion_4, Some(60)),
        ("5 reverse construction and round trips", criterion_5, None),
        ("6 strong mapping properties", criterion_6, None),
        ("7 witness mappings", criterion_7, None),
        ("8 search soundness", criterion_8, None),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(secs)) if elapsed > Duration::from_secs(secs) => {
                Err(format!("took {elapsed:.2?}, limit {secs} s"))
            }
            (other, _) => other,
        };
        match outcome {
            Ok(detail) => println!("PASS criterion {name} [{elapsed:.2?}]: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name} [{elapsed:.2?}]: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
