//! Does every witness mapping extend to a compatibility support mapping?
//! Every witness mapping over small chains with two non-unit elements,
//! each handed to the extension search.

mod common;

use std::collections::BTreeMap;
use std::io::Write;

use csm_core::csm::{verify_csm, CsmDomain};
use csm_core::effect::{EffectAlgebra, FiniteEffectAlgebra, MvChainProduct};
use csm_core::search::{csm_extending_witness, search_csm, SearchBudget, SearchOutcome};
use csm_core::witness::{check_d_equality, verify_witness, WitnessMapping};

#[test]
fn witnesses_on_chains_extend() {
    let budget = SearchBudget::nodes(2_000_000);
    let log_path =
        std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("witness-extension.jsonl");
    let mut log = std::fs::File::create(&log_path).unwrap();
    let mut tally: BTreeMap<&'static str, usize> = BTreeMap::new();
    let mut valid = 0;

    for order in 2..=5u32 {
        let chain = MvChainProduct::new(vec![order]);
        let elements = chain.elements();
        let k = elements.len();
        for (a, b) in (1..order).flat_map(|a| (a + 1..order).map(move |b| (a, b))) {
            let s = vec![
                chain.element(vec![a]).unwrap(),
                chain.element(vec![b]).unwrap(),
            ];
            let domain = CsmDomain::new(&chain, s, 5).unwrap();
            for code in 0..k.pow(4) {
                // the four subsets with two or more members take free values
                let mut digits = code;
                let beta = WitnessMapping::from_fn(domain.clone(), |x| match x.len() {
                    0 => chain.one(),
                    1 => domain.element(x.iter().next().unwrap()).clone(),
                    _ => {
                        let e = elements[digits % k].clone();
                        digits /= k;
                        e
                    }
                });
                if !verify_witness(&chain, &beta).unwrap().holds() {
                    continue;
                }
                valid += 1;
                let result = csm_extending_witness(&chain, &beta, &budget).unwrap();
                writeln!(log, "{}", result.log_record("extend").to_json_line()).unwrap();
                *tally.entry(result.outcome.label()).or_default() += 1;
                match &result.outcome {
                    SearchOutcome::Found(csm) => {
                        assert!(verify_csm(&chain, csm).unwrap().holds());
                        assert!(check_d_equality(&chain, csm, &beta).unwrap().holds());
                    }
                    SearchOutcome::Exhausted => {
                        println!("no extension: order {order}, beta {:?}", beta.values());
                    }
                    SearchOutcome::BudgetOut => {}
                }
            }
        }
    }
    println!(
        "{valid} valid witnesses; outcomes {tally:?}; log at {}",
        log_path.display()
    );
    assert!(valid > 0);
    assert_eq!(tally.get("budget-out"), None);
}

#[test]
fn horizontal_sum_has_no_mapping_over_both_blocks() {
    let mo2 = common::mo2();
    let s = vec![mo2.id("a").unwrap(), mo2.id("b").unwrap()];
    let result = search_csm(
        &mo2,
        CsmDomain::new(&mo2, s, 5).unwrap(),
        false,
        &SearchBudget::default(),
    )
    .unwrap();
    assert!(matches!(result.outcome, SearchOutcome::Exhausted));
    let record = result.log_record("csm");
    let line: serde_json::Value = serde_json::from_str(&record.to_json_line()).unwrap();
    assert_eq!(line["outcome"], "exhausted");
    assert_eq!(line["nodes"], result.nodes);
    assert_eq!(line["instance"].as_str().unwrap().len(), 64);
}

#[test]
fn search_is_reproducible() {
    let chain = MvChainProduct::new(vec![4]);
    let s = vec![
        chain.element(vec![1]).unwrap(),
        chain.element(vec![3]).unwrap(),
    ];
    let domain = CsmDomain::new(&chain, s, 5).unwrap();
    let first = search_csm(&chain, domain.clone(), true, &SearchBudget::default()).unwrap();
    let second = search_csm(&chain, domain, true, &SearchBudget::default()).unwrap();
    assert_eq!(first.nodes, second.nodes);
    assert_eq!(first.instance, second.instance);
    assert!(first
        .outcome
        .found()
        .unwrap()
        .same_values(second.outcome.found().unwrap()));
}
