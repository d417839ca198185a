use std::collections::BTreeSet;

use lgs_core::checker::{explore, prepare, ExploreOptions, Outcome};
use lgs_core::contracts::*;
use lgs_core::models::{assemble_system, TimingTable};
use lgs_core::props::suite;
use lgs_core::ta::System;
use proptest::prelude::*;

fn gc_int() -> GeneralizedContract {
    parse_contract(INTERFACE_CONTRACT).unwrap()
}

fn gc_act() -> GeneralizedContract {
    parse_contract(ACTUATOR_CONTRACT).unwrap()
}

fn names(c: &GeneralizedContract, facet: Facet) -> Vec<String> {
    c.guarantees.names(facet).map(str::to_string).collect()
}

#[test]
fn system_contract_facets() {
    let c = parse_contract(SYSTEM_CONTRACT).unwrap();
    assert_eq!(c.name, "LGS");
    let safety = [
        "P4", "P4.1", "P4.2", "P5", "P6", "P9", "P10", "P15", "P16", "P18", "P19", "P20", "P21",
        "P22",
    ];
    assert_eq!(names(&c, Facet::Safety), safety);
    let data: Vec<String> = (36..=42).map(|i| format!("P{i}")).collect();
    assert_eq!(names(&c, Facet::Data), data);
    assert_eq!(
        names(&c, Facet::Liveness),
        ["P3", "P7", "P8", "P11", "P12", "P13", "P14"]
    );
    assert_eq!(
        names(&c, Facet::Functionality),
        ["P17", "P23", "P24", "P25"]
    );
    assert_eq!(c.guarantees.names(Facet::Attainability).count(), 10);
    assert!(c.assumptions.is_empty());
    assert_eq!(c.definitions.items.len(), 42);
    resolve_names(&c, &suite()).unwrap();
}

#[test]
fn cockpit_composition() {
    let lib = suite();
    let comp = compose(&gc_int(), &gc_act(), &lib).unwrap();
    let c = &comp.contract;
    assert_eq!(
        c.assumptions.render(Facet::Data),
        "(P36 & P38 & P39) ∧ (P37)"
    );
    assert_eq!(
        c.assumptions.render(Facet::Safety),
        "(P7* || P9*) & (P19* || P21*) & (P11* || P13*) & P25* & P17*"
    );
    assert_eq!(
        c.guarantees.render(Facet::Safety),
        "(P23 & P24 & P25) ∧ (P18 & P19)"
    );
    assert_eq!(
        c.guarantees.render(Facet::Functionality),
        "(P27* & P28* & P29* & P30*) ∧ (P31* & P32*)"
    );
    let shared: BTreeSet<String> = ["landing", "ck_gear", "door_open", "failure_gear"]
        .map(String::from)
        .into();
    assert_eq!(comp.shared_variables(), shared);
    let func = comp
        .reports
        .iter()
        .find(|r| r.facet == Facet::Functionality)
        .unwrap();
    assert!(func.ok);
    let ck = func
        .findings
        .iter()
        .find(|f| f.variable == "ck_gear")
        .unwrap();
    assert_eq!(ck.finding, Finding::CompatibleImplied);
    for v in ["landing", "door_open", "failure_gear"] {
        assert_eq!(
            func.findings
                .iter()
                .find(|f| f.variable == v)
                .unwrap()
                .finding,
            Finding::CompatibleEqual
        );
    }
}

#[test]
fn conflicting_literals_refuse_composition() {
    let lib = suite();
    let a = parse_contract("contract A; facet SAFETY { x = AG door_open==true -> landing==true; }")
        .unwrap();
    let b =
        parse_contract("contract B; facet SAFETY { y = AG door_open==false -> landing==true; }")
            .unwrap();
    match compose(&a, &b, &lib) {
        Err(ComposeError::Inconsistent { reports }) => {
            let r = &reports[0];
            assert!(!r.ok);
            assert_eq!(r.findings[0].variable, "door_open");
            assert_eq!(r.findings[0].finding, Finding::Conflict);
        }
        other => panic!("{other:?}"),
    }
    assert!(compose(&b, &a, &lib).is_err());
    let c =
        parse_contract("contract C; facet SAFETY { z = AG ck_gear<5 -> landing==true; }").unwrap();
    let d =
        parse_contract("contract D; facet SAFETY { w = AG ck_gear>8 -> landing==true; }").unwrap();
    assert!(compose(&c, &d, &lib).is_err());
}

#[test]
fn unknown_reference_is_rejected() {
    let a = parse_contract("facet SAFETY { P99 }").unwrap();
    assert!(matches!(
        compose(&a, &gc_act(), &suite()),
        Err(ComposeError::Contract(ContractError::Unresolved { .. }))
    ));
}

fn network() -> lgs_core::ta::Network {
    assemble_system(&TimingTable::default()).unwrap()
}

#[test]
fn normalize_door() {
    let net = network();
    let lib = suite();
    let c = parse_contract(
        "contract GC_Door; facet SAFETY { P21 } facet ATTAINABILITY { P26 & P27 & P28 & P29 }",
    )
    .unwrap();
    let n = normalize_component(&net, "door", &c, &lib, &NormalizeOptions::default()).unwrap();
    assert_eq!(n.automaton.name, "door");
    assert!(n.warnings.is_empty());
    for v in ["ck_door", "door_open", "door_closed", "failure_door"] {
        assert!(n.owned.iter().any(|o| o == v), "{v} owned: {:?}", n.owned);
    }
    assert_eq!(n.contract, c);
}

#[test]
fn normalize_empty_and_options() {
    let net = network();
    let lib = suite();
    let empty = GeneralizedContract::default();
    let n = normalize_component(&net, "gear", &empty, &lib, &NormalizeOptions::default()).unwrap();
    assert!(n.contract.guarantees.is_empty() && n.contract.assumptions.is_empty());

    let opts = NormalizeOptions {
        add: vec![FacetAddition {
            assume: false,
            facet: Facet::Safety,
            group: vec![Term::Ref("P5".into())],
        }],
        ignore: vec![Facet::Liveness],
    };
    let c = parse_contract("facet SAFETY { P18 }").unwrap();
    let n = normalize_component(&net, "actuator", &c, &lib, &opts).unwrap();
    assert_eq!(n.contract.guarantees.render(Facet::Safety), "P18");
    assert_eq!(n.warnings.len(), 2, "{:?}", n.warnings);
}

#[test]
fn normalize_unresolved_atom() {
    let net = network();
    let c = parse_contract("facet SAFETY { q = AG ck_x>3 -> door_open==true; }").unwrap();
    let e =
        normalize_component(&net, "door", &c, &suite(), &NormalizeOptions::default()).unwrap_err();
    assert!(
        matches!(e, ContractError::Resolution { ref name, .. } if name == "ck_x"),
        "{e}"
    );
}

fn verify(c: &GeneralizedContract) -> LayerReport {
    let lib = suite();
    let mut sys = System::new(&network()).unwrap();
    let qs = contract_queries(c, &lib, &sys);
    prepare(&mut sys, &qs);
    let g = explore(&sys, ExploreOptions::default());
    layered_verify(&sys, &g, c, &lib)
}

#[test]
fn layered_nominal() {
    let r = verify(&parse_contract(SYSTEM_CONTRACT).unwrap());
    let order: Vec<(Facet, u8)> = r.layers.iter().map(|l| (l.facet, l.priority)).collect();
    assert_eq!(
        order,
        [
            (Facet::Data, 1),
            (Facet::Safety, 2),
            (Facet::Functionality, 3),
            (Facet::Attainability, 4),
            (Facet::Liveness, 5)
        ]
    );
    let data = r.layer(Facet::Data);
    assert!(data.passed);
    assert_eq!(data.verdicts.len(), 7);
    let safety = r.layer(Facet::Safety);
    assert_eq!(safety.verdicts.len(), 14);
    let p16 = safety
        .verdicts
        .iter()
        .find(|v| v.property == "P16")
        .unwrap();
    assert_eq!(p16.result, Outcome::WitnessAbsent);
    assert!(safety
        .verdicts
        .iter()
        .filter(|v| v.property != "P16")
        .all(|v| v.result.is_success()));
    assert_eq!(r.stopped_at, Some(Facet::Safety));
    assert!(r.layers[2..]
        .iter()
        .all(|l| !l.checked && l.verdicts.is_empty()));
}

#[test]
fn layered_halts_on_data() {
    let c = parse_contract("facet DATA { P40; bad = clock ck_x; } facet SAFETY { P5 }").unwrap();
    let r = verify(&c);
    assert_eq!(r.stopped_at, Some(Facet::Data));
    let bad = r
        .layer(Facet::Data)
        .verdicts
        .iter()
        .find(|v| v.property == "BAD")
        .unwrap();
    assert_eq!(bad.result, Outcome::Violated);
    assert!(bad.note.as_deref().unwrap().contains("ck_x"));
    assert!(r.layer(Facet::Safety).verdicts.is_empty());
}

#[test]
fn layered_alternatives() {
    let c = parse_contract("facet SAFETY { (P16 || P5) & P6 }").unwrap();
    let r = verify(&c);
    assert!(r.passed());
    assert_eq!(r.layer(Facet::Safety).verdicts.len(), 3);
}

/// Names a contract may use in each facet, so that no name lands in two
/// facets of one side.
fn pool(f: Facet) -> Vec<&'static str> {
    match f {
        Facet::Data => vec!["P36", "P37"],
        Facet::Safety => vec!["P5", "P6", "P18", "P19"],
        Facet::Functionality => vec!["P23", "P24", "P27*", "P31*"],
        Facet::Attainability => vec!["P26", "P30"],
        Facet::Liveness => vec!["P3", "P7"],
    }
}

fn group() -> impl Strategy<Value = (Facet, Vec<Term>)> {
    prop::sample::select(Facet::ALL.to_vec()).prop_flat_map(|f| {
        prop::collection::vec(
            prop::sample::select(pool(f)).prop_map(|n| Term::Ref(n.into())),
            1..4,
        )
        .prop_map(move |g| (f, g))
    })
}

fn contract() -> impl Strategy<Value = GeneralizedContract> {
    (
        prop::collection::vec(group(), 0..4),
        prop::collection::vec(group(), 0..3),
    )
        .prop_map(|(g, a)| {
            let mut c = GeneralizedContract::default();
            for (f, grp) in g {
                c.guarantees.push(f, grp);
            }
            for (f, grp) in a {
                c.assumptions.push(f, grp);
            }
            c
        })
}

/// Facet-wise multiset of referenced names.
fn terms(c: &GeneralizedContract) -> Vec<(Facet, bool, Vec<String>)> {
    let mut out = Vec::new();
    for f in Facet::ALL {
        for (assume, side) in [(true, &c.assumptions), (false, &c.guarantees)] {
            let mut v: Vec<String> = side.names(f).map(str::to_string).collect();
            v.sort();
            out.push((f, assume, v));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn compose_commutes(a in contract(), b in contract()) {
        let lib = suite();
        let ab = compose(&a, &b, &lib);
        let ba = compose(&b, &a, &lib);
        prop_assert_eq!(ab.is_ok(), ba.is_ok());
        if let (Ok(ab), Ok(ba)) = (ab, ba) {
            prop_assert_eq!(terms(&ab.contract), terms(&ba.contract));
            prop_assert_eq!(ab.shared_variables(), ba.shared_variables());
        }
    }

    #[test]
    fn compose_associates(a in contract(), b in contract(), c in contract()) {
        let lib = suite();
        let left = compose(&a, &b, &lib).and_then(|ab| compose(&ab.contract, &c, &lib));
        let right = compose(&b, &c, &lib).and_then(|bc| compose(&a, &bc.contract, &lib));
        if let (Ok(l), Ok(r)) = (left, right) {
            prop_assert_eq!(terms(&l.contract), terms(&r.contract));
        }
    }

    #[test]
    fn empty_is_identity(a in contract()) {
        let lib = suite();
        let e = GeneralizedContract::default();
        prop_assert_eq!(&compose(&a, &e, &lib).unwrap().contract, &a);
        prop_assert_eq!(&compose(&e, &a, &lib).unwrap().contract, &a);
    }

    #[test]
    fn print_parse_round_trip(a in contract()) {
        let back = parse_contract(&a.to_string()).unwrap();
        prop_assert_eq!(back, a);
    }
}
