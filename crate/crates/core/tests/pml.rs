use lgs_core::models::build_interface;
use lgs_core::pml::*;
use lgs_core::ta::{parse_network, print_network, Edge, Location, Sync, TimedAutomaton};

#[test]
fn minimal_loop() {
    let p =
        parse_pml("bool x, g1, g2;\nactive proctype P(){ do :: g1 -> x=true :: g2 -> x=false od }")
            .unwrap();
    assert_eq!(p.body.len(), 1);
    let StmtKind::Do(bs) = &p.body[0].kind else {
        panic!()
    };
    assert_eq!(bs.len(), 2);
    let a = translate(&p);
    assert_eq!(a.locations.len(), 1);
    assert_eq!(a.edges.len(), 2);
    assert!(a.edges.iter().all(|e| e.source == e.target));
    assert_eq!(a.edges[0].guard.to_string(), "g1==true");
    assert_eq!(a.edges[0].updates[0].to_string(), "x=true");
}

#[test]
fn single_assignment() {
    let p = parse_pml("bool x;\nactive proctype P() { x = true }").unwrap();
    let a = translate(&p);
    assert_eq!(a.locations.len(), 2);
    assert_eq!(a.edges.len(), 1);
    assert_eq!(a.initial, "P_2_23");
    assert_eq!(a.edges[0].target, "P_2_32");
}

#[test]
fn unsupported_constructs_are_named() {
    let e = parse_pml("bool x;\nactive proctype P() { x = true unless { skip } }").unwrap_err();
    assert!(
        matches!(&e.kind, PmlErrorKind::Unsupported(w) if w == "unless"),
        "{e}"
    );
    assert_eq!((e.line, e.col), (2, 32));
    let e = parse_pml("active proctype P() { atomic { skip } }").unwrap_err();
    assert_eq!(e.to_string(), "1:23: unsupported construct `atomic`");
    assert!(parse_pml("chan c = [2] of { bit };\nactive proctype P() { c!1 }").is_err());
}

#[test]
fn well_formedness() {
    assert!(parse_pml("active proctype P() { goto nowhere }")
        .unwrap_err()
        .to_string()
        .contains("no label"));
    assert!(parse_pml("active proctype P() { a: skip; a: skip }")
        .unwrap_err()
        .to_string()
        .contains("duplicate label"));
    assert!(parse_pml("active proctype P() { break }").is_err());
    assert!(parse_pml("active proctype P() { y = true }")
        .unwrap_err()
        .to_string()
        .contains("undeclared"));
    assert!(parse_pml("").is_err());
}

#[test]
fn interface_fixture() {
    let p = parse_pml(INTERFACE_PML).unwrap();
    let labels: Vec<&str> = p
        .labels()
        .iter()
        .map(|s| s.label.as_deref().unwrap())
        .collect();
    assert_eq!(labels, ["none", "orange", "green", "red"]);
    assert!(p
        .body
        .iter()
        .all(|s| matches!(s.kind, StmtKind::If(_) | StmtKind::Do(_))));
    let a = translate(&p);
    let mut locs: Vec<&str> = a.locations.iter().map(|l| l.id.as_str()).collect();
    locs.sort();
    assert_eq!(locs, ["green", "none", "orange", "red"]);
    assert_eq!(a.initial, "none");
    assert!(a.edges.iter().all(|e| matches!(e.sync, Sync::Receive(_))));
    assert!(weakly_bisimilar(&a, &build_interface()));
    let pairs = weak_bisimulation(&a, &build_interface()).unwrap();
    for l in ["none", "orange", "green", "red"] {
        assert!(pairs.contains(&(l.to_string(), l.to_string())));
    }
}

#[test]
fn translation_is_deterministic() {
    let p = parse_pml(INTERFACE_PML).unwrap();
    assert_eq!(translate(&p), translate(&parse_pml(INTERFACE_PML).unwrap()));
    let net = translate_network(&p);
    let text = print_network(&net);
    assert_eq!(parse_network(&text).unwrap(), net);
    assert_eq!(net.globals.channels.len(), 4);
}

#[test]
fn missing_transition_breaks_bisimilarity() {
    let p = parse_pml(INTERFACE_PML).unwrap();
    let mut a = translate(&p);
    let i = a
        .edges
        .iter()
        .position(|e| e.source == "green" && e.target == "red")
        .unwrap();
    a.edges.remove(i);
    assert!(!weakly_bisimilar(&a, &build_interface()));
}

fn reference(edges: &[(&str, &str, &str)]) -> TimedAutomaton {
    let mut a = TimedAutomaton::new("R", edges[0].0);
    for (s, t, _) in edges {
        for l in [s, t] {
            if a.location(l).is_none() {
                a.add_location(Location::new(*l));
            }
        }
    }
    for (s, t, c) in edges {
        let e = Edge::new(*s, *t);
        a.add_edge(if c.is_empty() { e } else { e.send(*c) });
    }
    a
}

#[test]
fn silent_steps_are_ignored() {
    let p = parse_pml(
        "chan a, b;\nactive proctype P() {\n  skip;\n  a!0;\n  do\n  :: b!0\n  :: skip\n  od\n}",
    )
    .unwrap();
    let t = translate(&p);
    let r = reference(&[("s0", "s1", "a"), ("s1", "s1", "b")]);
    assert!(weakly_bisimilar(&t, &r));
    let wrong = reference(&[("s0", "s1", "b"), ("s1", "s1", "a")]);
    assert!(!weakly_bisimilar(&t, &wrong));
}

#[test]
fn else_and_break() {
    let p = parse_pml(
        "bool x; int n;\nactive proctype P() {\n  do\n  :: n < 3 -> n = 3\n  :: else -> break\n  od;\n  x = true\n}",
    )
    .unwrap();
    let a = translate(&p);
    let guards: Vec<String> = a.edges.iter().map(|e| e.guard.to_string()).collect();
    assert!(guards.contains(&"n<3".to_string()), "{guards:?}");
    assert!(guards.contains(&"n>=3".to_string()), "{guards:?}");
    assert_eq!(a.edges.len(), 3);
    let brk = a
        .edges
        .iter()
        .find(|e| e.guard.to_string() == "n>=3")
        .unwrap();
    let last = a
        .edges
        .iter()
        .find(|e| !e.updates.is_empty() && e.updates[0].var == "x")
        .unwrap();
    assert_eq!(brk.target, last.source);
}

#[test]
fn disjunctive_guards_split() {
    let p =
        parse_pml("bool a, b, x;\nactive proctype P() { if :: a || !b -> x = true fi }").unwrap();
    let t = translate(&p);
    assert_eq!(t.edges.len(), 2);
    assert_eq!(t.edges[1].guard.to_string(), "b==false");
}
