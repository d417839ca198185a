use lgs_core::checker::*;
use lgs_core::models::{assemble_system, TimingTable};
use lgs_core::props::{compile_property, parse_query, suite, CheckableQuery, Pred, QueryKind};
use lgs_core::ta::{
    CmpOp, Constraint, Declarations, Edge, Location, Network, Step, System, TimedAutomaton,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

mod common;
use common::*;

fn two_locations() -> System {
    let mut a = TimedAutomaton::new("a", "l0");
    a.add_location(Location::bounded("l0", "ck", 3))
        .add_location(Location::new("l1"));
    a.add_edge(Edge::new("l0", "l1").when(Constraint::clock("ck", CmpOp::Eq, 3)));
    let mut globals = Declarations::default();
    globals.clock("ck");
    System::new(&Network {
        globals,
        automata: vec![a],
    })
    .unwrap()
}

fn query(sys: &System, text: &str) -> CheckableQuery {
    compile_property(&parse_query(text).unwrap(), sys).unwrap()
}

fn nominal() -> System {
    System::new(&assemble_system(&TimingTable::nominal()).unwrap()).unwrap()
}

#[test]
fn two_location_graph_size() {
    // ck ranges over 0..=3 in l0; l1 saturates at ceiling + 1.
    let sys = two_locations();
    let g = explore(&sys, ExploreOptions::default());
    let at_l0 = g
        .states
        .iter()
        .filter(|s| sys.location_name(s, 0) == "l0")
        .count();
    assert_eq!(at_l0, 4);
    assert!(g
        .states
        .iter()
        .all(|s| sys.clock_value(s, "ck").unwrap() <= sys.clock_top(0)));
    let l1: Vec<u32> = g
        .states
        .iter()
        .filter(|s| sys.location_name(s, 0) == "l1")
        .map(|s| sys.clock_value(s, "ck").unwrap())
        .collect();
    assert_eq!(l1, [3, 4]);
    assert!(!g.truncated);
}

#[test]
fn false_invariant_has_empty_counterexample() {
    let sys = two_locations();
    let g = explore(&sys, ExploreOptions::default());
    let v = check(&sys, &g, &query(&sys, "AG false"));
    assert_eq!(v.result, Outcome::Violated);
    assert_eq!(v.trace.unwrap().steps.len(), 0);
    assert_eq!(
        check(&sys, &g, &query(&sys, "AG true")).result,
        Outcome::Holds
    );
}

#[test]
fn truncation_is_inconclusive() {
    let sys = two_locations();
    let g = explore(
        &sys,
        ExploreOptions {
            bound: 2,
            workers: 1,
        },
    );
    assert!(g.truncated);
    assert_eq!(
        check(&sys, &g, &query(&sys, "AG true")).result,
        Outcome::Inconclusive
    );
    assert_eq!(
        check(&sys, &g, &query(&sys, "EF a.l1")).result,
        Outcome::Inconclusive
    );
    assert_eq!(
        check(&sys, &g, &query(&sys, "AG ck<1")).result,
        Outcome::Violated
    );
}

#[test]
fn leads_to_counts_time_lock_at_ceiling() {
    let sys = two_locations();
    let g = explore(&sys, ExploreOptions::default());
    assert_eq!(
        check(&sys, &g, &query(&sys, "AF a.l0 -> a.l1")).result,
        Outcome::Holds
    );
    // Once in l1 time only idles at the ceiling.
    let v = check(&sys, &g, &query(&sys, "AF a.l1 -> a.l0"));
    assert_eq!(v.result, Outcome::Violated);
    assert!(v.trace.unwrap().loop_start.is_some());
}

#[test]
fn nominal_regression() {
    let mut sys = nominal();
    let qs: Vec<CheckableQuery> = suite()
        .properties()
        .map(|p| compile_property(p, &sys).unwrap())
        .collect();
    let (g, vs) = check_all(&mut sys, &qs, ExploreOptions::default());
    assert_eq!((g.len(), g.transitions(), g.depth), (9488, 86592, 131));
    let with = |o: Outcome| -> Vec<&str> {
        vs.iter()
            .filter(|v| v.result == o)
            .map(|v| v.property.as_str())
            .collect()
    };
    assert_eq!(with(Outcome::WitnessAbsent), ["P16"]);
    assert_eq!(with(Outcome::Violated), ["P26", "P28", "P33", "P35"]);
    assert_eq!(with(Outcome::Vacuous), ["P27", "P30", "P31", "P32", "P34"]);
    assert_eq!(with(Outcome::Inconclusive), Vec::<&str>::new());
    let p21 = vs.iter().find(|v| v.property == "P21").unwrap();
    assert_eq!(p21.result, Outcome::Holds);
    for v in &vs {
        if let Some(t) = &v.trace {
            replay(&sys, t).unwrap_or_else(|e| panic!("{}: {e}", v.property));
        }
    }
}

#[test]
fn p7_witness_is_short() {
    let mut sys = nominal();
    let q = compile_property(suite().property("P7").unwrap(), &sys).unwrap();
    let (_, vs) = check_all(&mut sys, &[q], ExploreOptions::default());
    let t = vs[0].trace.as_ref().unwrap();
    assert_eq!(vs[0].result, Outcome::WitnessFound);
    assert_eq!(t.discrete_len(), 2);
    assert_eq!(t.elapsed(), 4);
    assert_eq!(t.last().clocks["ck_door"], 4);
    assert_eq!(t.last().vars["door_closed"].as_i64(), 0);
}

#[test]
fn counterexamples_are_shortest() {
    let sys = nominal();
    let g = explore(&sys, ExploreOptions::default());
    let q = query(&sys, "AG !gear.extended");
    let v = check(&sys, &g, &q);
    assert_eq!(v.result, Outcome::Violated);
    let QueryKind::Invariant(p) = &q.kind else {
        unreachable!()
    };
    // BFS depth of the first violating state equals the trace length in transitions.
    let mut depth = vec![usize::MAX; g.len()];
    depth[0] = 0;
    let mut frontier = vec![0u32];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for s in frontier {
            for &(_, t) in &g.succ[s as usize] {
                if depth[t as usize] == usize::MAX {
                    depth[t as usize] = depth[s as usize] + 1;
                    next.push(t);
                }
            }
        }
        frontier = next;
    }
    let best = (0..g.len())
        .filter(|&i| !p.eval(&g.states[i]))
        .map(|i| depth[i])
        .min()
        .unwrap();
    assert_eq!(
        g.path_to(g.states.iter().position(|s| !p.eval(s)).unwrap() as u32)
            .len(),
        best
    );
    let t = v.trace.unwrap();
    replay(&sys, &t).unwrap();
}

#[test]
fn parallel_matches_sequential() {
    let sys = nominal();
    let a = explore(
        &sys,
        ExploreOptions {
            bound: 5_000_000,
            workers: 1,
        },
    );
    let b = explore(
        &sys,
        ExploreOptions {
            bound: 5_000_000,
            workers: 4,
        },
    );
    assert_eq!(a.states, b.states);
    assert_eq!(a.succ, b.succ);
    assert_eq!(a.depth, b.depth);
}

#[test]
fn simulation_is_seeded() {
    let sys = nominal();
    assert_eq!(simulate(&sys, 0, 1, &[]).unwrap().steps.len(), 0);
    let a = simulate(&sys, 200, 7, &[]).unwrap();
    assert_eq!(a, simulate(&sys, 200, 7, &[]).unwrap());
    replay(&sys, &a).unwrap();
    let err = simulate(&sys, 5, 0, &[Choice::Take("door.opening->open".into())]).unwrap_err();
    assert_eq!(
        err,
        SimError::Disabled {
            index: 0,
            choice: "door.opening->open".into()
        }
    );
}

#[test]
fn tampered_trace_fails_replay() {
    let sys = nominal();
    let mut t = simulate(&sys, 30, 3, &[]).unwrap();
    let last = t.steps.len() - 1;
    t.steps[last].state.clocks.insert("ck_door".into(), 999);
    assert!(replay(&sys, &t).is_err());
}

#[test]
fn trace_json_round_trip() {
    let sys = nominal();
    let t = simulate(&sys, 50, 11, &[]).unwrap();
    let back: Trace = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
    assert_eq!(back, t);
}

fn oracle_agrees(seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = random_net(&mut rng);
    let oracle = Oracle::new(&n);
    let mut sys = System::new(&n.network).map_err(|e| format!("{e:?}"))?;
    let (p, q) = (
        random_formula(&mut rng, n.locations),
        random_formula(&mut rng, n.locations),
    );
    let cases = [
        (format!("AG {}", p.text()), oracle.invariant(&p)),
        (format!("EF {}", q.text()), oracle.reachable(&q)),
        (
            format!("AF {} -> {}", p.text(), q.text()),
            oracle.leads_to(&p, &q),
        ),
    ];
    let qs: Vec<CheckableQuery> = cases.iter().map(|(t, _)| query(&sys, t)).collect();
    let (g, vs) = check_all(&mut sys, &qs, ExploreOptions::default());
    for ((text, want), v) in cases.iter().zip(&vs) {
        if v.result != *want {
            return Err(format!("`{text}`: checker {} oracle {want}", v.result));
        }
    }
    // Witnesses and counterexamples replay.
    for v in &vs {
        if let Some(t) = &v.trace {
            replay(&sys, t).map_err(|e| e.to_string())?;
        }
    }
    let reached: std::collections::BTreeSet<(usize, u32, bool)> = g
        .states
        .iter()
        .map(|s| {
            let l = sys.location_name(s, 0)[1..].parse().unwrap();
            let x = sys.clock_value(s, "x").unwrap();
            (l, x, sys.var_value(s, "b").unwrap() == 1)
        })
        .collect();
    let oracle_locations: std::collections::BTreeSet<(usize, bool)> =
        oracle.reach.iter().map(|s| (s.0, s.2)).collect();
    let checker_locations: std::collections::BTreeSet<(usize, bool)> =
        reached.iter().map(|s| (s.0, s.2)).collect();
    if oracle_locations != checker_locations {
        return Err("reachable (location, b) pairs differ".into());
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn verdicts_match_oracle(seed in any::<u64>()) {
        prop_assert_eq!(oracle_agrees(seed), Ok(()));
    }

    #[test]
    fn bound_monotonicity(seed in any::<u64>(), small in 1usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = random_net(&mut rng);
        let p = random_formula(&mut rng, n.locations);
        let mut sys = System::new(&n.network).unwrap();
        let qs = [query(&sys, &format!("AG {}", p.text())), query(&sys, &format!("EF {}", p.text()))];
        prepare(&mut sys, &qs);
        let lo = explore(&sys, ExploreOptions { bound: small, workers: 1 });
        let hi = explore(&sys, ExploreOptions { bound: small * 4, workers: 1 });
        for q in &qs {
            let a = check(&sys, &lo, q).result;
            let b = check(&sys, &hi, q).result;
            if a != Outcome::Inconclusive {
                prop_assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn graph_edges_are_successors(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = random_net(&mut rng);
        let sys = System::new(&n.network).unwrap();
        let g = explore(&sys, ExploreOptions::default());
        for (i, s) in g.states.iter().enumerate() {
            let succ = sys.successors(s);
            prop_assert_eq!(succ.len(), g.succ[i].len());
            for ((step, t), (step2, t2)) in succ.iter().zip(&g.succ[i]) {
                prop_assert_eq!(step, step2);
                prop_assert_eq!(t, &g.states[*t2 as usize]);
                if let Step::Delay(d) = step {
                    prop_assert_eq!(*d, 1);
                }
            }
        }
    }
}

#[test]
fn pred_constants() {
    let sys = two_locations();
    let s = sys.initial_state();
    assert!(Pred::Const(true).eval(&s));
    assert!(!Pred::Not(Box::new(Pred::Const(true))).eval(&s));
}
