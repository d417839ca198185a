//! Random small networks and a brute-force oracle for their verdicts.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use lgs_core::checker::Outcome;
use lgs_core::ta::{
    CmpOp, Constraint, Declarations, Edge, Location, Network, TimedAutomaton, VarDecl,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const MAX_LOCATIONS: usize = 6;
pub const MAX_CEILING: i64 = 10;

/// (source, target, clock guard, bool guard, reset, assignment)
pub type RandomEdge = (
    usize,
    usize,
    Option<(CmpOp, i64)>,
    Option<bool>,
    bool,
    Option<bool>,
);

/// Oracle state: (location, clock, b).
pub type Config = (usize, u32, bool);

/// Random single-automaton network: one clock `x`, one boolean `b`.
pub struct RandomNet {
    pub network: Network,
    pub locations: usize,
    pub invariant: Vec<Option<i64>>,
    pub urgent: Vec<bool>,
    pub edges: Vec<RandomEdge>,
    pub init_b: bool,
}

pub fn random_net(rng: &mut ChaCha8Rng) -> RandomNet {
    let locations = rng.gen_range(1..=MAX_LOCATIONS);
    let ops = CmpOp::ALL;
    let invariant: Vec<Option<i64>> = (0..locations)
        .map(|_| rng.gen_bool(0.4).then(|| rng.gen_range(0..=MAX_CEILING)))
        .collect();
    let urgent: Vec<bool> = (0..locations).map(|_| rng.gen_bool(0.1)).collect();
    let edges = (0..rng.gen_range(0..=2 * locations))
        .map(|_| {
            (
                rng.gen_range(0..locations),
                rng.gen_range(0..locations),
                rng.gen_bool(0.6).then(|| {
                    (
                        ops[rng.gen_range(0..ops.len())],
                        rng.gen_range(0..=MAX_CEILING),
                    )
                }),
                rng.gen_bool(0.3).then(|| rng.gen_bool(0.5)),
                rng.gen_bool(0.4),
                rng.gen_bool(0.3).then(|| rng.gen_bool(0.5)),
            )
        })
        .collect::<Vec<_>>();
    let init_b = rng.gen_bool(0.5);
    let mut a = TimedAutomaton::new("r", "l0");
    for (i, (inv, u)) in invariant.iter().zip(&urgent).enumerate() {
        let mut l = match inv {
            Some(k) => Location::bounded(format!("l{i}"), "x", *k),
            None => Location::new(format!("l{i}")),
        };
        if *u {
            l = l.urgent();
        }
        a.add_location(l);
    }
    for (s, t, cg, bg, reset, set) in &edges {
        let mut e = Edge::new(format!("l{s}"), format!("l{t}"));
        if let Some((op, k)) = cg {
            e = e.when(Constraint::clock("x", *op, *k));
        }
        if let Some(v) = bg {
            e = e.when(Constraint::is("b", *v));
        }
        if *reset {
            e = e.reset("x");
        }
        if let Some(v) = set {
            e = e.set("b", *v);
        }
        a.add_edge(e);
    }
    let mut globals = Declarations::default();
    globals.clock("x").var(VarDecl::boolean("b", init_b));
    RandomNet {
        network: Network {
            globals,
            automata: vec![a],
        },
        locations,
        invariant,
        urgent,
        edges,
        init_b,
    }
}

/// Query atom over location, `b` and `x`.
#[derive(Debug, Clone)]
pub enum Atom {
    At(usize),
    B(bool),
    X(CmpOp, i64),
}

impl Atom {
    pub fn text(&self) -> String {
        match self {
            Atom::At(l) => format!("r.l{l}"),
            Atom::B(v) => format!("b=={v}"),
            Atom::X(op, k) => format!("x{}{k}", op.symbol()),
        }
    }

    pub fn eval(&self, s: Config) -> bool {
        match self {
            Atom::At(l) => s.0 == *l,
            Atom::B(v) => s.2 == *v,
            Atom::X(op, k) => op.eval(s.1 as i64, *k),
        }
    }
}

/// Conjunction or disjunction of atoms.
#[derive(Debug, Clone)]
pub struct Formula {
    pub atoms: Vec<Atom>,
    pub conj: bool,
}

impl Formula {
    pub fn text(&self) -> String {
        let sep = if self.conj { " && " } else { " || " };
        let parts: Vec<String> = self.atoms.iter().map(Atom::text).collect();
        format!("({})", parts.join(sep))
    }

    pub fn eval(&self, s: Config) -> bool {
        if self.conj {
            self.atoms.iter().all(|a| a.eval(s))
        } else {
            self.atoms.iter().any(|a| a.eval(s))
        }
    }
}

pub fn random_formula(rng: &mut ChaCha8Rng, locations: usize) -> Formula {
    let atoms = (0..rng.gen_range(1..=2))
        .map(|_| match rng.gen_range(0..3) {
            0 => Atom::At(rng.gen_range(0..locations)),
            1 => Atom::B(rng.gen_bool(0.5)),
            _ => Atom::X(
                CmpOp::ALL[rng.gen_range(0..CmpOp::ALL.len())],
                rng.gen_range(0..=MAX_CEILING),
            ),
        })
        .collect();
    Formula {
        atoms,
        conj: rng.gen_bool(0.5),
    }
}

/// Brute-force semantics over every (location, clock, b) triple, with the
/// clock saturating above every constant.
pub struct Oracle {
    pub reach: BTreeSet<Config>,
    pub succ: BTreeMap<Config, Vec<Config>>,
}

pub const TOP: u32 = MAX_CEILING as u32 + 1;

impl Oracle {
    pub fn new(n: &RandomNet) -> Oracle {
        let inv_ok = |l: usize, x: u32| n.invariant[l].is_none_or(|k| x as i64 <= k);
        let mut succ = BTreeMap::new();
        for l in 0..n.locations {
            for x in 0..=TOP {
                for b in [false, true] {
                    let mut out = Vec::new();
                    for (s, t, cg, bg, reset, set) in &n.edges {
                        if *s != l
                            || cg.is_some_and(|(op, k)| !op.eval(x as i64, k))
                            || bg.is_some_and(|v| v != b)
                        {
                            continue;
                        }
                        let x2 = if *reset { 0 } else { x };
                        if inv_ok(*t, x2) {
                            out.push((*t, x2, set.unwrap_or(b)));
                        }
                    }
                    if !n.urgent[l] && inv_ok(l, x + 1) {
                        out.push((l, (x + 1).min(TOP), b));
                    }
                    succ.insert((l, x, b), out);
                }
            }
        }
        let mut reach = BTreeSet::from([(0, 0, n.init_b)]);
        loop {
            let next: BTreeSet<_> = reach.iter().flat_map(|s| succ[s].iter().copied()).collect();
            let before = reach.len();
            reach.extend(next);
            if reach.len() == before {
                break;
            }
        }
        Oracle { reach, succ }
    }

    pub fn invariant(&self, p: &Formula) -> Outcome {
        if self.reach.iter().all(|s| p.eval(*s)) {
            Outcome::Holds
        } else {
            Outcome::Violated
        }
    }

    pub fn reachable(&self, p: &Formula) -> Outcome {
        if self.reach.iter().any(|s| p.eval(*s)) {
            Outcome::WitnessFound
        } else {
            Outcome::WitnessAbsent
        }
    }

    pub fn leads_to(&self, p: &Formula, q: &Formula) -> Outcome {
        let mut af: BTreeSet<_> = self.reach.iter().copied().filter(|s| q.eval(*s)).collect();
        loop {
            let add: Vec<_> = self
                .reach
                .iter()
                .copied()
                .filter(|s| {
                    !af.contains(s)
                        && !self.succ[s].is_empty()
                        && self.succ[s].iter().all(|t| af.contains(t))
                })
                .collect();
            if add.is_empty() {
                break;
            }
            af.extend(add);
        }
        if self.reach.iter().all(|s| !p.eval(*s) || af.contains(s)) {
            Outcome::Holds
        } else {
            Outcome::Violated
        }
    }
}
