//! Index-resolved network and its discrete-time successor semantics.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::model::{CmpOp, Network, Sync, Value, VarDecl, VarKind};
use super::validate::{validate_network, ValidationReport};

/// Clock reading in deciseconds.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct ClockValue(pub u32);

impl fmt::Display for ClockValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A point of the product state space: one location per automaton, a
/// valuation of every variable and of every (normalized) clock.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    pub locations: Box<[u16]>,
    pub vars: Box<[i32]>,
    pub clocks: Box<[u32]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Atom {
    Clock { clock: usize, op: CmpOp, k: i64 },
    Var { var: usize, op: CmpOp, k: i64 },
}

impl Atom {
    #[inline]
    pub fn eval(&self, s: &State) -> bool {
        match *self {
            Atom::Clock { clock, op, k } => op.eval(s.clocks[clock] as i64, k),
            Atom::Var { var, op, k } => op.eval(s.vars[var] as i64, k),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyncKind {
    Internal,
    Send(usize),
    Receive(usize),
}

#[derive(Debug, Clone)]
pub struct CompiledEdge {
    pub source: u16,
    pub target: u16,
    pub guard: Vec<Atom>,
    pub sync: SyncKind,
    pub resets: Vec<usize>,
    pub updates: Vec<(usize, i32)>,
}

#[derive(Debug, Clone)]
pub struct CompiledLocation {
    pub name: String,
    /// `(clock, bound)` pairs meaning `clock <= bound`.
    pub invariant: Vec<(usize, u32)>,
    pub urgent: bool,
}

#[derive(Debug, Clone)]
pub struct CompiledAutomaton {
    pub name: String,
    pub locations: Vec<CompiledLocation>,
    pub initial: u16,
    pub edges: Vec<CompiledEdge>,
    outgoing: Vec<Vec<usize>>,
}

impl CompiledAutomaton {
    pub fn location_index(&self, name: &str) -> Option<u16> {
        self.locations
            .iter()
            .position(|l| l.name == name)
            .map(|i| i as u16)
    }
}

/// A discrete transition of the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    Internal {
        automaton: usize,
        edge: usize,
    },
    Sync {
        channel: usize,
        sender: (usize, usize),
        receiver: (usize, usize),
    },
}

/// One step of a run: time elapse or a discrete move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Step {
    Delay(u32),
    Discrete(Move),
}

/// Validated network with every name resolved to an index.
#[derive(Debug, Clone)]
pub struct System {
    network: Network,
    clocks: Vec<String>,
    /// Largest constant each clock is compared against.
    max_constant: Vec<u32>,
    vars: Vec<VarDecl>,
    channels: Vec<String>,
    automata: Vec<CompiledAutomaton>,
    receivers: Vec<Vec<(usize, usize)>>,
}

impl System {
    pub fn new(network: &Network) -> Result<System, ValidationReport> {
        let report = validate_network(network);
        if !report.is_ok() {
            return Err(report);
        }
        let clocks: Vec<String> = network.all_clocks().map(str::to_string).collect();
        let vars: Vec<VarDecl> = network.all_vars().cloned().collect();
        let channels: Vec<String> = network.all_channels().map(str::to_string).collect();
        let clock_ix = |n: &str| clocks.iter().position(|c| c == n).expect("validated");
        let var_ix = |n: &str| vars.iter().position(|v| v.name == n).expect("validated");
        let chan_ix = |n: &str| channels.iter().position(|c| c == n).expect("validated");

        let mut max_constant = vec![0u32; clocks.len()];
        let mut automata = Vec::with_capacity(network.automata.len());
        for a in &network.automata {
            let loc_ix = |n: &str| {
                a.locations
                    .iter()
                    .position(|l| l.id == n)
                    .expect("validated") as u16
            };
            let locations = a
                .locations
                .iter()
                .map(|l| CompiledLocation {
                    name: l.id.clone(),
                    invariant: l
                        .invariant
                        .conjuncts
                        .iter()
                        .map(|c| {
                            let ci = clock_ix(&c.lhs);
                            let k = c.rhs.as_i64() as u32;
                            max_constant[ci] = max_constant[ci].max(k);
                            (ci, k)
                        })
                        .collect(),
                    urgent: l.urgent,
                })
                .collect::<Vec<_>>();
            let edges = a
                .edges
                .iter()
                .map(|e| CompiledEdge {
                    source: loc_ix(&e.source),
                    target: loc_ix(&e.target),
                    guard: e
                        .guard
                        .conjuncts
                        .iter()
                        .map(|c| {
                            let k = c.rhs.as_i64();
                            if network.has_clock(&c.lhs) {
                                let ci = clock_ix(&c.lhs);
                                max_constant[ci] = max_constant[ci].max(k as u32);
                                Atom::Clock {
                                    clock: ci,
                                    op: c.op,
                                    k,
                                }
                            } else {
                                Atom::Var {
                                    var: var_ix(&c.lhs),
                                    op: c.op,
                                    k,
                                }
                            }
                        })
                        .collect(),
                    sync: match &e.sync {
                        Sync::Internal => SyncKind::Internal,
                        Sync::Send(c) => SyncKind::Send(chan_ix(c)),
                        Sync::Receive(c) => SyncKind::Receive(chan_ix(c)),
                    },
                    resets: e.resets.iter().map(|r| clock_ix(r)).collect(),
                    updates: e
                        .updates
                        .iter()
                        .map(|u| (var_ix(&u.var), u.value.as_i64() as i32))
                        .collect(),
                })
                .collect::<Vec<_>>();
            let mut outgoing = vec![Vec::new(); locations.len()];
            for (i, e) in edges.iter().enumerate() {
                outgoing[e.source as usize].push(i);
            }
            automata.push(CompiledAutomaton {
                name: a.name.clone(),
                initial: loc_ix(&a.initial),
                locations,
                edges,
                outgoing,
            });
        }

        let mut receivers = vec![Vec::new(); channels.len()];
        for (ai, a) in automata.iter().enumerate() {
            for (ei, e) in a.edges.iter().enumerate() {
                if let SyncKind::Receive(c) = e.sync {
                    receivers[c].push((ai, ei));
                }
            }
        }

        Ok(System {
            network: network.clone(),
            clocks,
            max_constant,
            vars,
            channels,
            automata,
            receivers,
        })
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn automata(&self) -> &[CompiledAutomaton] {
        &self.automata
    }

    pub fn clock_names(&self) -> &[String] {
        &self.clocks
    }

    pub fn vars(&self) -> &[VarDecl] {
        &self.vars
    }

    pub fn channel_names(&self) -> &[String] {
        &self.channels
    }

    pub fn clock_index(&self, name: &str) -> Option<usize> {
        self.clocks.iter().position(|c| c == name)
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn automaton_index(&self, name: &str) -> Option<usize> {
        self.automata.iter().position(|a| a.name == name)
    }

    /// Resolves `automaton.location`.
    pub fn location_ref(&self, automaton: &str, location: &str) -> Option<(usize, u16)> {
        let ai = self.automaton_index(automaton)?;
        Some((ai, self.automata[ai].location_index(location)?))
    }

    /// Value at which a clock saturates: its largest constant plus one.
    pub fn clock_top(&self, clock: usize) -> u32 {
        self.max_constant[clock] + 1
    }

    pub fn max_constant(&self, clock: usize) -> u32 {
        self.max_constant[clock]
    }

    /// Makes the normalization aware of an additional constant, e.g. one
    /// appearing in a property.
    pub fn raise_ceiling(&mut self, clock: usize, k: u32) {
        self.max_constant[clock] = self.max_constant[clock].max(k);
    }

    pub fn initial_state(&self) -> State {
        State {
            locations: self.automata.iter().map(|a| a.initial).collect(),
            vars: self.vars.iter().map(|v| v.init.as_i64() as i32).collect(),
            clocks: vec![0; self.clocks.len()].into_boxed_slice(),
        }
    }

    pub fn invariants_hold(&self, s: &State) -> bool {
        self.automata.iter().zip(s.locations.iter()).all(|(a, &l)| {
            a.locations[l as usize]
                .invariant
                .iter()
                .all(|&(c, k)| s.clocks[c] <= k)
        })
    }

    /// Clamps every clock to its saturation value.
    pub fn normalize(&self, s: &mut State) {
        for (c, v) in s.clocks.iter_mut().enumerate() {
            *v = (*v).min(self.clock_top(c));
        }
    }

    /// Lets `d` deciseconds elapse. `None` when an occupied location is
    /// urgent or some invariant would be violated on the way.
    pub fn delay_successor(&self, s: &State, d: u32) -> Option<State> {
        if d == 0 {
            return Some(s.clone());
        }
        for (a, &l) in self.automata.iter().zip(s.locations.iter()) {
            let loc = &a.locations[l as usize];
            if loc.urgent {
                return None;
            }
            // Invariants are upper bounds, so checking the end point suffices.
            if loc
                .invariant
                .iter()
                .any(|&(c, k)| s.clocks[c].saturating_add(d) > k)
            {
                return None;
            }
        }
        let mut next = s.clone();
        for (c, v) in next.clocks.iter_mut().enumerate() {
            *v = v.saturating_add(d).min(self.clock_top(c));
        }
        Some(next)
    }

    fn guard_holds(&self, guard: &[Atom], s: &State) -> bool {
        guard.iter().all(|a| a.eval(s))
    }

    fn apply_edge(next: &mut State, automaton: usize, edge: &CompiledEdge) {
        next.locations[automaton] = edge.target;
        for &c in &edge.resets {
            next.clocks[c] = 0;
        }
        for &(v, val) in &edge.updates {
            next.vars[v] = val;
        }
    }

    /// Executes `mv` from `s` if it is enabled there.
    pub fn apply(&self, s: &State, mv: &Move) -> Option<State> {
        match *mv {
            Move::Internal { automaton, edge } => {
                let e = self.automata.get(automaton)?.edges.get(edge)?;
                if e.sync != SyncKind::Internal
                    || s.locations[automaton] != e.source
                    || !self.guard_holds(&e.guard, s)
                {
                    return None;
                }
                let mut next = s.clone();
                Self::apply_edge(&mut next, automaton, e);
                self.invariants_hold(&next).then_some(next)
            }
            Move::Sync {
                channel,
                sender,
                receiver,
            } => {
                if sender.0 == receiver.0 {
                    return None;
                }
                let se = self.automata.get(sender.0)?.edges.get(sender.1)?;
                let re = self.automata.get(receiver.0)?.edges.get(receiver.1)?;
                if se.sync != SyncKind::Send(channel)
                    || re.sync != SyncKind::Receive(channel)
                    || s.locations[sender.0] != se.source
                    || s.locations[receiver.0] != re.source
                    || !self.guard_holds(&se.guard, s)
                    || !self.guard_holds(&re.guard, s)
                {
                    return None;
                }
                let mut next = s.clone();
                Self::apply_edge(&mut next, sender.0, se);
                Self::apply_edge(&mut next, receiver.0, re);
                self.invariants_hold(&next).then_some(next)
            }
        }
    }

    /// All enabled discrete moves, in declaration order: automata in order,
    /// edges in file order, each sender paired with receivers in the same order.
    pub fn discrete_successors(&self, s: &State) -> Vec<(Move, State)> {
        let mut out = Vec::new();
        for (ai, a) in self.automata.iter().enumerate() {
            for &ei in &a.outgoing[s.locations[ai] as usize] {
                let e = &a.edges[ei];
                if !self.guard_holds(&e.guard, s) {
                    continue;
                }
                match e.sync {
                    SyncKind::Internal => {
                        let mut next = s.clone();
                        Self::apply_edge(&mut next, ai, e);
                        if self.invariants_hold(&next) {
                            out.push((
                                Move::Internal {
                                    automaton: ai,
                                    edge: ei,
                                },
                                next,
                            ));
                        }
                    }
                    SyncKind::Send(ch) => {
                        for &(bi, fi) in &self.receivers[ch] {
                            if bi == ai {
                                continue;
                            }
                            let f = &self.automata[bi].edges[fi];
                            if s.locations[bi] != f.source || !self.guard_holds(&f.guard, s) {
                                continue;
                            }
                            let mut next = s.clone();
                            Self::apply_edge(&mut next, ai, e);
                            Self::apply_edge(&mut next, bi, f);
                            if self.invariants_hold(&next) {
                                out.push((
                                    Move::Sync {
                                        channel: ch,
                                        sender: (ai, ei),
                                        receiver: (bi, fi),
                                    },
                                    next,
                                ));
                            }
                        }
                    }
                    SyncKind::Receive(_) => {}
                }
            }
        }
        out
    }

    /// Discrete successors followed by the unit delay, if possible.
    pub fn successors(&self, s: &State) -> Vec<(Step, State)> {
        let mut out: Vec<(Step, State)> = self
            .discrete_successors(s)
            .into_iter()
            .map(|(m, n)| (Step::Discrete(m), n))
            .collect();
        if let Some(n) = self.delay_successor(s, 1) {
            out.push((Step::Delay(1), n));
        }
        out
    }

    pub fn edge_text(&self, automaton: usize, edge: usize) -> String {
        let a = &self.automata[automaton];
        let e = &a.edges[edge];
        format!(
            "{}.{}->{}",
            a.name, a.locations[e.source as usize].name, a.locations[e.target as usize].name
        )
    }

    pub fn move_label(&self, mv: &Move) -> String {
        match *mv {
            Move::Internal { automaton, edge } => self.edge_text(automaton, edge),
            Move::Sync {
                channel,
                sender,
                receiver,
            } => format!(
                "{}: {} | {}",
                self.channels[channel],
                self.edge_text(sender.0, sender.1),
                self.edge_text(receiver.0, receiver.1)
            ),
        }
    }

    pub fn step_label(&self, step: &Step) -> String {
        match step {
            Step::Delay(d) => format!("delay {d}"),
            Step::Discrete(m) => self.move_label(m),
        }
    }

    pub fn location_name(&self, s: &State, automaton: usize) -> &str {
        &self.automata[automaton].locations[s.locations[automaton] as usize].name
    }

    pub fn var_value(&self, s: &State, name: &str) -> Option<i64> {
        self.var_index(name).map(|i| s.vars[i] as i64)
    }

    pub fn clock_value(&self, s: &State, name: &str) -> Option<u32> {
        self.clock_index(name).map(|i| s.clocks[i])
    }

    pub fn snapshot(&self, s: &State) -> Snapshot {
        Snapshot {
            locations: self
                .automata
                .iter()
                .enumerate()
                .map(|(i, a)| (a.name.clone(), self.location_name(s, i).to_string()))
                .collect(),
            vars: self
                .vars
                .iter()
                .zip(s.vars.iter())
                .map(|(d, &v)| {
                    let value = match d.kind {
                        VarKind::Bool => Value::Bool(v != 0),
                        VarKind::Int => Value::Int(v as i64),
                    };
                    (d.name.clone(), value)
                })
                .collect(),
            clocks: self
                .clocks
                .iter()
                .cloned()
                .zip(s.clocks.iter().copied())
                .collect(),
        }
    }

    /// Inverse of [`System::snapshot`].
    pub fn state_from_snapshot(&self, snap: &Snapshot) -> Option<State> {
        let locations = self
            .automata
            .iter()
            .map(|a| a.location_index(snap.locations.get(&a.name)?))
            .collect::<Option<Box<[u16]>>>()?;
        let vars = self
            .vars
            .iter()
            .map(|d| snap.vars.get(&d.name).map(|v| v.as_i64() as i32))
            .collect::<Option<Box<[i32]>>>()?;
        let clocks = self
            .clocks
            .iter()
            .map(|c| snap.clocks.get(c).copied())
            .collect::<Option<Box<[u32]>>>()?;
        Some(State {
            locations,
            vars,
            clocks,
        })
    }
}

/// Name-keyed view of a [`State`], used in traces and reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub locations: BTreeMap<String, String>,
    #[serde(with = "value_map")]
    pub vars: BTreeMap<String, Value>,
    pub clocks: BTreeMap<String, u32>,
}

mod value_map {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::ta::Value;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Plain {
        Bool(bool),
        Int(i64),
    }

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<String, Value>,
        ser: S,
    ) -> Result<S::Ok, S::Error> {
        let plain: BTreeMap<&String, Plain> = map
            .iter()
            .map(|(k, v)| {
                let p = match *v {
                    Value::Bool(b) => Plain::Bool(b),
                    Value::Int(i) => Plain::Int(i),
                };
                (k, p)
            })
            .collect();
        plain.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> Result<BTreeMap<String, Value>, D::Error> {
        let plain = BTreeMap::<String, Plain>::deserialize(de)?;
        Ok(plain
            .into_iter()
            .map(|(k, p)| {
                let v = match p {
                    Plain::Bool(b) => Value::Bool(b),
                    Plain::Int(i) => Value::Int(i),
                };
                (k, v)
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ta::model::*;

    fn bounded(bound: i64) -> System {
        let mut a = TimedAutomaton::new("A", "L0");
        a.add_location(Location::bounded("L0", "ck", bound));
        a.add_location(Location::new("L1"));
        a.add_edge(Edge::new("L0", "L1").when(Constraint::clock("ck", CmpOp::Eq, bound)));
        let mut n = Network::default();
        n.globals.clock("ck");
        n.automata.push(a);
        System::new(&n).unwrap()
    }

    #[test]
    fn delay_shifts_clocks() {
        let sys = bounded(10);
        let s = sys.initial_state();
        let next = sys.delay_successor(&s, 1).unwrap();
        assert_eq!(&*next.clocks, &[1]);
    }

    #[test]
    fn delay_blocked_at_invariant_boundary() {
        let sys = bounded(10);
        let s = sys.delay_successor(&sys.initial_state(), 10).unwrap();
        assert_eq!(&*s.clocks, &[10]);
        assert!(sys.delay_successor(&s, 1).is_none());
    }

    #[test]
    fn saturated_clock_stays_saturated() {
        let sys = bounded(10);
        let mut s = sys.delay_successor(&sys.initial_state(), 10).unwrap();
        s = sys
            .apply(
                &s,
                &Move::Internal {
                    automaton: 0,
                    edge: 0,
                },
            )
            .unwrap();
        let s = sys.delay_successor(&s, 7).unwrap();
        assert_eq!(s.clocks[0], sys.clock_top(0));
        let again = sys.delay_successor(&s, 5).unwrap();
        assert_eq!(again.clocks[0], sys.clock_top(0));
    }

    #[test]
    fn urgent_location_blocks_delay() {
        let mut a = TimedAutomaton::new("A", "L0");
        a.add_location(Location::new("L0").urgent());
        let n = Network {
            globals: Declarations::default(),
            automata: vec![a],
        };
        let sys = System::new(&n).unwrap();
        assert!(sys.delay_successor(&sys.initial_state(), 1).is_none());
    }

    #[test]
    fn no_enabled_edges_means_no_discrete_successor() {
        let sys = bounded(10);
        assert!(sys.discrete_successors(&sys.initial_state()).is_empty());
    }

    #[test]
    fn internal_edge_with_true_guard() {
        let mut a = TimedAutomaton::new("A", "L0");
        a.add_location(Location::new("L0"));
        a.add_location(Location::new("L1"));
        a.add_edge(Edge::new("L0", "L1"));
        let n = Network {
            globals: Declarations::default(),
            automata: vec![a],
        };
        let sys = System::new(&n).unwrap();
        assert_eq!(sys.discrete_successors(&sys.initial_state()).len(), 1);
    }

    #[test]
    fn edge_into_violated_invariant_is_disabled() {
        let mut a = TimedAutomaton::new("A", "L0");
        a.add_location(Location::new("L0"));
        a.add_location(Location::bounded("L1", "ck", 2));
        a.add_edge(Edge::new("L0", "L1"));
        let mut n = Network::default();
        n.globals.clock("ck");
        n.automata.push(a);
        let sys = System::new(&n).unwrap();
        let s = sys.delay_successor(&sys.initial_state(), 3).unwrap();
        assert!(sys.discrete_successors(&s).is_empty());
    }

    #[test]
    fn sender_updates_precede_receiver_updates() {
        let mut n = Network::default();
        n.globals.channel("c").var(VarDecl::int("x", 0));
        let mut a = TimedAutomaton::new("A", "a0");
        a.add_location(Location::new("a0"));
        a.add_location(Location::new("a1"));
        a.add_edge(
            Edge::new("a0", "a1")
                .send("c")
                .assign(Update::new("x", Value::Int(1))),
        );
        let mut b = TimedAutomaton::new("B", "b0");
        b.add_location(Location::new("b0"));
        b.add_location(Location::new("b1"));
        b.add_edge(
            Edge::new("b0", "b1")
                .receive("c")
                .assign(Update::new("x", Value::Int(2))),
        );
        n.automata = vec![a, b];
        let sys = System::new(&n).unwrap();
        let succ = sys.discrete_successors(&sys.initial_state());
        assert_eq!(succ.len(), 1);
        assert_eq!(succ[0].1.vars[0], 2);
        assert!(matches!(succ[0].0, Move::Sync { .. }));
    }

    #[test]
    fn snapshot_round_trip() {
        let sys = bounded(4);
        let s = sys.delay_successor(&sys.initial_state(), 3).unwrap();
        let snap = sys.snapshot(&s);
        assert_eq!(sys.state_from_snapshot(&snap), Some(s));
    }
}
