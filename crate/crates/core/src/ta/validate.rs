//! Well-formedness checks for a [`Network`].

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use serde::Serialize;

use super::model::{CmpOp, Constraint, Network, TimedAutomaton, Value, VarKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub automaton: Option<String>,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.automaton {
            Some(a) => write!(f, "{a}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    fn error(&mut self, automaton: Option<&str>, message: String) {
        self.errors.push(Issue {
            automaton: automaton.map(str::to_string),
            message,
        });
    }

    fn warn(&mut self, automaton: Option<&str>, message: String) {
        self.warnings.push(Issue {
            automaton: automaton.map(str::to_string),
            message,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.errors.is_empty() {
            f.write_str("OK")?;
        } else {
            write!(f, "{} error(s)", self.errors.len())?;
            for e in &self.errors {
                write!(f, "\n  error: {e}")?;
            }
        }
        for w in &self.warnings {
            write!(f, "\n  warning: {w}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

pub fn validate_network(network: &Network) -> ValidationReport {
    let mut report = ValidationReport::default();

    let mut seen = HashSet::new();
    for (scope, decls) in std::iter::once((None, &network.globals)).chain(
        network
            .automata
            .iter()
            .map(|a| (Some(a.name.as_str()), &a.decls)),
    ) {
        let names = decls
            .clocks
            .iter()
            .chain(decls.vars.iter().map(|v| &v.name))
            .chain(decls.channels.iter());
        for name in names {
            if !seen.insert(name.clone()) {
                report.error(scope, format!("duplicate declaration of `{name}`"));
            }
        }
        for v in &decls.vars {
            let ok = matches!(
                (v.kind, v.init),
                (VarKind::Bool, Value::Bool(_)) | (VarKind::Int, Value::Int(_))
            );
            if !ok {
                report.error(
                    scope,
                    format!("initial value of `{}` does not match its type", v.name),
                );
            }
        }
    }

    let mut automaton_names = HashSet::new();
    for a in &network.automata {
        if !automaton_names.insert(a.name.as_str()) {
            report.error(None, format!("duplicate automaton `{}`", a.name));
        }
        validate_automaton(network, a, &mut report);
    }

    // Channels with a sender but no receiver anywhere (or vice versa) never fire.
    let mut senders = BTreeSet::new();
    let mut receivers = BTreeSet::new();
    for a in &network.automata {
        for e in &a.edges {
            match &e.sync {
                super::Sync::Send(c) => {
                    senders.insert(c.as_str());
                }
                super::Sync::Receive(c) => {
                    receivers.insert(c.as_str());
                }
                super::Sync::Internal => {}
            }
        }
    }
    for c in senders.symmetric_difference(&receivers) {
        if network.has_channel(c) {
            report.warn(None, format!("channel `{c}` is used in one direction only"));
        }
    }

    report
}

fn validate_automaton(network: &Network, a: &TimedAutomaton, report: &mut ValidationReport) {
    let scope = Some(a.name.as_str());
    let mut ids = HashSet::new();
    for loc in &a.locations {
        if !ids.insert(loc.id.as_str()) {
            report.error(scope, format!("duplicate location `{}`", loc.id));
        }
        for c in &loc.invariant.conjuncts {
            if !network.has_clock(&c.lhs) {
                if network.find_var(&c.lhs).is_some() {
                    report.error(
                        scope,
                        format!("invariant not upper-bound-only in `{}`: `{c}` is not a clock constraint", loc.id),
                    );
                } else {
                    report.error(
                        scope,
                        format!("undeclared clock `{}` in invariant of `{}`", c.lhs, loc.id),
                    );
                }
            } else if c.op != CmpOp::Le || !matches!(c.rhs, Value::Int(k) if k >= 0) {
                report.error(
                    scope,
                    format!("invariant not upper-bound-only in `{}`: `{c}`", loc.id),
                );
            }
        }
    }
    if !ids.contains(a.initial.as_str()) {
        report.error(
            scope,
            format!("initial location `{}` does not exist", a.initial),
        );
    }

    let mut directions: Vec<(&str, bool)> = Vec::new();
    for (i, e) in a.edges.iter().enumerate() {
        let what = format!("edge #{i} {} -> {}", e.source, e.target);
        if !ids.contains(e.source.as_str()) {
            report.error(
                scope,
                format!("dangling {what}: unknown source `{}`", e.source),
            );
        }
        if !ids.contains(e.target.as_str()) {
            report.error(
                scope,
                format!("dangling {what}: unknown target `{}`", e.target),
            );
        }
        for c in &e.guard.conjuncts {
            check_guard_atom(network, c, &what, scope, report);
        }
        for r in &e.resets {
            if !network.has_clock(r) {
                report.error(scope, format!("undeclared clock `{r}` reset on {what}"));
            }
        }
        for u in &e.updates {
            match network.find_var(&u.var) {
                None => report.error(
                    scope,
                    format!("undeclared variable `{}` assigned on {what}", u.var),
                ),
                Some(decl) => {
                    let ok = matches!(
                        (decl.kind, u.value),
                        (VarKind::Bool, Value::Bool(_)) | (VarKind::Int, Value::Int(_))
                    );
                    if !ok {
                        report.error(
                            scope,
                            format!("type mismatch in assignment `{u}` on {what}"),
                        );
                    }
                }
            }
        }
        match &e.sync {
            super::Sync::Internal => {}
            super::Sync::Send(c) | super::Sync::Receive(c) => {
                if !network.has_channel(c) {
                    report.error(scope, format!("undeclared channel `{c}` on {what}"));
                }
                directions.push((c.as_str(), matches!(e.sync, super::Sync::Send(_))));
            }
        }
    }
    let sends: HashSet<&str> = directions.iter().filter(|d| d.1).map(|d| d.0).collect();
    let recvs: BTreeSet<&str> = directions.iter().filter(|d| !d.1).map(|d| d.0).collect();
    for c in recvs {
        if sends.contains(c) {
            report.error(
                scope,
                format!("duplicate channel direction: `{c}` is both sent and received"),
            );
        }
    }

    if ids.contains(a.initial.as_str()) {
        let reachable = reachable_locations(a);
        for loc in &a.locations {
            if !reachable.contains(loc.id.as_str()) {
                report.warn(
                    scope,
                    format!(
                        "location `{}` is not connected to the initial location",
                        loc.id
                    ),
                );
            }
        }
    }
}

fn check_guard_atom(
    network: &Network,
    c: &Constraint,
    what: &str,
    scope: Option<&str>,
    report: &mut ValidationReport,
) {
    if network.has_clock(&c.lhs) {
        match c.rhs {
            Value::Int(k) if k >= 0 => {}
            _ => report.error(
                scope,
                format!("clock constraint `{c}` needs a non-negative integer on {what}"),
            ),
        }
        return;
    }
    match network.find_var(&c.lhs) {
        None => {
            let kind = if c.lhs.starts_with("ck") {
                "clock"
            } else {
                "symbol"
            };
            report.error(
                scope,
                format!("undeclared {kind} `{}` in guard of {what}", c.lhs),
            );
        }
        Some(decl) => match (decl.kind, c.rhs) {
            (VarKind::Bool, Value::Bool(_)) if matches!(c.op, CmpOp::Eq | CmpOp::Ne) => {}
            (VarKind::Int, Value::Int(k)) if k >= 0 => {}
            _ => report.error(scope, format!("ill-typed constraint `{c}` on {what}")),
        },
    }
}

fn reachable_locations(a: &TimedAutomaton) -> HashSet<&str> {
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(a.initial.as_str());
    queue.push_back(a.initial.as_str());
    while let Some(l) = queue.pop_front() {
        for e in a.edges.iter().filter(|e| e.source == l) {
            if seen.insert(e.target.as_str()) {
                queue.push_back(e.target.as_str());
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ta::model::*;

    fn single() -> Network {
        let mut a = TimedAutomaton::new("A", "L0");
        a.add_location(Location::new("L0"));
        Network {
            globals: Declarations::default(),
            automata: vec![a],
        }
    }

    #[test]
    fn minimal_network_is_ok() {
        let report = validate_network(&single());
        assert!(report.is_ok(), "{report}");
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn undeclared_clock_in_guard() {
        let mut n = single();
        n.automata[0].add_edge(Edge::new("L0", "L0").when(Constraint::clock("ck_x", CmpOp::Le, 3)));
        let report = validate_network(&n);
        assert!(!report.is_ok());
        assert!(
            report.errors[0].message.contains("undeclared clock"),
            "{report}"
        );
    }

    #[test]
    fn dangling_edge_and_missing_initial() {
        let mut n = single();
        n.automata[0].add_edge(Edge::new("L0", "L9"));
        n.automata[0].initial = "nowhere".into();
        let report = validate_network(&n);
        let text = report.to_string();
        assert!(text.contains("dangling"), "{text}");
        assert!(text.contains("initial location"), "{text}");
    }

    #[test]
    fn invariant_must_be_clock_upper_bound() {
        let mut n = single();
        n.globals.clock("ck");
        n.automata[0].locations[0].invariant =
            Guard::always().and(Constraint::clock("ck", CmpOp::Ge, 2));
        let report = validate_network(&n);
        assert!(
            report.errors[0]
                .message
                .contains("invariant not upper-bound-only"),
            "{report}"
        );
    }

    #[test]
    fn both_directions_on_one_automaton() {
        let mut n = single();
        n.globals.channel("c");
        n.automata[0].add_edge(Edge::new("L0", "L0").send("c"));
        n.automata[0].add_edge(Edge::new("L0", "L0").receive("c"));
        let report = validate_network(&n);
        assert!(
            report.errors[0]
                .message
                .contains("duplicate channel direction"),
            "{report}"
        );
    }

    #[test]
    fn disconnected_location_is_a_warning() {
        let mut n = single();
        n.automata[0].add_location(Location::new("island"));
        let report = validate_network(&n);
        assert!(report.is_ok());
        assert_eq!(report.warnings.len(), 1);
    }
}
