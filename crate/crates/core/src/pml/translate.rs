use std::collections::BTreeMap;

use super::ast::{PExpr, PmlDecl, PmlProcess, PmlType, Stmt, StmtKind};
use crate::ta::{
    CmpOp, Constraint, Declarations, Edge, Guard, Location, Network, TimedAutomaton, Update, Value,
    VarDecl,
};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Target {
    At(String),
    Label(String),
}

struct Builder<'a> {
    process: &'a PmlProcess,
    edges: Vec<(String, Target, Edge)>,
}

/// Disjunctive normal form of `e` (or of its negation). The empty list is
/// `false`; a list holding the empty conjunction is `true`.
fn dnf(p: &PmlProcess, e: &PExpr, positive: bool) -> Vec<Vec<Constraint>> {
    let cross = |a: Vec<Vec<Constraint>>, b: Vec<Vec<Constraint>>| {
        let mut out = Vec::new();
        for x in &a {
            for y in &b {
                out.push(x.iter().chain(y).cloned().collect());
            }
        }
        out
    };
    match e {
        PExpr::Const(b) => {
            if *b == positive {
                vec![vec![]]
            } else {
                vec![]
            }
        }
        PExpr::Var(v) => match p.decl(v).map(|d| d.ty) {
            Some(PmlType::Int) => {
                let op = if positive { CmpOp::Ne } else { CmpOp::Eq };
                vec![vec![Constraint::new(v.clone(), op, Value::Int(0))]]
            }
            _ => vec![vec![Constraint::is(v.clone(), positive)]],
        },
        PExpr::Cmp { var, op, value } => {
            let op = if positive { *op } else { op.negate() };
            let c = match (op, value) {
                (CmpOp::Ne, Value::Bool(b)) => Constraint::is(var.clone(), !*b),
                _ => Constraint::new(var.clone(), op, *value),
            };
            vec![vec![c]]
        }
        PExpr::Not(a) => dnf(p, a, !positive),
        PExpr::And(a, b) if positive => cross(dnf(p, a, true), dnf(p, b, true)),
        PExpr::Or(a, b) if !positive => cross(dnf(p, a, false), dnf(p, b, false)),
        PExpr::And(a, b) | PExpr::Or(a, b) => {
            let mut out = dnf(p, a, positive);
            out.extend(dnf(p, b, positive));
            out
        }
    }
}

fn guard_of(cs: Vec<Constraint>) -> Guard {
    Guard { conjuncts: cs }
}

impl Builder<'_> {
    fn edge(&mut self, from: &str, to: Target, e: Edge) {
        self.edges.push((from.to_string(), to, e));
    }

    /// Guard under which an `else` branch of `branches` is enabled.
    fn else_guard(&self, branches: &[Vec<Stmt>]) -> Vec<Vec<Constraint>> {
        let mut acc: Vec<Vec<Constraint>> = vec![vec![]];
        for b in branches {
            let neg = match &b[0].kind {
                StmtKind::Else => continue,
                StmtKind::Guard(g) => dnf(self.process, g, false),
                // Always executable: else never is.
                _ => vec![],
            };
            let mut next = Vec::new();
            for x in &acc {
                for y in &neg {
                    next.push(x.iter().chain(y).cloned().collect());
                }
            }
            acc = next;
        }
        acc
    }

    /// Edges for an atomic statement, optionally preceded by guard
    /// alternatives.
    fn atomic(&mut self, from: &str, to: &Target, s: Option<&Stmt>, guards: Vec<Vec<Constraint>>) {
        for cs in guards {
            let mut e = Edge::new(from, "");
            e.guard = guard_of(cs);
            match s.map(|s| &s.kind) {
                Some(StmtKind::Assign { var, value }) => {
                    e.updates.push(Update::new(var.clone(), *value))
                }
                Some(StmtKind::Send { chan }) => e = e.send(chan.clone()),
                Some(StmtKind::Receive { chan }) => e = e.receive(chan.clone()),
                _ => {}
            }
            self.edge(from, to.clone(), e);
        }
    }

    fn branches(
        &mut self,
        entry: &str,
        branches: &[Vec<Stmt>],
        exit: &Target,
        brk: Option<&Target>,
    ) {
        let else_guard = self.else_guard(branches);
        for b in branches {
            if b[0].kind == StmtKind::Else {
                // `else` fuses with the statement that follows it.
                let (first, rest) = (b.get(1), b.get(2..).unwrap_or(&[]));
                self.fused(entry, first, rest, else_guard.clone(), exit, brk);
            } else {
                self.seq(b, entry, false, exit, brk);
            }
        }
    }

    /// Guard alternatives `guards` followed by `first` and then `rest`.
    fn fused(
        &mut self,
        entry: &str,
        first: Option<&Stmt>,
        rest: &[Stmt],
        guards: Vec<Vec<Constraint>>,
        exit: &Target,
        brk: Option<&Target>,
    ) {
        let atomic_next = first.filter(|s| {
            s.label.is_none()
                && matches!(
                    s.kind,
                    StmtKind::Assign { .. }
                        | StmtKind::Send { .. }
                        | StmtKind::Receive { .. }
                        | StmtKind::Skip
                )
        });
        let (taken, remaining): (Option<&Stmt>, Vec<Stmt>) = match (atomic_next, first) {
            (Some(s), _) => (Some(s), rest.to_vec()),
            (None, Some(s)) => (
                None,
                std::iter::once(s.clone())
                    .chain(rest.iter().cloned())
                    .collect(),
            ),
            (None, None) => (None, Vec::new()),
        };
        if remaining.is_empty() {
            self.atomic(entry, exit, taken, guards);
            return;
        }
        let mid = self.continuation(&remaining, exit, brk);
        self.atomic(entry, &mid, taken, guards);
        if remaining[0].label.is_none() && remaining[0].is_jump() {
            return;
        }
        if let Target::At(own) = &mid {
            let own = own.clone();
            self.seq(&remaining, &own, true, exit, brk);
        }
    }

    /// Where control goes before the first statement of `stmts`: the jump
    /// target for an unlabelled jump, else the statement's own location.
    fn continuation(&self, stmts: &[Stmt], exit: &Target, brk: Option<&Target>) -> Target {
        match stmts.first() {
            None => exit.clone(),
            Some(s) if s.label.is_none() && s.is_jump() => self.jump(s, brk),
            Some(s) => Target::At(s.point()),
        }
    }

    fn jump(&self, s: &Stmt, brk: Option<&Target>) -> Target {
        match &s.kind {
            StmtKind::Goto(l) => Target::Label(l.clone()),
            StmtKind::Break => brk.cloned().expect("break checked at parse time"),
            _ => unreachable!(),
        }
    }

    /// A statement sequence starting at `entry`. When `own` is false the
    /// entry belongs to an enclosing selection.
    fn seq(&mut self, stmts: &[Stmt], entry: &str, own: bool, exit: &Target, brk: Option<&Target>) {
        let mut entry = entry.to_string();
        let mut own = own;
        let mut i = 0;
        while i < stmts.len() {
            let s = &stmts[i];
            let needs_own = s.label.is_some() || matches!(s.kind, StmtKind::Do(_));
            if !own && needs_own {
                let point = s.point();
                self.edge(&entry, Target::At(point.clone()), Edge::new(&entry, ""));
                entry = point;
            }
            let next = self.continuation(&stmts[i + 1..], exit, brk);
            let skip_jump = |j: usize| {
                stmts
                    .get(j)
                    .is_some_and(|n| n.label.is_none() && n.is_jump())
            };
            match &s.kind {
                StmtKind::Goto(_) | StmtKind::Break => {
                    let t = self.jump(s, brk);
                    self.edge(&entry, t, Edge::new(&entry, ""));
                }
                StmtKind::Guard(g) => {
                    let guards = dnf(self.process, g, true);
                    let after = &stmts[i + 1..];
                    let first = after.first();
                    let fusable = first.is_some_and(|f| {
                        f.label.is_none()
                            && matches!(
                                f.kind,
                                StmtKind::Assign { .. }
                                    | StmtKind::Send { .. }
                                    | StmtKind::Receive { .. }
                                    | StmtKind::Skip
                            )
                    });
                    if fusable {
                        let to = self.continuation(&stmts[i + 2..], exit, brk);
                        self.atomic(&entry, &to, first, guards);
                        i += 1;
                        if skip_jump(i + 1) {
                            i += 1;
                        }
                    } else {
                        self.atomic(&entry, &next, None, guards);
                        if skip_jump(i + 1) {
                            i += 1;
                        }
                    }
                }
                StmtKind::Assign { .. }
                | StmtKind::Send { .. }
                | StmtKind::Receive { .. }
                | StmtKind::Skip => {
                    self.atomic(&entry, &next, Some(s), vec![vec![]]);
                    if skip_jump(i + 1) {
                        i += 1;
                    }
                }
                StmtKind::If(bs) => {
                    self.branches(&entry, bs, &next, brk);
                    if skip_jump(i + 1) {
                        i += 1;
                    }
                }
                StmtKind::Do(bs) => {
                    let here = Target::At(entry.clone());
                    self.branches(&entry, bs, &here, Some(&next));
                    if skip_jump(i + 1) {
                        i += 1;
                    }
                }
                StmtKind::Else => {}
            }
            i += 1;
            if let Some(n) = stmts.get(i) {
                entry = n.point();
                own = true;
            }
        }
    }
}

fn var_decl(d: &PmlDecl) -> Option<VarDecl> {
    match d.ty {
        PmlType::Bool => Some(VarDecl::boolean(
            &d.name,
            matches!(d.init, Some(Value::Bool(true))),
        )),
        PmlType::Int => Some(VarDecl::int(&d.name, d.init.map_or(0, Value::as_i64))),
        PmlType::Chan => None,
    }
}

fn declarations(ds: &[PmlDecl]) -> Declarations {
    let mut out = Declarations::default();
    for d in ds {
        match var_decl(d) {
            Some(v) => {
                out.var(v);
            }
            None => {
                out.channel(&d.name);
            }
        }
    }
    out
}

/// Control-flow translation: control points become locations, statements
/// become edges. Local declarations stay with the automaton.
pub fn translate(p: &PmlProcess) -> TimedAutomaton {
    let end = format!("P_{}_{}", p.end.0, p.end.1);
    let initial = p.body.first().map_or(end.clone(), Stmt::point);
    let mut b = Builder {
        process: p,
        edges: Vec::new(),
    };
    if !p.body.is_empty() {
        b.seq(&p.body, &initial, true, &Target::At(end.clone()), None);
    }
    // Labels name the location of the statement they mark.
    let labels: BTreeMap<String, String> = p
        .labels()
        .into_iter()
        .map(|s| (s.label.clone().unwrap(), s.point()))
        .collect();
    let mut a = TimedAutomaton::new(&p.name, &initial);
    a.decls = declarations(&p.locals);
    let mut seen = vec![initial.clone()];
    for (from, to, mut e) in b.edges {
        let to = match to {
            Target::At(l) => l,
            Target::Label(l) => labels[&l].clone(),
        };
        e.source = from.clone();
        e.target = to.clone();
        for l in [from, to] {
            if !seen.contains(&l) {
                seen.push(l);
            }
        }
        a.edges.push(e);
    }
    for l in seen {
        a.add_location(Location::new(l));
    }
    a
}

/// The translated automaton with the model's global declarations, as a
/// standalone network.
pub fn translate_network(p: &PmlProcess) -> Network {
    Network {
        globals: declarations(&p.globals),
        automata: vec![translate(p)],
    }
}
