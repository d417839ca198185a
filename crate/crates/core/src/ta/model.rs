//! Symbolic (name-based) description of a network of timed automata.
//!
//! Everything here refers to clocks, variables, channels and locations by
//! name. [`crate::ta::System`] resolves names to indices once the network has
//! been validated.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Comparison operator used by guards, invariants and property atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn eval(self, lhs: i64, rhs: i64) -> bool {
        match self {
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    /// The operator `op'` with `!(a op b) == (a op' b)`.
    pub fn negate(self) -> CmpOp {
        match self {
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Ge => CmpOp::Lt,
        }
    }

    pub const ALL: [CmpOp; 6] = [
        CmpOp::Eq,
        CmpOp::Ne,
        CmpOp::Lt,
        CmpOp::Le,
        CmpOp::Gt,
        CmpOp::Ge,
    ];

    /// Splits `text` at the first comparison operator, longest match first.
    pub fn split(text: &str) -> Option<(&str, CmpOp, &str)> {
        let bytes = text.as_bytes();
        for i in 0..bytes.len() {
            let two = if i + 1 < bytes.len() {
                &text[i..i + 2]
            } else {
                ""
            };
            let op = match two {
                "==" => Some((CmpOp::Eq, 2)),
                "!=" => Some((CmpOp::Ne, 2)),
                "<=" => Some((CmpOp::Le, 2)),
                ">=" => Some((CmpOp::Ge, 2)),
                _ => match bytes[i] {
                    b'<' => Some((CmpOp::Lt, 1)),
                    b'>' => Some((CmpOp::Gt, 1)),
                    _ => None,
                },
            };
            if let Some((op, len)) = op {
                return Some((&text[..i], op, &text[i + len..]));
            }
        }
        None
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A literal on the right-hand side of a constraint or assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Value {
    Bool(bool),
    Int(i64),
}

impl Value {
    pub fn as_i64(self) -> i64 {
        match self {
            Value::Bool(b) => b as i64,
            Value::Int(v) => v,
        }
    }

    pub fn parse(text: &str) -> Option<Value> {
        match text.trim() {
            "true" => Some(Value::Bool(true)),
            "false" => Some(Value::Bool(false)),
            other => other.parse().ok().map(Value::Int),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(v) => write!(f, "{v}"),
        }
    }
}

/// One atomic constraint `lhs op rhs`, where `lhs` names a clock or a variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Constraint {
    pub lhs: String,
    pub op: CmpOp,
    pub rhs: Value,
}

impl Constraint {
    pub fn new(lhs: impl Into<String>, op: CmpOp, rhs: Value) -> Self {
        Constraint {
            lhs: lhs.into(),
            op,
            rhs,
        }
    }

    pub fn clock(lhs: impl Into<String>, op: CmpOp, k: i64) -> Self {
        Constraint::new(lhs, op, Value::Int(k))
    }

    pub fn is(lhs: impl Into<String>, value: bool) -> Self {
        Constraint::new(lhs, CmpOp::Eq, Value::Bool(value))
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.lhs, self.op, self.rhs)
    }
}

/// Conjunction of atomic constraints. The empty guard is `true`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Guard {
    pub conjuncts: Vec<Constraint>,
}

impl Guard {
    pub fn always() -> Self {
        Guard::default()
    }

    pub fn is_true(&self) -> bool {
        self.conjuncts.is_empty()
    }

    pub fn and(mut self, c: Constraint) -> Self {
        self.conjuncts.push(c);
        self
    }
}

impl From<Vec<Constraint>> for Guard {
    fn from(conjuncts: Vec<Constraint>) -> Self {
        Guard { conjuncts }
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.conjuncts.is_empty() {
            return f.write_str("true");
        }
        for (i, c) in self.conjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str(" && ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sync {
    Internal,
    Send(String),
    Receive(String),
}

impl Sync {
    pub fn channel(&self) -> Option<&str> {
        match self {
            Sync::Internal => None,
            Sync::Send(c) | Sync::Receive(c) => Some(c),
        }
    }
}

impl fmt::Display for Sync {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sync::Internal => Ok(()),
            Sync::Send(c) => write!(f, "{c}!"),
            Sync::Receive(c) => write!(f, "{c}?"),
        }
    }
}

/// Assignment `var := value`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Update {
    pub var: String,
    pub value: Value,
}

impl Update {
    pub fn new(var: impl Into<String>, value: Value) -> Self {
        Update {
            var: var.into(),
            value,
        }
    }

    pub fn set(var: impl Into<String>, value: bool) -> Self {
        Update::new(var, Value::Bool(value))
    }
}

impl fmt::Display for Update {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.var, self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Location {
    pub id: String,
    /// Clock upper bounds only (`clock <= k`).
    pub invariant: Guard,
    pub urgent: bool,
}

impl Location {
    pub fn new(id: impl Into<String>) -> Self {
        Location {
            id: id.into(),
            invariant: Guard::always(),
            urgent: false,
        }
    }

    pub fn bounded(id: impl Into<String>, clock: &str, bound: i64) -> Self {
        Location {
            id: id.into(),
            invariant: Guard::always().and(Constraint::clock(clock, CmpOp::Le, bound)),
            urgent: false,
        }
    }

    pub fn urgent(mut self) -> Self {
        self.urgent = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub source: String,
    pub target: String,
    pub guard: Guard,
    pub sync: Sync,
    pub resets: Vec<String>,
    pub updates: Vec<Update>,
}

impl Edge {
    pub fn new(source: impl Into<String>, target: impl Into<String>) -> Self {
        Edge {
            source: source.into(),
            target: target.into(),
            guard: Guard::always(),
            sync: Sync::Internal,
            resets: Vec::new(),
            updates: Vec::new(),
        }
    }

    pub fn when(mut self, c: Constraint) -> Self {
        self.guard.conjuncts.push(c);
        self
    }

    pub fn send(mut self, chan: impl Into<String>) -> Self {
        self.sync = Sync::Send(chan.into());
        self
    }

    pub fn receive(mut self, chan: impl Into<String>) -> Self {
        self.sync = Sync::Receive(chan.into());
        self
    }

    pub fn reset(mut self, clock: impl Into<String>) -> Self {
        self.resets.push(clock.into());
        self
    }

    pub fn assign(mut self, update: Update) -> Self {
        self.updates.push(update);
        self
    }

    pub fn set(self, var: &str, value: bool) -> Self {
        self.assign(Update::set(var, value))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarKind {
    Bool,
    Int,
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VarKind::Bool => "bool",
            VarKind::Int => "int",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarDecl {
    pub name: String,
    pub kind: VarKind,
    pub init: Value,
}

impl VarDecl {
    pub fn boolean(name: impl Into<String>, init: bool) -> Self {
        VarDecl {
            name: name.into(),
            kind: VarKind::Bool,
            init: Value::Bool(init),
        }
    }

    pub fn int(name: impl Into<String>, init: i64) -> Self {
        VarDecl {
            name: name.into(),
            kind: VarKind::Int,
            init: Value::Int(init),
        }
    }
}

/// Clock, variable and channel declarations of one scope.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Declarations {
    pub clocks: Vec<String>,
    pub vars: Vec<VarDecl>,
    pub channels: Vec<String>,
}

impl Declarations {
    pub fn is_empty(&self) -> bool {
        self.clocks.is_empty() && self.vars.is_empty() && self.channels.is_empty()
    }

    pub fn clock(&mut self, name: &str) -> &mut Self {
        self.clocks.push(name.to_string());
        self
    }

    pub fn var(&mut self, decl: VarDecl) -> &mut Self {
        self.vars.push(decl);
        self
    }

    pub fn channel(&mut self, name: &str) -> &mut Self {
        self.channels.push(name.to_string());
        self
    }

    pub fn has_clock(&self, name: &str) -> bool {
        self.clocks.iter().any(|c| c == name)
    }

    pub fn find_var(&self, name: &str) -> Option<&VarDecl> {
        self.vars.iter().find(|v| v.name == name)
    }

    pub fn has_channel(&self, name: &str) -> bool {
        self.channels.iter().any(|c| c == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimedAutomaton {
    pub name: String,
    pub locations: Vec<Location>,
    pub initial: String,
    pub edges: Vec<Edge>,
    /// Declarations introduced inside this automaton. They share the single
    /// network-wide namespace.
    pub decls: Declarations,
}

impl TimedAutomaton {
    pub fn new(name: impl Into<String>, initial: impl Into<String>) -> Self {
        TimedAutomaton {
            name: name.into(),
            locations: Vec::new(),
            initial: initial.into(),
            edges: Vec::new(),
            decls: Declarations::default(),
        }
    }

    pub fn location(&self, id: &str) -> Option<&Location> {
        self.locations.iter().find(|l| l.id == id)
    }

    pub fn location_mut(&mut self, id: &str) -> Option<&mut Location> {
        self.locations.iter_mut().find(|l| l.id == id)
    }

    pub fn add_location(&mut self, loc: Location) -> &mut Self {
        self.locations.push(loc);
        self
    }

    pub fn add_edge(&mut self, edge: Edge) -> &mut Self {
        self.edges.push(edge);
        self
    }
}

/// A network: shared declarations plus automata composed in parallel.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Network {
    pub globals: Declarations,
    pub automata: Vec<TimedAutomaton>,
}

impl Network {
    pub fn automaton(&self, name: &str) -> Option<&TimedAutomaton> {
        self.automata.iter().find(|a| a.name == name)
    }

    pub fn automaton_mut(&mut self, name: &str) -> Option<&mut TimedAutomaton> {
        self.automata.iter_mut().find(|a| a.name == name)
    }

    /// Every declaration scope, globals first, then automata in order.
    pub fn scopes(&self) -> impl Iterator<Item = &Declarations> {
        std::iter::once(&self.globals).chain(self.automata.iter().map(|a| &a.decls))
    }

    pub fn all_clocks(&self) -> impl Iterator<Item = &str> {
        self.scopes()
            .flat_map(|d| d.clocks.iter().map(String::as_str))
    }

    pub fn all_vars(&self) -> impl Iterator<Item = &VarDecl> {
        self.scopes().flat_map(|d| d.vars.iter())
    }

    pub fn all_channels(&self) -> impl Iterator<Item = &str> {
        self.scopes()
            .flat_map(|d| d.channels.iter().map(String::as_str))
    }

    pub fn has_clock(&self, name: &str) -> bool {
        self.all_clocks().any(|c| c == name)
    }

    pub fn find_var(&self, name: &str) -> Option<&VarDecl> {
        self.all_vars().find(|v| v.name == name)
    }

    pub fn has_channel(&self, name: &str) -> bool {
        self.all_channels().any(|c| c == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_prefers_two_char_operators() {
        assert_eq!(CmpOp::split("ck<=10"), Some(("ck", CmpOp::Le, "10")));
        assert_eq!(CmpOp::split("x != 3"), Some(("x ", CmpOp::Ne, " 3")));
        assert_eq!(CmpOp::split("ck>4"), Some(("ck", CmpOp::Gt, "4")));
        assert_eq!(CmpOp::split("plain"), None);
    }

    #[test]
    fn negation_is_complement() {
        for op in CmpOp::ALL {
            for a in -2..3 {
                for b in -2..3 {
                    assert_eq!(op.eval(a, b), !op.negate().eval(a, b));
                }
            }
        }
    }
}
