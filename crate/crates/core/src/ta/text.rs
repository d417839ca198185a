//! Line-oriented text format for networks.
//!
//! ```text
//! clock ck
//! var bool done = false
//! chan go
//! automaton A
//! loc idle
//! loc busy inv ck<=5
//! init idle
//! edge idle -> busy sync go? reset ck
//! edge busy -> idle guard ck==5 set done=true
//! ```
//!
//! Declarations before the first `automaton` line are global, later ones
//! belong to the automaton being described. `#` starts a comment.

use std::fmt::Write as _;

use thiserror::Error;

use super::model::{
    CmpOp, Constraint, Declarations, Edge, Guard, Location, Network, Sync, TimedAutomaton, Update,
    Value, VarDecl, VarKind,
};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct TextError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> TextError {
    TextError {
        line,
        message: message.into(),
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn ident(line: usize, s: &str, what: &str) -> Result<String, TextError> {
    if is_ident(s) {
        Ok(s.to_string())
    } else {
        Err(err(line, format!("invalid {what} `{s}`")))
    }
}

/// Parses `a==1 && b && !c` into a conjunction of constraints.
pub fn parse_guard(text: &str) -> Result<Guard, String> {
    let text = text.trim();
    if text.is_empty() || text == "true" {
        return Ok(Guard::always());
    }
    let mut conjuncts = Vec::new();
    for part in text.split("&&") {
        let part = part.trim();
        if let Some((lhs, op, rhs)) = CmpOp::split(part) {
            let lhs = lhs.trim();
            if !is_ident(lhs) {
                return Err(format!("invalid operand `{lhs}`"));
            }
            let rhs =
                Value::parse(rhs).ok_or_else(|| format!("invalid constant `{}`", rhs.trim()))?;
            conjuncts.push(Constraint::new(lhs, op, rhs));
        } else if let Some(name) = part.strip_prefix('!') {
            let name = name.trim();
            if !is_ident(name) {
                return Err(format!("invalid operand `{name}`"));
            }
            conjuncts.push(Constraint::is(name, false));
        } else if is_ident(part) {
            conjuncts.push(Constraint::is(part, true));
        } else {
            return Err(format!("cannot parse constraint `{part}`"));
        }
    }
    Ok(Guard { conjuncts })
}

const EDGE_KEYWORDS: [&str; 4] = ["guard", "sync", "reset", "set"];

fn parse_edge(line: usize, rest: &[&str]) -> Result<(Edge, usize), TextError> {
    if rest.len() < 3 || rest[1] != "->" {
        return Err(err(line, "expected `edge <src> -> <dst> ...`"));
    }
    let mut edge = Edge::new(
        ident(line, rest[0], "location")?,
        ident(line, rest[2], "location")?,
    );
    let mut syncs = 0;
    let mut i = 3;
    while i < rest.len() {
        let keyword = rest[i];
        if !EDGE_KEYWORDS.contains(&keyword) {
            return Err(err(line, format!("unexpected `{keyword}` in edge")));
        }
        let start = i + 1;
        let mut end = start;
        while end < rest.len() && !EDGE_KEYWORDS.contains(&rest[end]) {
            end += 1;
        }
        let body = rest[start..end].join(" ");
        if body.is_empty() {
            return Err(err(line, format!("empty `{keyword}` clause")));
        }
        match keyword {
            "guard" => {
                let g = parse_guard(&body).map_err(|m| err(line, m))?;
                edge.guard.conjuncts.extend(g.conjuncts);
            }
            "sync" => {
                syncs += 1;
                let body = body.replace(' ', "");
                edge.sync = if let Some(c) = body.strip_suffix('!') {
                    Sync::Send(ident(line, c, "channel")?)
                } else if let Some(c) = body.strip_suffix('?') {
                    Sync::Receive(ident(line, c, "channel")?)
                } else {
                    return Err(err(line, format!("sync `{body}` must end in `!` or `?`")));
                };
            }
            "reset" => {
                for c in body.split(',') {
                    edge.resets.push(ident(line, c.trim(), "clock")?);
                }
            }
            "set" => {
                for a in body.split(',') {
                    let (var, val) = a
                        .split_once('=')
                        .ok_or_else(|| err(line, format!("expected `<var>=<value>` in `{a}`")))?;
                    let value = Value::parse(val)
                        .ok_or_else(|| err(line, format!("invalid value `{}`", val.trim())))?;
                    edge.updates
                        .push(Update::new(ident(line, var.trim(), "variable")?, value));
                }
            }
            _ => unreachable!(),
        }
        i = end;
    }
    Ok((edge, syncs))
}

fn parse_location(line: usize, rest: &[&str]) -> Result<Location, TextError> {
    let id = rest
        .first()
        .ok_or_else(|| err(line, "expected location id"))?;
    let mut loc = Location::new(ident(line, id, "location")?);
    let mut i = 1;
    while i < rest.len() {
        match rest[i] {
            "urgent" => {
                loc.urgent = true;
                i += 1;
            }
            "inv" => {
                let mut end = i + 1;
                while end < rest.len() && rest[end] != "urgent" {
                    end += 1;
                }
                let g = parse_guard(&rest[i + 1..end].join(" ")).map_err(|m| err(line, m))?;
                loc.invariant.conjuncts.extend(g.conjuncts);
                i = end;
            }
            other => return Err(err(line, format!("unexpected `{other}` in location"))),
        }
    }
    Ok(loc)
}

fn parse_var(line: usize, rest: &[&str]) -> Result<VarDecl, TextError> {
    let text = rest.join(" ");
    let mut words = text.splitn(2, ' ');
    let kind = match words.next() {
        Some("bool") => VarKind::Bool,
        Some("int") => VarKind::Int,
        _ => return Err(err(line, "expected `var bool|int <id> = <init>`")),
    };
    let body = words.next().unwrap_or("");
    let (name, init) = match body.split_once('=') {
        Some((n, v)) => (n.trim(), Some(v.trim())),
        None => (body.trim(), None),
    };
    let init = match (kind, init) {
        (VarKind::Bool, None) => Value::Bool(false),
        (VarKind::Int, None) => Value::Int(0),
        (_, Some(v)) => {
            Value::parse(v).ok_or_else(|| err(line, format!("invalid initial value `{v}`")))?
        }
    };
    Ok(VarDecl {
        name: ident(line, name, "variable")?,
        kind,
        init,
    })
}

pub fn parse_network(text: &str) -> Result<Network, TextError> {
    let mut network = Network::default();
    let mut current: Option<TimedAutomaton> = None;
    let mut init_seen = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let words: Vec<&str> = content.split_whitespace().collect();
        let (head, rest) = (words[0], &words[1..]);
        let decls: &mut Declarations = match current.as_mut() {
            Some(a) => &mut a.decls,
            None => &mut network.globals,
        };
        match head {
            "automaton" => {
                let [name] = rest else {
                    return Err(err(line, "expected `automaton <name>`"));
                };
                if let Some(a) = current.take() {
                    if !init_seen {
                        return Err(err(
                            line,
                            format!("automaton `{}` has no `init` line", a.name),
                        ));
                    }
                    network.automata.push(a);
                }
                current = Some(TimedAutomaton::new(
                    ident(line, name, "automaton name")?,
                    "",
                ));
                init_seen = false;
            }
            "clock" => {
                for c in rest.join(" ").split(',') {
                    decls.clocks.push(ident(line, c.trim(), "clock")?);
                }
            }
            "chan" => {
                for c in rest.join(" ").split(',') {
                    decls.channels.push(ident(line, c.trim(), "channel")?);
                }
            }
            "var" => decls.vars.push(parse_var(line, rest)?),
            "loc" | "init" | "edge" => {
                let a = current
                    .as_mut()
                    .ok_or_else(|| err(line, format!("`{head}` outside of an automaton")))?;
                match head {
                    "loc" => {
                        a.locations.push(parse_location(line, rest)?);
                    }
                    "init" => {
                        let [id] = rest else {
                            return Err(err(line, "expected `init <location>`"));
                        };
                        a.initial = ident(line, id, "location")?;
                        init_seen = true;
                    }
                    _ => {
                        let (edge, syncs) = parse_edge(line, rest)?;
                        if syncs > 1 {
                            return Err(err(
                                line,
                                "duplicate channel direction: more than one sync on an edge",
                            ));
                        }
                        a.edges.push(edge);
                    }
                }
            }
            other => return Err(err(line, format!("unknown declaration `{other}`"))),
        }
    }
    if let Some(a) = current.take() {
        if !init_seen {
            return Err(err(
                text.lines().count(),
                format!("automaton `{}` has no `init` line", a.name),
            ));
        }
        network.automata.push(a);
    }
    Ok(network)
}

fn write_decls(out: &mut String, decls: &Declarations) {
    for c in &decls.clocks {
        let _ = writeln!(out, "clock {c}");
    }
    for v in &decls.vars {
        let _ = writeln!(out, "var {} {} = {}", v.kind, v.name, v.init);
    }
    for c in &decls.channels {
        let _ = writeln!(out, "chan {c}");
    }
}

/// Canonical text rendering; [`parse_network`] reads it back unchanged.
pub fn print_network(network: &Network) -> String {
    let mut out = String::new();
    write_decls(&mut out, &network.globals);
    for a in &network.automata {
        let _ = writeln!(out, "\nautomaton {}", a.name);
        write_decls(&mut out, &a.decls);
        for l in &a.locations {
            let _ = write!(out, "loc {}", l.id);
            if l.urgent {
                out.push_str(" urgent");
            }
            if !l.invariant.is_true() {
                let _ = write!(out, " inv {}", l.invariant);
            }
            out.push('\n');
        }
        let _ = writeln!(out, "init {}", a.initial);
        for e in &a.edges {
            let _ = write!(out, "edge {} -> {}", e.source, e.target);
            if !e.guard.is_true() {
                let _ = write!(out, " guard {}", e.guard);
            }
            if e.sync != Sync::Internal {
                let _ = write!(out, " sync {}", e.sync);
            }
            if !e.resets.is_empty() {
                let _ = write!(out, " reset {}", e.resets.join(","));
            }
            if !e.updates.is_empty() {
                let ups: Vec<String> = e.updates.iter().map(Update::to_string).collect();
                let _ = write!(out, " set {}", ups.join(","));
            }
            out.push('\n');
        }
    }
    out
}
