use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ast::{Expr, PropertyAst, Quantifier};
use crate::contracts::Facet;
use crate::ta::{CmpOp, State, System, Value, VarKind};

/// State predicate with every name resolved to an index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pred {
    Const(bool),
    Var { var: usize, op: CmpOp, k: i64 },
    Clock { clock: usize, op: CmpOp, k: i64 },
    At { automaton: usize, location: u16 },
    Not(Box<Pred>),
    And(Vec<Pred>),
    Or(Vec<Pred>),
}

impl Pred {
    pub fn eval(&self, s: &State) -> bool {
        match self {
            Pred::Const(b) => *b,
            Pred::Var { var, op, k } => op.eval(s.vars[*var] as i64, *k),
            Pred::Clock { clock, op, k } => op.eval(s.clocks[*clock] as i64, *k),
            Pred::At {
                automaton,
                location,
            } => s.locations[*automaton] == *location,
            Pred::Not(p) => !p.eval(s),
            Pred::And(ps) => ps.iter().all(|p| p.eval(s)),
            Pred::Or(ps) => ps.iter().any(|p| p.eval(s)),
        }
    }

    pub fn negate(p: Pred) -> Pred {
        match p {
            Pred::Const(b) => Pred::Const(!b),
            Pred::Not(inner) => *inner,
            p => Pred::Not(Box::new(p)),
        }
    }

    pub fn and(a: Pred, b: Pred) -> Pred {
        match (a, b) {
            (Pred::Const(true), p) | (p, Pred::Const(true)) => p,
            (Pred::And(mut xs), Pred::And(ys)) => {
                xs.extend(ys);
                Pred::And(xs)
            }
            (Pred::And(mut xs), p) => {
                xs.push(p);
                Pred::And(xs)
            }
            (a, b) => Pred::And(vec![a, b]),
        }
    }

    pub fn or(a: Pred, b: Pred) -> Pred {
        match (a, b) {
            (Pred::Const(false), p) | (p, Pred::Const(false)) => p,
            (Pred::Or(mut xs), Pred::Or(ys)) => {
                xs.extend(ys);
                Pred::Or(xs)
            }
            (Pred::Or(mut xs), p) => {
                xs.push(p);
                Pred::Or(xs)
            }
            (a, b) => Pred::Or(vec![a, b]),
        }
    }

    /// `(clock, constant)` pairs the predicate compares against.
    pub fn clock_constants(&self) -> Vec<(usize, u32)> {
        let mut out = Vec::new();
        self.walk(&mut |p| {
            if let Pred::Clock { clock, k, .. } = p {
                out.push((*clock, (*k).max(0) as u32));
            }
        });
        out
    }

    fn walk(&self, f: &mut impl FnMut(&Pred)) {
        f(self);
        match self {
            Pred::Not(p) => p.walk(f),
            Pred::And(ps) | Pred::Or(ps) => ps.iter().for_each(|p| p.walk(f)),
            _ => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryKind {
    /// Holds in every reachable state.
    Invariant(Pred),
    /// Holds in some reachable state.
    Reachable(Pred),
    /// Some reachable `trigger` state can reach a `response` state.
    BoundedWitness { trigger: Pred, response: Pred },
    /// From every reachable `trigger` state, every path meets `response`.
    LeadsTo { trigger: Pred, response: Pred },
}

impl QueryKind {
    pub fn label(&self) -> &'static str {
        match self {
            QueryKind::Invariant(_) => "invariant",
            QueryKind::Reachable(_) => "reachable",
            QueryKind::BoundedWitness { .. } => "witness",
            QueryKind::LeadsTo { .. } => "leads-to",
        }
    }

    pub fn is_universal(&self) -> bool {
        matches!(self, QueryKind::Invariant(_) | QueryKind::LeadsTo { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckableQuery {
    pub name: String,
    pub kind: QueryKind,
    /// Reachability of the antecedent, checked alongside an implication
    /// compiled to an invariant.
    pub vacuity: Option<Pred>,
    pub facet: Option<Facet>,
    pub source: String,
}

impl CheckableQuery {
    pub fn clock_constants(&self) -> Vec<(usize, u32)> {
        let mut out = match &self.kind {
            QueryKind::Invariant(p) | QueryKind::Reachable(p) => p.clock_constants(),
            QueryKind::BoundedWitness { trigger, response }
            | QueryKind::LeadsTo { trigger, response } => {
                let mut v = trigger.clock_constants();
                v.extend(response.clock_constants());
                v
            }
        };
        if let Some(v) = &self.vacuity {
            out.extend(v.clock_constants());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("{property}: unresolved name `{name}`")]
    Unresolved { property: String, name: String },
    #[error("{property}: {message}")]
    Ill { property: String, message: String },
}

/// How each quantifier/shape combination is read. Reported alongside
/// verification results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingRow {
    pub form: &'static str,
    pub query: &'static str,
}

pub const MAPPING: [MappingRow; 9] = [
    MappingRow {
        form: "AG p",
        query: "invariant p",
    },
    MappingRow {
        form: "AG p -> q",
        query: "invariant !p || q",
    },
    MappingRow {
        form: "AG p -> q, q fixes a clock value",
        query: "witness: reach p, then q",
    },
    MappingRow {
        form: "EG p -> q",
        query: "witness: reach p, then q",
    },
    MappingRow {
        form: "EF p -> q, q fixes a clock value",
        query: "witness: reach p, then q",
    },
    MappingRow {
        form: "EF p -> q",
        query: "invariant !p || q, p reachable",
    },
    MappingRow {
        form: "EF p, EG p",
        query: "reachable p",
    },
    MappingRow {
        form: "AF p",
        query: "leads-to true, p",
    },
    MappingRow {
        form: "AF p -> q",
        query: "leads-to p, q",
    },
];

struct Resolver<'a> {
    sys: &'a System,
    property: &'a str,
}

impl Resolver<'_> {
    fn unresolved(&self, name: &str) -> CompileError {
        CompileError::Unresolved {
            property: self.property.to_string(),
            name: name.to_string(),
        }
    }

    fn ill(&self, message: String) -> CompileError {
        CompileError::Ill {
            property: self.property.to_string(),
            message,
        }
    }

    fn location(&self, name: &str) -> Option<Pred> {
        let (a, l) = name.split_once('.')?;
        let (automaton, location) = self.sys.location_ref(a, l)?;
        Some(Pred::At {
            automaton,
            location,
        })
    }

    fn name(&self, name: &str) -> Result<Pred, CompileError> {
        if name.contains('.') {
            return self.location(name).ok_or_else(|| self.unresolved(name));
        }
        if let Some(var) = self.sys.var_index(name) {
            return match self.sys.vars()[var].kind {
                VarKind::Bool => Ok(Pred::Var {
                    var,
                    op: CmpOp::Ne,
                    k: 0,
                }),
                VarKind::Int => Err(self.ill(format!("integer `{name}` used as a condition"))),
            };
        }
        if self.sys.clock_index(name).is_some() {
            return Err(self.ill(format!("clock `{name}` used as a condition")));
        }
        Err(self.unresolved(name))
    }

    fn compare(&self, name: &str, op: CmpOp, value: Value) -> Result<Pred, CompileError> {
        if name.contains('.') {
            let at = self.location(name).ok_or_else(|| self.unresolved(name))?;
            return match (op, value) {
                (CmpOp::Eq, Value::Bool(b)) | (CmpOp::Ne, Value::Bool(b)) => {
                    let positive = b == (op == CmpOp::Eq);
                    Ok(if positive { at } else { Pred::negate(at) })
                }
                _ => Err(self.ill(format!("location `{name}` compared with `{op}{value}`"))),
            };
        }
        if let Some(clock) = self.sys.clock_index(name) {
            return match value {
                Value::Int(k) => Ok(Pred::Clock { clock, op, k }),
                Value::Bool(_) => Err(self.ill(format!("clock `{name}` compared with a boolean"))),
            };
        }
        let var = self
            .sys
            .var_index(name)
            .ok_or_else(|| self.unresolved(name))?;
        match (self.sys.vars()[var].kind, value) {
            (VarKind::Bool, Value::Bool(b)) if matches!(op, CmpOp::Eq | CmpOp::Ne) => {
                Ok(Pred::Var {
                    var,
                    op,
                    k: b as i64,
                })
            }
            (VarKind::Int, Value::Int(k)) => Ok(Pred::Var { var, op, k }),
            (kind, v) => Err(self.ill(format!("`{name}` ({kind}) compared with `{op}{v}`"))),
        }
    }

    fn expr(&self, e: &Expr) -> Result<Pred, CompileError> {
        Ok(match e {
            Expr::Const(b) => Pred::Const(*b),
            Expr::Name(n) => self.name(n)?,
            Expr::Compare { name, op, value } => self.compare(name, *op, *value)?,
            Expr::Not(e) => Pred::negate(self.expr(e)?),
            Expr::And(a, b) => Pred::and(self.expr(a)?, self.expr(b)?),
            Expr::Or(a, b) => Pred::or(self.expr(a)?, self.expr(b)?),
        })
    }
}

/// Whether some top-level conjunct pins a clock to a value.
pub fn fixes_clock(e: &Expr, sys: &System) -> bool {
    e.conjuncts().iter().any(|c| {
        matches!(c, Expr::Compare { name, op: CmpOp::Eq, .. } if sys.clock_index(name).is_some())
    })
}

pub fn compile_expr(e: &Expr, sys: &System) -> Result<Pred, CompileError> {
    Resolver {
        sys,
        property: "expression",
    }
    .expr(e)
}

pub fn compile_property(ast: &PropertyAst, sys: &System) -> Result<CheckableQuery, CompileError> {
    let r = Resolver {
        sys,
        property: &ast.name,
    };
    let p = r.expr(&ast.antecedent)?;
    let q = ast.consequent.as_ref().map(|c| r.expr(c)).transpose()?;
    let pinned = ast.consequent.as_ref().is_some_and(|c| fixes_clock(c, sys));
    let (kind, vacuity) = match (ast.quantifier, q) {
        (Quantifier::AG, None) => (QueryKind::Invariant(p), None),
        (Quantifier::AG, Some(q)) if pinned => (
            QueryKind::BoundedWitness {
                trigger: p,
                response: q,
            },
            None,
        ),
        (Quantifier::AG, Some(q)) => (QueryKind::Invariant(Pred::or(Pred::negate(p), q)), None),
        (Quantifier::EG, Some(q)) => (
            QueryKind::BoundedWitness {
                trigger: p,
                response: q,
            },
            None,
        ),
        (Quantifier::EF, Some(q)) if pinned => (
            QueryKind::BoundedWitness {
                trigger: p,
                response: q,
            },
            None,
        ),
        (Quantifier::EF, Some(q)) => (
            QueryKind::Invariant(Pred::or(Pred::negate(p.clone()), q)),
            Some(p),
        ),
        (Quantifier::EF | Quantifier::EG, None) => (QueryKind::Reachable(p), None),
        (Quantifier::AF, None) => (
            QueryKind::LeadsTo {
                trigger: Pred::Const(true),
                response: p,
            },
            None,
        ),
        (Quantifier::AF, Some(q)) => (
            QueryKind::LeadsTo {
                trigger: p,
                response: q,
            },
            None,
        ),
    };
    Ok(CheckableQuery {
        name: ast.name.clone(),
        kind,
        vacuity,
        facet: ast.facet,
        source: ast.to_string(),
    })
}

impl fmt::Display for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pred::Const(b) => write!(f, "{b}"),
            Pred::Var { var, op, k } => write!(f, "v{var}{op}{k}"),
            Pred::Clock { clock, op, k } => write!(f, "c{clock}{op}{k}"),
            Pred::At {
                automaton,
                location,
            } => write!(f, "@{automaton}.{location}"),
            Pred::Not(p) => write!(f, "!({p})"),
            Pred::And(ps) | Pred::Or(ps) => {
                let sep = if matches!(self, Pred::And(_)) {
                    " && "
                } else {
                    " || "
                };
                f.write_str("(")?;
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")
            }
        }
    }
}
