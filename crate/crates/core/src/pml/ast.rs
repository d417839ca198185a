use serde::{Deserialize, Serialize};

use crate::ta::{CmpOp, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PmlType {
    Bool,
    Int,
    Chan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PmlDecl {
    pub name: String,
    pub ty: PmlType,
    pub init: Option<Value>,
}

/// Boolean guard expression.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PExpr {
    Const(bool),
    Var(String),
    Cmp {
        var: String,
        op: CmpOp,
        value: Value,
    },
    Not(Box<PExpr>),
    And(Box<PExpr>, Box<PExpr>),
    Or(Box<PExpr>, Box<PExpr>),
}

impl PExpr {
    pub fn vars(&self, out: &mut Vec<String>) {
        match self {
            PExpr::Const(_) => {}
            PExpr::Var(v) | PExpr::Cmp { var: v, .. } => out.push(v.clone()),
            PExpr::Not(e) => e.vars(out),
            PExpr::And(a, b) | PExpr::Or(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StmtKind {
    Assign { var: String, value: Value },
    Send { chan: String },
    Receive { chan: String },
    Guard(PExpr),
    If(Vec<Vec<Stmt>>),
    Do(Vec<Vec<Stmt>>),
    Break,
    Goto(String),
    Skip,
    Else,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stmt {
    pub kind: StmtKind,
    pub label: Option<String>,
    pub line: usize,
    pub col: usize,
}

impl Stmt {
    /// Location name used when the statement starts its own control point.
    pub fn point(&self) -> String {
        self.label
            .clone()
            .unwrap_or_else(|| format!("P_{}_{}", self.line, self.col))
    }

    pub fn is_jump(&self) -> bool {
        matches!(self.kind, StmtKind::Goto(_) | StmtKind::Break)
    }
}

/// One `active proctype` with the declarations it can see.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PmlProcess {
    pub name: String,
    pub globals: Vec<PmlDecl>,
    pub locals: Vec<PmlDecl>,
    pub body: Vec<Stmt>,
    /// Position of the closing brace.
    pub end: (usize, usize),
}

impl PmlProcess {
    pub fn decl(&self, name: &str) -> Option<&PmlDecl> {
        self.locals
            .iter()
            .chain(&self.globals)
            .find(|d| d.name == name)
    }

    /// Labelled statements in source order.
    pub fn labels(&self) -> Vec<&Stmt> {
        fn walk<'a>(stmts: &'a [Stmt], out: &mut Vec<&'a Stmt>) {
            for s in stmts {
                if s.label.is_some() {
                    out.push(s);
                }
                if let StmtKind::If(bs) | StmtKind::Do(bs) = &s.kind {
                    for b in bs {
                        walk(b, out);
                    }
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.body, &mut out);
        out
    }
}
