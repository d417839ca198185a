use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::ast::{PExpr, PmlDecl, PmlProcess, PmlType, Stmt, StmtKind};
use crate::ta::{CmpOp, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PmlErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("unsupported construct `{0}`")]
    Unsupported(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct PmlError {
    pub line: usize,
    pub col: usize,
    pub kind: PmlErrorKind,
}

const UNSUPPORTED: &[&str] = &[
    "unless", "atomic", "d_step", "run", "timeout", "printf", "assert", "never", "inline",
    "typedef", "mtype", "byte", "short", "unsigned", "provided", "priority", "xr", "xs", "init",
    "for", "select", "c_code", "c_expr", "eval", "len", "empty", "full", "nempty", "nfull",
    "enabled", "pc_value",
];

#[derive(Debug, Clone, PartialEq, Eq)]
enum T {
    Ident(String),
    Num(i64),
    Sym(&'static str),
}

impl fmt::Display for T {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            T::Ident(s) => write!(f, "`{s}`"),
            T::Num(n) => write!(f, "`{n}`"),
            T::Sym(s) => write!(f, "`{s}`"),
        }
    }
}

const SYMBOLS: &[&str] = &[
    "::", "->", "==", "!=", "<=", ">=", "&&", "||", ":", ";", "<", ">", "=", "!", "?", "(", ")",
    "{", "}", "[", "]", ",", "_",
];

fn lex(text: &str) -> Result<Vec<(T, usize, usize)>, PmlError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let bump = |i: &mut usize, line: &mut usize, col: &mut usize| {
        let c = chars[*i];
        *i += 1;
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            bump(&mut i, &mut line, &mut col);
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        if rest == "//" {
            while i < chars.len() && chars[i] != '\n' {
                bump(&mut i, &mut line, &mut col);
            }
            continue;
        }
        if rest == "/*" {
            let (l0, c0) = (line, col);
            loop {
                if i >= chars.len() {
                    return Err(PmlError {
                        line: l0,
                        col: c0,
                        kind: PmlErrorKind::Syntax("unterminated comment".into()),
                    });
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    bump(&mut i, &mut line, &mut col);
                    bump(&mut i, &mut line, &mut col);
                    break;
                }
                bump(&mut i, &mut line, &mut col);
            }
            continue;
        }
        let (l0, c0) = (line, col);
        if c.is_ascii_alphabetic()
            || (c == '_' && chars.get(i + 1).is_some_and(|n| n.is_ascii_alphanumeric()))
        {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                s.push(chars[i]);
                bump(&mut i, &mut line, &mut col);
            }
            out.push((T::Ident(s), l0, c0));
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                s.push(chars[i]);
                bump(&mut i, &mut line, &mut col);
            }
            let n = s.parse().map_err(|_| PmlError {
                line: l0,
                col: c0,
                kind: PmlErrorKind::Syntax("number too large".into()),
            })?;
            out.push((T::Num(n), l0, c0));
            continue;
        }
        let Some(sym) = SYMBOLS
            .iter()
            .find(|s| chars[i..].iter().take(s.len()).copied().eq(s.chars()))
        else {
            return Err(PmlError {
                line,
                col,
                kind: PmlErrorKind::Syntax(format!("unexpected character `{c}`")),
            });
        };
        for _ in 0..sym.len() {
            bump(&mut i, &mut line, &mut col);
        }
        out.push((T::Sym(sym), l0, c0));
    }
    Ok(out)
}

struct P {
    toks: Vec<(T, usize, usize)>,
    pos: usize,
    end: (usize, usize),
}

type R<T> = Result<T, PmlError>;

impl P {
    fn peek(&self) -> Option<&T> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn peek_at(&self, n: usize) -> Option<&T> {
        self.toks.get(self.pos + n).map(|t| &t.0)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |t| (t.1, t.2))
    }

    fn err(&self, msg: impl Into<String>) -> PmlError {
        let (line, col) = self.here();
        PmlError {
            line,
            col,
            kind: PmlErrorKind::Syntax(msg.into()),
        }
    }

    fn unexpected(&self, wanted: &str) -> PmlError {
        if let Err(e) = self.reject_unsupported() {
            return e;
        }
        match self.peek() {
            Some(t) => self.err(format!("expected {wanted}, found {t}")),
            None => self.err(format!("expected {wanted}, found end of input")),
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(T::Sym(x)) if *x == s)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(T::Ident(x)) if x == w)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> R<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{s}`")))
        }
    }

    fn word(&mut self, w: &str) -> R<()> {
        if self.is_word(w) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{w}`")))
        }
    }

    fn ident(&mut self) -> R<String> {
        self.reject_unsupported()?;
        match self.peek().cloned() {
            Some(T::Ident(s)) => {
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn reject_unsupported(&self) -> R<()> {
        if let Some(T::Ident(w)) = self.peek() {
            if UNSUPPORTED.contains(&w.as_str()) {
                let (line, col) = self.here();
                return Err(PmlError {
                    line,
                    col,
                    kind: PmlErrorKind::Unsupported(w.clone()),
                });
            }
        }
        Ok(())
    }

    fn constant(&mut self) -> R<Value> {
        match self.peek().cloned() {
            Some(T::Num(n)) => {
                self.pos += 1;
                Ok(Value::Int(n))
            }
            Some(T::Ident(w)) if w == "true" => {
                self.pos += 1;
                Ok(Value::Bool(true))
            }
            Some(T::Ident(w)) if w == "false" => {
                self.pos += 1;
                Ok(Value::Bool(false))
            }
            Some(T::Ident(_)) => {
                let (line, col) = self.here();
                Err(PmlError {
                    line,
                    col,
                    kind: PmlErrorKind::Unsupported("non-constant expression".into()),
                })
            }
            _ => Err(self.unexpected("constant")),
        }
    }

    /// `bool a = true, b;` or `chan c = [0] of { bit };`
    fn decl(&mut self) -> R<Vec<PmlDecl>> {
        let ty = match self.peek() {
            Some(T::Ident(w)) if w == "bool" || w == "bit" => PmlType::Bool,
            Some(T::Ident(w)) if w == "int" => PmlType::Int,
            Some(T::Ident(w)) if w == "chan" => PmlType::Chan,
            _ => return Err(self.unexpected("declaration")),
        };
        self.pos += 1;
        let mut out = Vec::new();
        loop {
            let name = self.ident()?;
            let mut init = None;
            if self.eat("=") {
                if ty == PmlType::Chan {
                    self.expect("[")?;
                    match self.peek() {
                        Some(T::Num(0)) => self.pos += 1,
                        _ => {
                            let (line, col) = self.here();
                            return Err(PmlError {
                                line,
                                col,
                                kind: PmlErrorKind::Unsupported("buffered channel".into()),
                            });
                        }
                    }
                    self.expect("]")?;
                    self.word("of")?;
                    self.expect("{")?;
                    while !self.eat("}") {
                        if self.peek().is_none() {
                            return Err(self.unexpected("`}`"));
                        }
                        self.pos += 1;
                    }
                } else {
                    init = Some(self.constant()?);
                }
            }
            out.push(PmlDecl { name, ty, init });
            if !self.eat(",") {
                break;
            }
        }
        self.expect(";")?;
        Ok(out)
    }

    fn at_decl(&self) -> bool {
        ["bool", "bit", "int", "chan"]
            .iter()
            .any(|w| self.is_word(w))
    }

    fn expr(&mut self) -> R<PExpr> {
        let mut lhs = self.conj()?;
        while self.eat("||") {
            lhs = PExpr::Or(Box::new(lhs), Box::new(self.conj()?));
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> R<PExpr> {
        let mut lhs = self.unary()?;
        while self.eat("&&") {
            lhs = PExpr::And(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> R<PExpr> {
        if self.eat("!") {
            return Ok(PExpr::Not(Box::new(self.unary()?)));
        }
        if self.eat("(") {
            let e = self.expr()?;
            self.expect(")")?;
            return Ok(e);
        }
        match self.peek().cloned() {
            Some(T::Ident(w)) if w == "true" || w == "false" => {
                self.pos += 1;
                Ok(PExpr::Const(w == "true"))
            }
            Some(T::Ident(_)) => {
                let var = self.ident()?;
                let op = match self.peek() {
                    Some(T::Sym("==")) => CmpOp::Eq,
                    Some(T::Sym("!=")) => CmpOp::Ne,
                    Some(T::Sym("<")) => CmpOp::Lt,
                    Some(T::Sym("<=")) => CmpOp::Le,
                    Some(T::Sym(">")) => CmpOp::Gt,
                    Some(T::Sym(">=")) => CmpOp::Ge,
                    _ => return Ok(PExpr::Var(var)),
                };
                self.pos += 1;
                let value = self.constant()?;
                Ok(PExpr::Cmp { var, op, value })
            }
            _ => Err(self.unexpected("expression")),
        }
    }

    fn branches(&mut self, close: &str) -> R<Vec<Vec<Stmt>>> {
        let mut out = Vec::new();
        while self.eat("::") {
            let mut seq = Vec::new();
            loop {
                if self.is_sym("::") || self.is_word(close) {
                    break;
                }
                seq.push(self.stmt()?);
                if !(self.eat(";") || self.eat("->")) {
                    break;
                }
            }
            if seq.is_empty() {
                return Err(self.unexpected("statement"));
            }
            out.push(seq);
        }
        if out.is_empty() {
            return Err(self.unexpected("`::`"));
        }
        self.word(close)?;
        Ok(out)
    }

    /// Channel message argument, ignored: channels are pure synchronization.
    fn message(&mut self) -> R<()> {
        match self.peek() {
            Some(T::Sym("_")) | Some(T::Num(_)) => self.pos += 1,
            Some(T::Ident(w)) if w != "fi" && w != "od" => {
                self.ident()?;
            }
            _ => {}
        }
        if self.is_sym(",") {
            let (line, col) = self.here();
            return Err(PmlError {
                line,
                col,
                kind: PmlErrorKind::Unsupported("structured message".into()),
            });
        }
        Ok(())
    }

    fn stmt(&mut self) -> R<Stmt> {
        self.reject_unsupported()?;
        let (line, col) = self.here();
        if let (Some(T::Ident(l)), Some(T::Sym(":"))) = (self.peek().cloned(), self.peek_at(1)) {
            self.pos += 2;
            let mut s = self.stmt()?;
            if s.label.is_some() {
                return Err(PmlError {
                    line,
                    col,
                    kind: PmlErrorKind::Syntax("statement has two labels".into()),
                });
            }
            s.label = Some(l);
            s.line = line;
            s.col = col;
            return Ok(s);
        }
        let kind = match self.peek().cloned() {
            Some(T::Ident(w)) => match w.as_str() {
                "if" => {
                    self.pos += 1;
                    StmtKind::If(self.branches("fi")?)
                }
                "do" => {
                    self.pos += 1;
                    StmtKind::Do(self.branches("od")?)
                }
                "break" => {
                    self.pos += 1;
                    StmtKind::Break
                }
                "skip" => {
                    self.pos += 1;
                    StmtKind::Skip
                }
                "else" => {
                    self.pos += 1;
                    StmtKind::Else
                }
                "goto" => {
                    self.pos += 1;
                    StmtKind::Goto(self.ident()?)
                }
                "true" | "false" => StmtKind::Guard(self.expr()?),
                _ => match self.peek_at(1) {
                    Some(T::Sym("=")) => {
                        let var = self.ident()?;
                        self.pos += 1;
                        StmtKind::Assign {
                            var,
                            value: self.constant()?,
                        }
                    }
                    Some(T::Sym("!")) if !matches!(self.peek_at(2), Some(T::Sym("="))) => {
                        let chan = self.ident()?;
                        self.pos += 1;
                        self.message()?;
                        StmtKind::Send { chan }
                    }
                    Some(T::Sym("?")) => {
                        let chan = self.ident()?;
                        self.pos += 1;
                        self.message()?;
                        StmtKind::Receive { chan }
                    }
                    _ => StmtKind::Guard(self.expr()?),
                },
            },
            Some(T::Sym("(")) | Some(T::Sym("!")) => StmtKind::Guard(self.expr()?),
            _ => return Err(self.unexpected("statement")),
        };
        Ok(Stmt {
            kind,
            label: None,
            line,
            col,
        })
    }
}

fn check(p: &PmlProcess) -> R<()> {
    let mut labels = BTreeSet::new();
    for s in p.labels() {
        let l = s.label.as_ref().unwrap();
        if !labels.insert(l.clone()) {
            return Err(PmlError {
                line: s.line,
                col: s.col,
                kind: PmlErrorKind::Syntax(format!("duplicate label `{l}`")),
            });
        }
    }
    fn walk(
        p: &PmlProcess,
        labels: &BTreeSet<String>,
        stmts: &[Stmt],
        in_do: bool,
        first: bool,
    ) -> R<()> {
        let fail = |s: &Stmt, m: String| {
            Err(PmlError {
                line: s.line,
                col: s.col,
                kind: PmlErrorKind::Syntax(m),
            })
        };
        for (i, s) in stmts.iter().enumerate() {
            match &s.kind {
                StmtKind::Goto(l) if !labels.contains(l) => {
                    return fail(s, format!("no label `{l}`"))
                }
                StmtKind::Break if !in_do => return fail(s, "`break` outside a loop".into()),
                StmtKind::Else if !(first && i == 0) => {
                    return fail(s, "`else` must open a branch".into())
                }
                StmtKind::Assign { var, value } => match p.decl(var).map(|d| d.ty) {
                    Some(PmlType::Bool) if matches!(value, Value::Bool(_)) => {}
                    Some(PmlType::Int) => {}
                    Some(_) => return fail(s, format!("cannot assign {value} to `{var}`")),
                    None => return fail(s, format!("undeclared variable `{var}`")),
                },
                StmtKind::Send { chan } | StmtKind::Receive { chan } => {
                    if p.decl(chan).map(|d| d.ty) != Some(PmlType::Chan) {
                        return fail(s, format!("undeclared channel `{chan}`"));
                    }
                }
                StmtKind::Guard(e) => {
                    let mut vs = Vec::new();
                    e.vars(&mut vs);
                    for v in vs {
                        match p.decl(&v).map(|d| d.ty) {
                            Some(PmlType::Bool | PmlType::Int) => {}
                            _ => return fail(s, format!("undeclared variable `{v}`")),
                        }
                    }
                }
                StmtKind::If(bs) | StmtKind::Do(bs) => {
                    let has_else = bs.iter().any(|b| b[0].kind == StmtKind::Else);
                    for b in bs {
                        if has_else
                            && matches!(b[0].kind, StmtKind::Send { .. } | StmtKind::Receive { .. })
                        {
                            let (line, col) = (b[0].line, b[0].col);
                            return Err(PmlError {
                                line,
                                col,
                                kind: PmlErrorKind::Unsupported(
                                    "`else` beside a channel branch".into(),
                                ),
                            });
                        }
                        walk(
                            p,
                            labels,
                            b,
                            in_do || matches!(s.kind, StmtKind::Do(_)),
                            true,
                        )?;
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }
    walk(p, &labels, &p.body, false, false)
}

/// Parses a model with global declarations and one `active proctype`.
pub fn parse_pml(text: &str) -> Result<PmlProcess, PmlError> {
    let toks = lex(text)?;
    let lines = text.lines().count().max(1);
    let last_col = text.lines().last().map_or(0, |l| l.chars().count()) + 1;
    let mut p = P {
        toks,
        pos: 0,
        end: (lines, last_col),
    };
    let mut globals = Vec::new();
    let mut process: Option<PmlProcess> = None;
    while p.peek().is_some() {
        p.reject_unsupported()?;
        if p.at_decl() {
            globals.extend(p.decl()?);
            continue;
        }
        if p.is_word("proctype") {
            let (line, col) = p.here();
            return Err(PmlError {
                line,
                col,
                kind: PmlErrorKind::Unsupported("proctype without `active`".into()),
            });
        }
        let (line, col) = p.here();
        p.word("active")?;
        if p.is_sym("[") {
            let (line, col) = p.here();
            return Err(PmlError {
                line,
                col,
                kind: PmlErrorKind::Unsupported("process replication".into()),
            });
        }
        p.word("proctype")?;
        if process.is_some() {
            return Err(PmlError {
                line,
                col,
                kind: PmlErrorKind::Unsupported("second process".into()),
            });
        }
        let name = p.ident()?;
        p.expect("(")?;
        if !p.eat(")") {
            let (line, col) = p.here();
            return Err(PmlError {
                line,
                col,
                kind: PmlErrorKind::Unsupported("process parameters".into()),
            });
        }
        p.expect("{")?;
        let mut locals = Vec::new();
        let mut body = Vec::new();
        loop {
            if p.is_sym("}") {
                break;
            }
            if p.at_decl() {
                locals.extend(p.decl()?);
                continue;
            }
            body.push(p.stmt()?);
            if !(p.eat(";") || p.eat("->")) {
                break;
            }
        }
        let end = p.here();
        p.expect("}")?;
        process = Some(PmlProcess {
            name,
            globals: Vec::new(),
            locals,
            body,
            end,
        });
    }
    let mut process = process.ok_or_else(|| p.err("no `active proctype`"))?;
    process.globals = globals;
    check(&process)?;
    Ok(process)
}
