use std::fmt;

use serde::{Deserialize, Serialize};

use crate::contracts::Facet;
use crate::ta::{CmpOp, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantifier {
    AG,
    EG,
    EF,
    AF,
}

impl Quantifier {
    pub fn parse(word: &str) -> Option<Quantifier> {
        match word {
            "AG" | "A[]" => Some(Quantifier::AG),
            "EG" | "E[]" => Some(Quantifier::EG),
            "EF" | "E<>" => Some(Quantifier::EF),
            "AF" | "A<>" => Some(Quantifier::AF),
            _ => None,
        }
    }

    pub fn is_universal(self) -> bool {
        matches!(self, Quantifier::AG | Quantifier::AF)
    }
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantifier::AG => "AG",
            Quantifier::EG => "EG",
            Quantifier::EF => "EF",
            Quantifier::AF => "AF",
        })
    }
}

/// Boolean state expression. Names are unresolved at this stage: a dotted
/// name is a location reference, anything else a variable or clock.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expr {
    Const(bool),
    Name(String),
    Compare {
        name: String,
        op: CmpOp,
        value: Value,
    },
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn and(a: Expr, b: Expr) -> Expr {
        Expr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Expr, b: Expr) -> Expr {
        Expr::Or(Box::new(a), Box::new(b))
    }

    pub fn negate(a: Expr) -> Expr {
        Expr::Not(Box::new(a))
    }

    /// Top-level conjuncts, flattening nested `&&`.
    pub fn conjuncts(&self) -> Vec<&Expr> {
        match self {
            Expr::And(a, b) => {
                let mut v = a.conjuncts();
                v.extend(b.conjuncts());
                v
            }
            e => vec![e],
        }
    }

    /// Every name mentioned, in order of first appearance.
    pub fn names(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Const(_) => {}
            Expr::Name(n) | Expr::Compare { name: n, .. } => {
                if !out.contains(&n.as_str()) {
                    out.push(n);
                }
            }
            Expr::Not(e) => e.collect_names(out),
            Expr::And(a, b) | Expr::Or(a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Expr::Or(..) => 1,
            Expr::And(..) => 2,
            Expr::Not(_) => 3,
            _ => 4,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = self.prec() < min;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Expr::Const(b) => write!(f, "{b}")?,
            Expr::Name(n) => f.write_str(n)?,
            Expr::Compare { name, op, value } => write!(f, "{name}{op}{value}")?,
            Expr::Not(e) => {
                f.write_str("!")?;
                e.fmt_at(f, 3)?;
            }
            // Operators associate to the left.
            Expr::And(a, b) => {
                a.fmt_at(f, 2)?;
                f.write_str(" && ")?;
                b.fmt_at(f, 3)?;
            }
            Expr::Or(a, b) => {
                a.fmt_at(f, 1)?;
                f.write_str(" || ")?;
                b.fmt_at(f, 2)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyAst {
    pub name: String,
    pub quantifier: Quantifier,
    pub antecedent: Expr,
    pub consequent: Option<Expr>,
    pub facet: Option<Facet>,
    /// Written as `assert property NAME = ...`.
    pub asserted: bool,
    #[serde(skip)]
    pub line: usize,
}

impl PropertyAst {
    /// Variables and clocks mentioned, location references excluded.
    pub fn variables(&self) -> Vec<&str> {
        let mut names = self.antecedent.names();
        if let Some(c) = &self.consequent {
            for n in c.names() {
                if !names.contains(&n) {
                    names.push(n);
                }
            }
        }
        names.retain(|n| !n.contains('.'));
        names
    }
}

impl fmt::Display for PropertyAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.asserted {
            f.write_str("assert property ")?;
        }
        write!(f, "{} = {} {}", self.name, self.quantifier, self.antecedent)?;
        if let Some(c) = &self.consequent {
            write!(f, " -> {c}")?;
        }
        f.write_str(";")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DeclKind {
    Boolean,
    Clock,
    Integer,
}

impl DeclKind {
    pub fn parse(word: &str) -> Option<DeclKind> {
        match word {
            "boolean" | "bool" => Some(DeclKind::Boolean),
            "clock" => Some(DeclKind::Clock),
            "integer" | "int" => Some(DeclKind::Integer),
            _ => None,
        }
    }
}

impl fmt::Display for DeclKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeclKind::Boolean => "boolean",
            DeclKind::Clock => "clock",
            DeclKind::Integer => "integer",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeclId {
    pub name: String,
    /// Declared as `name[]`; such entries stand for channels.
    pub array: bool,
}

/// `NAME = boolean a, b[], ...;`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Declaration {
    pub name: String,
    pub kind: DeclKind,
    pub ids: Vec<DeclId>,
    pub facet: Option<Facet>,
    pub asserted: bool,
    #[serde(skip)]
    pub line: usize,
}

impl fmt::Display for Declaration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.asserted {
            f.write_str("assert property ")?;
        }
        write!(f, "{} = {} ", self.name, self.kind)?;
        for (i, id) in self.ids.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&id.name)?;
            if id.array {
                f.write_str("[]")?;
            }
        }
        f.write_str(";")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Item {
    Property(PropertyAst),
    Declaration(Declaration),
}

impl Item {
    pub fn name(&self) -> &str {
        match self {
            Item::Property(p) => &p.name,
            Item::Declaration(d) => &d.name,
        }
    }

    pub fn facet(&self) -> Option<Facet> {
        match self {
            Item::Property(p) => p.facet,
            Item::Declaration(d) => d.facet,
        }
    }

    fn line_mut(&mut self) -> &mut usize {
        match self {
            Item::Property(p) => &mut p.line,
            Item::Declaration(d) => &mut d.line,
        }
    }
}

/// A parsed property file: properties and declarations in source order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyFile {
    pub items: Vec<Item>,
}

impl PropertyFile {
    pub fn properties(&self) -> impl Iterator<Item = &PropertyAst> {
        self.items.iter().filter_map(|i| match i {
            Item::Property(p) => Some(p),
            _ => None,
        })
    }

    pub fn declarations(&self) -> impl Iterator<Item = &Declaration> {
        self.items.iter().filter_map(|i| match i {
            Item::Declaration(d) => Some(d),
            _ => None,
        })
    }

    pub fn get(&self, name: &str) -> Option<&Item> {
        let key = normalize_name(name);
        self.items.iter().find(|i| i.name() == key)
    }

    pub fn property(&self, name: &str) -> Option<&PropertyAst> {
        match self.get(name) {
            Some(Item::Property(p)) => Some(p),
            _ => None,
        }
    }

    /// Same items with source positions cleared, for structural comparison.
    pub fn without_positions(&self) -> PropertyFile {
        let mut c = self.clone();
        for i in &mut c.items {
            *i.line_mut() = 0;
        }
        c
    }
}

impl fmt::Display for PropertyFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut facet = None;
        for item in &self.items {
            if item.facet() != facet {
                facet = item.facet();
                match facet {
                    Some(fc) => writeln!(f, "/*facet: {fc}*/")?,
                    None => writeln!(f, "/*facet: none*/")?,
                }
            }
            match item {
                Item::Property(p) => writeln!(f, "{p}")?,
                Item::Declaration(d) => writeln!(f, "{d}")?,
            }
        }
        Ok(())
    }
}

/// Property names are case-insensitive; `p4.1` and `P4.1` are the same.
pub fn normalize_name(name: &str) -> String {
    name.trim().to_uppercase()
}
