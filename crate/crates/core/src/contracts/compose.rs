use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::model::{GeneralizedContract, Side};
use super::parse::{resolve_names, ContractError};
use super::Facet;
use crate::props::{predicate_exprs, DeclKind, Expr, Item, PropertyFile};
use crate::ta::{CmpOp, Value};

/// What a contract side says about one variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fact {
    Literal(bool),
    Compare(CmpOp, i64),
    Declared(DeclKind),
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fact::Literal(b) => write!(f, "=={b}"),
            Fact::Compare(op, k) => write!(f, "{op}{k}"),
            Fact::Declared(k) => write!(f, ": {k}"),
        }
    }
}

fn collect_facts(e: &Expr, positive: bool, out: &mut BTreeMap<String, BTreeSet<Fact>>) {
    match e {
        Expr::Const(_) => {}
        Expr::Name(n) if n.contains('.') => {}
        Expr::Name(n) => {
            out.entry(n.clone())
                .or_default()
                .insert(Fact::Literal(positive));
        }
        Expr::Compare { name, op, value } => {
            let op = if positive { *op } else { op.negate() };
            let fact = match (op, value) {
                (CmpOp::Eq, Value::Bool(b)) => Fact::Literal(*b),
                (CmpOp::Ne, Value::Bool(b)) => Fact::Literal(!*b),
                (op, v) => Fact::Compare(op, v.as_i64()),
            };
            out.entry(name.clone()).or_default().insert(fact);
        }
        Expr::Not(a) => collect_facts(a, !positive, out),
        Expr::And(a, b) | Expr::Or(a, b) => {
            collect_facts(a, positive, out);
            collect_facts(b, positive, out);
        }
    }
}

/// Facts about every variable mentioned by the named property, declaration
/// or predicate. A starred name uses the body of its unstarred property when
/// one exists.
pub fn facts_of(
    c: &GeneralizedContract,
    library: &PropertyFile,
    name: &str,
) -> BTreeMap<String, BTreeSet<Fact>> {
    let mut out = BTreeMap::new();
    let item = c
        .lookup(library, name)
        .or_else(|| name.strip_suffix('*').and_then(|b| c.lookup(library, b)));
    match item {
        Some(Item::Property(p)) => {
            collect_facts(&p.antecedent, true, &mut out);
            if let Some(q) = &p.consequent {
                collect_facts(q, true, &mut out);
            }
        }
        Some(Item::Declaration(d)) => {
            for id in &d.ids {
                out.entry(id.name.clone())
                    .or_default()
                    .insert(Fact::Declared(d.kind));
            }
        }
        None => {
            if let Some(e) = predicate_exprs().get(name) {
                collect_facts(e, true, &mut out);
            }
        }
    }
    out
}

/// `vars(side, facet)` with the facts each property contributes.
pub fn facet_facts(
    c: &GeneralizedContract,
    side: &Side,
    library: &PropertyFile,
    facet: Facet,
) -> BTreeMap<String, BTreeSet<Fact>> {
    let mut all: BTreeMap<String, BTreeSet<Fact>> = BTreeMap::new();
    for name in side.names(facet) {
        for (v, fs) in facts_of(c, library, name) {
            all.entry(v).or_default().extend(fs);
        }
    }
    all
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Finding {
    CompatibleEqual,
    CompatibleImplied,
    Conflict,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Finding::CompatibleEqual => "compatible-equal",
            Finding::CompatibleImplied => "compatible-implied",
            Finding::Conflict => "conflict",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableFinding {
    pub variable: String,
    pub finding: Finding,
    pub left: Vec<String>,
    pub right: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub facet: Facet,
    pub shared: Vec<String>,
    pub findings: Vec<VariableFinding>,
    pub ok: bool,
}

fn numeric(f: &Fact) -> Option<(CmpOp, i64)> {
    match *f {
        Fact::Literal(b) => Some((CmpOp::Eq, b as i64)),
        Fact::Compare(op, k) => Some((op, k)),
        Fact::Declared(_) => None,
    }
}

fn satisfiable(a: (CmpOp, i64), b: (CmpOp, i64)) -> bool {
    let lo = a.1.min(b.1) - 1;
    let hi = a.1.max(b.1) + 1;
    (lo..=hi).any(|x| a.0.eval(x, a.1) && b.0.eval(x, b.1))
}

/// Compares what two sides require of one shared variable. Booleans must
/// bind the same literals; thresholds are compatible when every pair of
/// constraints is jointly satisfiable.
pub fn classify(left: &BTreeSet<Fact>, right: &BTreeSet<Fact>) -> Finding {
    let declared = |s: &BTreeSet<Fact>| s.iter().any(|f| matches!(f, Fact::Declared(_)));
    if declared(left) || declared(right) {
        return if left == right {
            Finding::CompatibleEqual
        } else {
            Finding::Conflict
        };
    }
    let pure = |s: &BTreeSet<Fact>| s.iter().all(|f| matches!(f, Fact::Literal(_)));
    if pure(left) && pure(right) {
        return if left == right {
            Finding::CompatibleEqual
        } else {
            Finding::Conflict
        };
    }
    let ok = left
        .iter()
        .filter_map(numeric)
        .all(|a| right.iter().filter_map(numeric).all(|b| satisfiable(a, b)));
    match (ok, left == right) {
        (false, _) => Finding::Conflict,
        (true, true) => Finding::CompatibleEqual,
        (true, false) => Finding::CompatibleImplied,
    }
}

/// Shared-variable check of the guarantees of one facet.
pub fn consistency(
    c1: &GeneralizedContract,
    c2: &GeneralizedContract,
    library: &PropertyFile,
    facet: Facet,
) -> ConsistencyReport {
    let f1 = facet_facts(c1, &c1.guarantees, library, facet);
    let f2 = facet_facts(c2, &c2.guarantees, library, facet);
    let mut findings = Vec::new();
    for (v, left) in &f1 {
        if let Some(right) = f2.get(v) {
            findings.push(VariableFinding {
                variable: v.clone(),
                finding: classify(left, right),
                left: left.iter().map(|f| format!("{v}{f}")).collect(),
                right: right.iter().map(|f| format!("{v}{f}")).collect(),
            });
        }
    }
    let ok = findings.iter().all(|f| f.finding != Finding::Conflict);
    ConsistencyReport {
        facet,
        shared: findings.iter().map(|f| f.variable.clone()).collect(),
        findings,
        ok,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Composition {
    pub contract: GeneralizedContract,
    pub reports: Vec<ConsistencyReport>,
}

impl Composition {
    /// Union of the shared variables over all facets.
    pub fn shared_variables(&self) -> BTreeSet<String> {
        self.reports
            .iter()
            .flat_map(|r| r.shared.iter().cloned())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComposeError {
    #[error(transparent)]
    Contract(#[from] ContractError),
    #[error("inconsistent shared variables in {}", .reports.iter().filter(|r| !r.ok).map(|r| r.facet.name()).collect::<Vec<_>>().join(", "))]
    Inconsistent { reports: Vec<ConsistencyReport> },
}

fn concat(a: &Side, b: &Side) -> Side {
    let mut out = a.clone();
    for (facet, groups) in &b.0 {
        for g in groups {
            out.push(*facet, g.clone());
        }
    }
    out
}

/// Facet-wise composition: both sides become conjunctions of the operands'
/// groups. Refused when a shared variable is constrained inconsistently.
pub fn compose(
    c1: &GeneralizedContract,
    c2: &GeneralizedContract,
    library: &PropertyFile,
) -> Result<Composition, ComposeError> {
    resolve_names(c1, library)?;
    resolve_names(c2, library)?;
    let reports: Vec<ConsistencyReport> = Facet::ALL
        .into_iter()
        .filter(|&f| !c1.guarantees.groups(f).is_empty() && !c2.guarantees.groups(f).is_empty())
        .map(|f| consistency(c1, c2, library, f))
        .collect();
    if reports.iter().any(|r| !r.ok) {
        return Err(ComposeError::Inconsistent { reports });
    }
    let mut definitions = c1.definitions.clone();
    for item in &c2.definitions.items {
        match definitions.get(item.name()) {
            Some(existing) => {
                let strip = |i: &Item| {
                    PropertyFile {
                        items: vec![i.clone()],
                    }
                    .without_positions()
                };
                if strip(existing) != strip(item) {
                    return Err(ContractError::Redefined(item.name().to_string()).into());
                }
            }
            _ => definitions.items.push(item.clone()),
        }
    }
    let name = match (c1.name.is_empty(), c2.name.is_empty()) {
        (false, false) => format!("{}_{}", c1.name, c2.name),
        (false, true) => c1.name.clone(),
        _ => c2.name.clone(),
    };
    let contract = GeneralizedContract {
        name,
        assumptions: concat(&c1.assumptions, &c2.assumptions),
        guarantees: concat(&c1.guarantees, &c2.guarantees),
        definitions,
    };
    Ok(Composition { contract, reports })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(fs: &[Fact]) -> BTreeSet<Fact> {
        fs.iter().copied().collect()
    }

    #[test]
    fn thresholds() {
        let gt = |k| Fact::Compare(CmpOp::Gt, k);
        assert_eq!(
            classify(&set(&[gt(8)]), &set(&[gt(20), gt(24)])),
            Finding::CompatibleImplied
        );
        assert_eq!(
            classify(&set(&[gt(8)]), &set(&[Fact::Compare(CmpOp::Lt, 5)])),
            Finding::Conflict
        );
        assert_eq!(
            classify(&set(&[gt(8)]), &set(&[gt(8)])),
            Finding::CompatibleEqual
        );
    }

    #[test]
    fn literals() {
        let t = Fact::Literal(true);
        let f = Fact::Literal(false);
        assert_eq!(classify(&set(&[t]), &set(&[t])), Finding::CompatibleEqual);
        assert_eq!(classify(&set(&[t]), &set(&[f])), Finding::Conflict);
    }

    #[test]
    fn negation_flips_literals() {
        let mut out = BTreeMap::new();
        let e = crate::props::parse_query("AG !door_open==false && !(ck>3)")
            .unwrap()
            .antecedent;
        collect_facts(&e, true, &mut out);
        assert_eq!(out["door_open"], set(&[Fact::Literal(true)]));
        assert_eq!(out["ck"], set(&[Fact::Compare(CmpOp::Le, 3)]));
    }
}
