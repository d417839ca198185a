use std::collections::BTreeMap;

use super::ast::Expr;
use super::compile::{compile_expr, CompileError, Pred};
use crate::models::names::*;
use crate::ta::{CmpOp, System, Value};

/// (number of the positive predicate, variable) for the complementary
/// pairs; the negative one is numbered one higher.
const FLAG_PAIRS: [(u8, &str); 13] = [
    (1, DOOR_OPEN),
    (3, DOOR_CLOSED),
    (5, DOOR_LOCKED),
    (7, DOOR_M_HIGHDOWN),
    (9, DOOR_M_DOWNHIGH),
    (11, FAILURE_DOOR),
    (13, FAILURE_GEAR),
    (15, GEAR_LOCKED_HIGH),
    (17, GEAR_LOCKED_DOWN),
    (19, GEAR_M_HIGHDOWN),
    (21, GEAR_M_DOWNHIGH),
    (23, FULL_GEAR_RETRACTION),
    (25, FULL_GEAR_EXTENSION),
];

pub fn star(n: u8) -> String {
    format!("P{n}*")
}

fn is(name: &str, v: bool) -> Expr {
    Expr::Compare {
        name: name.into(),
        op: CmpOp::Eq,
        value: Value::Bool(v),
    }
}

/// Source expressions of `P1*` to `P34*`.
pub fn predicate_exprs() -> BTreeMap<String, Expr> {
    let mut m = BTreeMap::new();
    for (n, var) in FLAG_PAIRS {
        m.insert(star(n), is(var, true));
        m.insert(star(n + 1), is(var, false));
    }
    for (n, light) in [(27, "none"), (28, "red"), (29, "orange"), (30, "green")] {
        m.insert(star(n), Expr::Name(format!("{INTERFACE}.{light}")));
    }
    m.insert(star(31), is(ACTUATOR_POSITION, false));
    m.insert(star(32), is(ACTUATOR_POSITION, true));
    for (n, var) in [(33, SPEED), (34, HEIGHT)] {
        let lo = Expr::Compare {
            name: var.into(),
            op: CmpOp::Ge,
            value: Value::Int(*ENV_RANGE.start()),
        };
        let hi = Expr::Compare {
            name: var.into(),
            op: CmpOp::Le,
            value: Value::Int(*ENV_RANGE.end()),
        };
        m.insert(star(n), Expr::and(lo, hi));
    }
    m
}

/// Named state predicates resolved against a network.
#[derive(Debug, Clone)]
pub struct PredicateTable {
    entries: BTreeMap<String, (Expr, Pred)>,
}

impl PredicateTable {
    pub fn get(&self, name: &str) -> Option<&Pred> {
        self.entries
            .get(&name.trim().to_uppercase())
            .map(|(_, p)| p)
    }

    pub fn expr(&self, name: &str) -> Option<&Expr> {
        self.entries
            .get(&name.trim().to_uppercase())
            .map(|(e, _)| e)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Pairs whose members are pointwise negations of each other.
    pub fn complementary_pairs() -> Vec<(String, String)> {
        FLAG_PAIRS
            .iter()
            .map(|&(n, _)| (star(n), star(n + 1)))
            .collect()
    }
}

pub fn builtin_predicates(sys: &System) -> Result<PredicateTable, CompileError> {
    let entries = predicate_exprs()
        .into_iter()
        .map(|(name, e)| compile_expr(&e, sys).map(|p| (name, (e, p))))
        .collect::<Result<_, _>>()?;
    Ok(PredicateTable { entries })
}
