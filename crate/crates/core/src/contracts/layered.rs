use serde::{Deserialize, Serialize};

use super::model::GeneralizedContract;
use super::Facet;
use crate::checker::{check, Outcome, StateGraph, Verdict};
use crate::props::{compile_property, CheckableQuery, DeclKind, Declaration, Item, PropertyFile};
use crate::ta::{System, VarKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerResult {
    pub facet: Facet,
    pub priority: u8,
    /// False for layers after the stop point.
    pub checked: bool,
    pub passed: bool,
    pub verdicts: Vec<Verdict>,
    /// Referenced predicates that are documentation only.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unchecked: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerReport {
    pub layers: Vec<LayerResult>,
    pub stopped_at: Option<Facet>,
}

impl LayerReport {
    pub fn passed(&self) -> bool {
        self.stopped_at.is_none()
    }

    pub fn layer(&self, facet: Facet) -> &LayerResult {
        &self.layers[facet.priority() as usize - 1]
    }
}

/// Declared identifiers that are missing from the network or have another
/// kind there.
pub fn declaration_mismatches(sys: &System, d: &Declaration) -> Vec<String> {
    let net = sys.network();
    d.ids
        .iter()
        .filter(|id| {
            let ok = match (d.kind, id.array) {
                (DeclKind::Boolean, true) => net.has_channel(&id.name),
                (DeclKind::Boolean, false) => net
                    .find_var(&id.name)
                    .is_some_and(|v| v.kind == VarKind::Bool),
                (DeclKind::Clock, _) => net.has_clock(&id.name),
                (DeclKind::Integer, _) => net
                    .find_var(&id.name)
                    .is_some_and(|v| v.kind == VarKind::Int),
            };
            !ok
        })
        .map(|id| id.name.clone())
        .collect()
}

fn declaration_verdict(sys: &System, g: &StateGraph, d: &Declaration, facet: Facet) -> Verdict {
    let missing = declaration_mismatches(sys, d);
    Verdict {
        property: d.name.clone(),
        facet: Some(facet),
        query: "declaration".into(),
        result: if missing.is_empty() {
            Outcome::Holds
        } else {
            Outcome::Violated
        },
        states: g.len(),
        transitions: g.transitions(),
        time_ms: 0,
        note: (!missing.is_empty())
            .then(|| format!("not declared as {}: {}", d.kind, missing.join(", "))),
        trace: None,
    }
}

fn failed(name: &str, facet: Facet, g: &StateGraph, note: String) -> Verdict {
    Verdict {
        property: name.into(),
        facet: Some(facet),
        query: "unresolved".into(),
        result: Outcome::Violated,
        states: g.len(),
        transitions: g.transitions(),
        time_ms: 0,
        note: Some(note),
        trace: None,
    }
}

/// Compiled guarantees of the contract, for raising clock ceilings before
/// exploration. Names that do not compile are skipped here and reported by
/// [`layered_verify`].
pub fn contract_queries(
    c: &GeneralizedContract,
    library: &PropertyFile,
    sys: &System,
) -> Vec<CheckableQuery> {
    let mut out = Vec::new();
    for facet in Facet::ALL {
        for name in c.guarantees.names(facet) {
            if let Some(Item::Property(p)) = c.lookup(library, name) {
                if let Ok(mut q) = compile_property(p, sys) {
                    q.facet = Some(facet);
                    out.push(q);
                }
            }
        }
    }
    out
}

/// Gives every unannotated library item the facet under which `c`
/// guarantees it.
pub fn assign_facets(library: &mut PropertyFile, c: &GeneralizedContract) {
    for facet in Facet::ALL {
        for name in c.guarantees.names(facet) {
            let key = crate::props::normalize_name(name);
            for item in library.items.iter_mut().filter(|i| i.name() == key) {
                match item {
                    Item::Property(p) => p.facet = p.facet.or(Some(facet)),
                    Item::Declaration(d) => d.facet = d.facet.or(Some(facet)),
                }
            }
        }
    }
}

/// Checks the guarantees facet by facet in priority order and stops after
/// the first layer that fails. `g` must have been explored from `sys` after
/// [`crate::checker::prepare`] with [`contract_queries`].
pub fn layered_verify(
    sys: &System,
    g: &StateGraph,
    c: &GeneralizedContract,
    library: &PropertyFile,
) -> LayerReport {
    let mut layers = Vec::new();
    let mut stopped_at = None;
    for facet in Facet::ALL {
        let mut layer = LayerResult {
            facet,
            priority: facet.priority(),
            checked: stopped_at.is_none(),
            passed: false,
            verdicts: Vec::new(),
            unchecked: Vec::new(),
        };
        if stopped_at.is_some() {
            layers.push(layer);
            continue;
        }
        let mut passed = true;
        for term in c.guarantees.terms(facet) {
            let mut any = false;
            let mut checked_any = false;
            for name in term.names() {
                let v = match c.lookup(library, name) {
                    Some(Item::Declaration(d)) => declaration_verdict(sys, g, d, facet),
                    Some(Item::Property(p)) => match compile_property(p, sys) {
                        Ok(mut q) => {
                            q.facet = Some(facet);
                            check(sys, g, &q)
                        }
                        Err(e) => failed(name, facet, g, e.to_string()),
                    },
                    None if name.ends_with('*') => {
                        layer.unchecked.push(name.to_string());
                        continue;
                    }
                    None => failed(name, facet, g, "no such property".into()),
                };
                checked_any = true;
                any |= v.result.is_success();
                layer.verdicts.push(v);
            }
            if checked_any && !any {
                passed = false;
            }
        }
        layer.passed = passed;
        if !passed {
            stopped_at = Some(facet);
        }
        layers.push(layer);
    }
    LayerReport { layers, stopped_at }
}
