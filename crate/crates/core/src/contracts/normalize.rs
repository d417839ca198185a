use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::model::{GeneralizedContract, Group};
use super::parse::{resolve_names, ContractError};
use super::Facet;
use crate::props::{predicate_exprs, Item, PropertyFile};
use crate::ta::{Network, TimedAutomaton};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetAddition {
    pub assume: bool,
    pub facet: Facet,
    pub group: Group,
}

/// Manual facet adjustments applied while normalizing.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizeOptions {
    pub add: Vec<FacetAddition>,
    pub ignore: Vec<Facet>,
}

/// A component paired with its contract.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedComponent {
    pub automaton: TimedAutomaton,
    pub contract: GeneralizedContract,
    /// Contract names the automaton itself declares or uses.
    pub owned: Vec<String>,
    /// Contract names provided by the rest of the network.
    pub environment: Vec<String>,
    pub warnings: Vec<String>,
}

/// Every clock, variable and channel the automaton declares or mentions.
pub fn automaton_names(a: &TimedAutomaton) -> BTreeSet<String> {
    let mut out: BTreeSet<String> = BTreeSet::new();
    out.extend(a.decls.clocks.iter().cloned());
    out.extend(a.decls.vars.iter().map(|v| v.name.clone()));
    out.extend(a.decls.channels.iter().cloned());
    for l in &a.locations {
        out.extend(l.invariant.conjuncts.iter().map(|c| c.lhs.clone()));
    }
    for e in &a.edges {
        out.extend(e.guard.conjuncts.iter().map(|c| c.lhs.clone()));
        out.extend(e.sync.channel().map(str::to_string));
        out.extend(e.resets.iter().cloned());
        out.extend(e.updates.iter().map(|u| u.var.clone()));
    }
    out
}

fn mentioned(c: &GeneralizedContract, library: &PropertyFile) -> BTreeSet<String> {
    let predicates = predicate_exprs();
    let mut out = BTreeSet::new();
    for side in [&c.assumptions, &c.guarantees] {
        for facet in Facet::ALL {
            for name in side.names(facet) {
                match c
                    .lookup(library, name)
                    .or_else(|| name.strip_suffix('*').and_then(|b| c.lookup(library, b)))
                {
                    Some(Item::Property(p)) => {
                        out.extend(p.antecedent.names().into_iter().map(str::to_string));
                        if let Some(q) = &p.consequent {
                            out.extend(q.names().into_iter().map(str::to_string));
                        }
                    }
                    Some(Item::Declaration(d)) => out.extend(d.ids.iter().map(|i| i.name.clone())),
                    None => {
                        if let Some(e) = predicates.get(name) {
                            out.extend(e.names().into_iter().map(str::to_string));
                        }
                    }
                }
            }
        }
    }
    out
}

fn resolves(network: &Network, name: &str) -> Result<(), String> {
    if let Some((auto, loc)) = name.split_once('.') {
        let a = network
            .automaton(auto)
            .ok_or_else(|| format!("no automaton `{auto}`"))?;
        return a
            .location(loc)
            .map(|_| ())
            .ok_or_else(|| format!("`{auto}` has no location `{loc}`"));
    }
    if network.has_clock(name) || network.find_var(name).is_some() || network.has_channel(name) {
        Ok(())
    } else {
        Err("not declared in the network".into())
    }
}

/// Pairs an automaton of `network` with its contract, after checking that
/// every atom the contract mentions resolves in the network.
pub fn normalize_component(
    network: &Network,
    automaton: &str,
    contract: &GeneralizedContract,
    library: &PropertyFile,
    options: &NormalizeOptions,
) -> Result<NormalizedComponent, ContractError> {
    let a = network
        .automaton(automaton)
        .ok_or_else(|| ContractError::Resolution {
            contract: contract.name.clone(),
            name: automaton.into(),
            message: "no such automaton".into(),
        })?;
    let mut contract = contract.clone();
    let mut warnings = Vec::new();
    for add in &options.add {
        let side = if add.assume {
            &mut contract.assumptions
        } else {
            &mut contract.guarantees
        };
        if side.groups(add.facet).is_empty() {
            side.push(add.facet, add.group.clone());
        } else {
            let which = if add.assume {
                "assumptions"
            } else {
                "guarantees"
            };
            warnings.push(format!(
                "{} already present in {which}; addition ignored",
                add.facet
            ));
        }
    }
    for facet in &options.ignore {
        let a = contract.assumptions.0.remove(facet).is_some();
        let g = contract.guarantees.0.remove(facet).is_some();
        if !a && !g {
            warnings.push(format!("{facet} is not in the contract; nothing to ignore"));
        }
    }
    resolve_names(&contract, library)?;
    let names = mentioned(&contract, library);
    for name in &names {
        resolves(network, name).map_err(|message| ContractError::Resolution {
            contract: contract.name.clone(),
            name: name.clone(),
            message,
        })?;
    }
    let own = automaton_names(a);
    let (owned, environment): (Vec<String>, Vec<String>) = names
        .into_iter()
        .filter(|n| !n.contains('.'))
        .partition(|n| own.contains(n));
    Ok(NormalizedComponent {
        automaton: a.clone(),
        contract,
        owned,
        environment,
        warnings,
    })
}
