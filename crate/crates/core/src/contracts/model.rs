use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::Facet;
use crate::props::{Item, PropertyFile};

/// One conjunct of a facet entry: a property reference or a disjunction of
/// references.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Term {
    Ref(String),
    AnyOf(Vec<String>),
}

impl Term {
    pub fn names(&self) -> &[String] {
        match self {
            Term::Ref(n) => std::slice::from_ref(n),
            Term::AnyOf(ns) => ns,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Ref(n) => f.write_str(n),
            Term::AnyOf(ns) => write!(f, "({})", ns.join(" || ")),
        }
    }
}

/// Conjunction of terms contributed by one contract.
pub type Group = Vec<Term>;

/// Facet-partitioned conjunction of groups.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Side(pub BTreeMap<Facet, Vec<Group>>);

impl Side {
    pub fn groups(&self, facet: Facet) -> &[Group] {
        self.0.get(&facet).map_or(&[], Vec::as_slice)
    }

    pub fn terms(&self, facet: Facet) -> impl Iterator<Item = &Term> {
        self.groups(facet).iter().flatten()
    }

    /// Every name referenced in the facet, alternatives included.
    pub fn names(&self, facet: Facet) -> impl Iterator<Item = &str> {
        self.terms(facet)
            .flat_map(|t| t.names())
            .map(String::as_str)
    }

    pub fn facets(&self) -> impl Iterator<Item = Facet> + '_ {
        self.0
            .iter()
            .filter(|(_, g)| g.iter().any(|g| !g.is_empty()))
            .map(|(f, _)| *f)
    }

    pub fn push(&mut self, facet: Facet, group: Group) {
        if !group.is_empty() {
            self.0.entry(facet).or_default().push(group);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.facets().next().is_none()
    }

    /// `(A & B) ∧ (C)` for several groups, `A & B` for one.
    pub fn render(&self, facet: Facet) -> String {
        let groups = self.groups(facet);
        let one = |g: &Group| {
            g.iter()
                .map(Term::to_string)
                .collect::<Vec<_>>()
                .join(" & ")
        };
        match groups {
            [] => String::new(),
            [g] => one(g),
            gs => gs
                .iter()
                .map(|g| format!("({})", one(g)))
                .collect::<Vec<_>>()
                .join(" ∧ "),
        }
    }
}

/// Assumptions and guarantees partitioned by facet, with the bodies of
/// properties defined inside the contract.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralizedContract {
    pub name: String,
    pub assumptions: Side,
    pub guarantees: Side,
    #[serde(default)]
    pub definitions: PropertyFile,
}

impl GeneralizedContract {
    pub fn named(name: impl Into<String>) -> Self {
        GeneralizedContract {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn side(&self, assume: bool) -> &Side {
        if assume {
            &self.assumptions
        } else {
            &self.guarantees
        }
    }

    /// Items visible to this contract: its own definitions first, then the
    /// library.
    pub fn lookup<'a>(&'a self, library: &'a PropertyFile, name: &str) -> Option<&'a Item> {
        self.definitions.get(name).or_else(|| library.get(name))
    }

    pub fn is_empty(&self) -> bool {
        self.assumptions.is_empty()
            && self.guarantees.is_empty()
            && self.definitions.items.is_empty()
    }

    /// Same contract with definition source positions cleared.
    pub fn without_positions(&self) -> GeneralizedContract {
        GeneralizedContract {
            definitions: self.definitions.without_positions(),
            ..self.clone()
        }
    }
}

fn write_side(f: &mut fmt::Formatter<'_>, side: &Side, indent: &str) -> fmt::Result {
    for (facet, groups) in &side.0 {
        for g in groups {
            let body = g
                .iter()
                .map(Term::to_string)
                .collect::<Vec<_>>()
                .join(" & ");
            writeln!(f, "{indent}facet {facet} {{ {body} }}")?;
        }
    }
    Ok(())
}

impl fmt::Display for GeneralizedContract {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.name.is_empty() {
            writeln!(f, "contract {};", self.name)?;
        }
        if !self.definitions.items.is_empty() {
            writeln!(f, "properties {{")?;
            for item in &self.definitions.items {
                match item {
                    Item::Property(p) => {
                        let mut p = p.clone();
                        p.facet = None;
                        writeln!(f, "  {p}")?;
                    }
                    Item::Declaration(d) => {
                        let mut d = d.clone();
                        d.facet = None;
                        writeln!(f, "  {d}")?;
                    }
                }
            }
            writeln!(f, "}}")?;
        }
        if !self.assumptions.is_empty() {
            writeln!(f, "assume {{")?;
            write_side(f, &self.assumptions, "  ")?;
            writeln!(f, "}}")?;
        }
        write_side(f, &self.guarantees, "")
    }
}
