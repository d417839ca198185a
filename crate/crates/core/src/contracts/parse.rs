use std::collections::BTreeMap;

use thiserror::Error;

use super::model::{GeneralizedContract, Group, Term};
use super::Facet;
use crate::props::parser::Parser;
use crate::props::{normalize_name, Item, PropertyFile, SyntaxError, Tok};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContractError {
    #[error("{0}")]
    Syntax(#[from] SyntaxError),
    #[error("{line}:{col}: unknown facet `{name}`")]
    UnknownFacet {
        line: usize,
        col: usize,
        name: String,
    },
    #[error("duplicate property name `{0}`")]
    Duplicate(String),
    #[error("`{name}` appears in both {first} and {second} {side}")]
    Misplaced {
        name: String,
        side: &'static str,
        first: Facet,
        second: Facet,
    },
    #[error("`{name}` does not name a property, declaration or predicate")]
    Unresolved { name: String },
    #[error("contract `{contract}`: `{name}` does not resolve: {message}")]
    Resolution {
        contract: String,
        name: String,
        message: String,
    },
    #[error("conflicting definitions of `{0}`")]
    Redefined(String),
}

struct ContractParser {
    p: Parser,
    contract: GeneralizedContract,
}

impl ContractParser {
    fn define(&mut self, item: Item) -> Result<String, ContractError> {
        let mut item = item;
        match &mut item {
            Item::Property(p) => p.facet = None,
            Item::Declaration(d) => d.facet = None,
        }
        let name = item.name().to_string();
        if self.contract.definitions.get(&name).is_some() {
            return Err(ContractError::Duplicate(name));
        }
        self.contract.definitions.items.push(item);
        Ok(name)
    }

    fn facet_name(&mut self) -> Result<Facet, ContractError> {
        let (line, col) = self.p.position();
        let name = self.p.ident()?;
        name.parse()
            .map_err(|_| ContractError::UnknownFacet { line, col, name })
    }

    fn reference(&mut self) -> Result<String, ContractError> {
        Ok(normalize_name(&self.p.ident()?))
    }

    fn term(&mut self) -> Result<Term, ContractError> {
        if self.p.eat(&Tok::LParen) {
            let mut names = vec![self.reference()?];
            while self.p.eat(&Tok::OrOr) || self.p.eat(&Tok::Pipe) {
                names.push(self.reference()?);
            }
            self.p.expect(Tok::RParen)?;
            return Ok(if names.len() == 1 {
                Term::Ref(names.remove(0))
            } else {
                Term::AnyOf(names)
            });
        }
        Ok(Term::Ref(self.reference()?))
    }

    /// `facet NAME { entries }`, after the `facet` keyword.
    fn facet_block(&mut self) -> Result<(Facet, Group), ContractError> {
        let facet = self.facet_name()?;
        self.p.expect(Tok::LBrace)?;
        let mut group = Vec::new();
        loop {
            if self.p.eat(&Tok::RBrace) {
                return Ok((facet, group));
            }
            if self.p.at_item_start() {
                let item = self.p.item(Some(facet))?;
                group.push(Term::Ref(self.define(item)?));
            } else {
                group.push(self.term()?);
            }
            let _ = self.p.eat(&Tok::Amp) || self.p.eat(&Tok::AndAnd) || self.p.eat(&Tok::Semi);
        }
    }

    fn assume_block(&mut self) -> Result<(), ContractError> {
        self.p.expect(Tok::LBrace)?;
        while !self.p.eat(&Tok::RBrace) {
            if !self.p.is_word("facet") {
                return Err(self.p.unexpected("`facet` or `}`").into());
            }
            self.p.next();
            let (facet, group) = self.facet_block()?;
            self.contract.assumptions.push(facet, group);
        }
        Ok(())
    }

    fn properties_block(&mut self) -> Result<(), ContractError> {
        self.p.expect(Tok::LBrace)?;
        while !self.p.eat(&Tok::RBrace) {
            let item = self.p.item(None)?;
            self.define(item)?;
        }
        Ok(())
    }

    fn run(mut self) -> Result<GeneralizedContract, ContractError> {
        if self.p.is_word("contract") {
            self.p.next();
            self.contract.name = self.p.ident()?;
            self.p.expect(Tok::Semi)?;
        }
        // Loose items under section comments, one group per facet.
        let mut loose: BTreeMap<Facet, Group> = BTreeMap::new();
        let mut marker = None;
        loop {
            self.p.markers(&mut marker);
            if self.p.at_end() {
                break;
            }
            if self.p.at_item_start() {
                let (line, col) = self.p.position();
                let item = self.p.item(marker)?;
                let Some(facet) = marker else {
                    return Err(SyntaxError::new(
                        line,
                        col,
                        format!("`{}` is outside any facet", item.name()),
                    )
                    .into());
                };
                let name = self.define(item)?;
                loose.entry(facet).or_default().push(Term::Ref(name));
            } else if self.p.is_word("facet") {
                self.p.next();
                let (facet, group) = self.facet_block()?;
                self.contract.guarantees.push(facet, group);
            } else if self.p.is_word("assume") {
                self.p.next();
                self.assume_block()?;
            } else if self.p.is_word("properties") {
                self.p.next();
                self.properties_block()?;
            } else {
                return Err(self
                    .p
                    .unexpected("`facet`, `assume`, `properties` or a property")
                    .into());
            }
        }
        for (facet, group) in loose {
            self.contract.guarantees.push(facet, group);
        }
        check_placement(&self.contract)?;
        Ok(self.contract)
    }
}

fn check_placement(c: &GeneralizedContract) -> Result<(), ContractError> {
    for (side, label) in [
        (&c.assumptions, "assumptions"),
        (&c.guarantees, "guarantees"),
    ] {
        let mut seen: BTreeMap<&str, Facet> = BTreeMap::new();
        for facet in Facet::ALL {
            for name in side.names(facet) {
                match seen.get(name) {
                    Some(&first) if first != facet => {
                        return Err(ContractError::Misplaced {
                            name: name.into(),
                            side: label,
                            first,
                            second: facet,
                        });
                    }
                    _ => {
                        seen.insert(name, facet);
                    }
                }
            }
        }
    }
    Ok(())
}

/// Parses a contract file.
pub fn parse_contract(text: &str) -> Result<GeneralizedContract, ContractError> {
    let p = Parser::new(text)?;
    ContractParser {
        p,
        contract: GeneralizedContract::default(),
    }
    .run()
}

/// Checks that every referenced name is defined in the contract, in the
/// library, or is a starred state predicate.
pub fn resolve_names(c: &GeneralizedContract, library: &PropertyFile) -> Result<(), ContractError> {
    let predicates = crate::props::predicate_exprs();
    for side in [&c.assumptions, &c.guarantees] {
        for facet in Facet::ALL {
            for name in side.names(facet) {
                let known = c.lookup(library, name).is_some()
                    || predicates.contains_key(name)
                    || name
                        .strip_suffix('*')
                        .is_some_and(|base| c.lookup(library, base).is_some());
                if !known {
                    return Err(ContractError::Unresolved { name: name.into() });
                }
            }
        }
    }
    Ok(())
}

impl std::str::FromStr for GeneralizedContract {
    type Err = ContractError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_contract(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text() {
        let c = parse_contract("").unwrap();
        assert!(c.is_empty());
        assert!(Facet::ALL
            .iter()
            .all(|&f| c.guarantees.groups(f).is_empty()));
    }

    #[test]
    fn blocks_and_groups() {
        let c = parse_contract(
            "contract X;\nassume { facet DATA { P36 & P38 } facet SAFETY { (P7* || P9*) & P25* } }\nfacet SAFETY { P23 && P24; P25 }",
        )
        .unwrap();
        assert_eq!(c.name, "X");
        assert_eq!(c.assumptions.render(Facet::Data), "P36 & P38");
        assert_eq!(c.assumptions.render(Facet::Safety), "(P7* || P9*) & P25*");
        assert_eq!(c.guarantees.render(Facet::Safety), "P23 & P24 & P25");
    }

    #[test]
    fn inline_definitions() {
        let c = parse_contract(
            "facet SAFETY { assert property p5 = AG gear.man_highdown -> door_open==true; }",
        )
        .unwrap();
        assert_eq!(c.guarantees.render(Facet::Safety), "P5");
        assert!(c.definitions.property("P5").unwrap().asserted);
    }

    #[test]
    fn errors() {
        assert!(
            matches!(parse_contract("facet SAFTY { P1 }"), Err(ContractError::UnknownFacet { name, .. }) if name == "SAFTY")
        );
        assert!(matches!(
            parse_contract("facet SAFETY { a = AG x; }\nfacet LIVENESS { A = EF y; }"),
            Err(ContractError::Duplicate(n)) if n == "A"
        ));
        assert!(matches!(
            parse_contract("facet SAFETY { P1 }\nfacet LIVENESS { P1 }"),
            Err(ContractError::Misplaced { .. })
        ));
        assert!(parse_contract("x = AG a;").is_err());
    }

    #[test]
    fn round_trip() {
        let text = "contract C;\nassume { facet DATA { P37 } }\nfacet SAFETY { q = AG a -> b; P18 & (P1* || P2*) }\nfacet SAFETY { P19 }";
        let c = parse_contract(text).unwrap();
        let back = parse_contract(&c.to_string()).unwrap();
        assert_eq!(back.without_positions(), c.without_positions());
    }
}
