//! Generalized contracts: facet-partitioned assumptions and guarantees,
//! composition with shared-variable checks, and layered verification.

mod compose;
mod facet;
mod layered;
mod model;
mod normalize;
mod parse;

pub use compose::{
    classify, compose, consistency, facet_facts, facts_of, ComposeError, Composition,
    ConsistencyReport, Fact, Finding, VariableFinding,
};
pub use facet::Facet;
pub use layered::{
    assign_facets, contract_queries, declaration_mismatches, layered_verify, LayerReport,
    LayerResult,
};
pub use model::{GeneralizedContract, Group, Side, Term};
pub use normalize::{
    automaton_names, normalize_component, FacetAddition, NormalizeOptions, NormalizedComponent,
};
pub use parse::{parse_contract, resolve_names, ContractError};

/// Contract of the pilot interface.
pub const INTERFACE_CONTRACT: &str = include_str!("../../assets/gc_int.gc");
/// Contract of the actuator.
pub const ACTUATOR_CONTRACT: &str = include_str!("../../assets/gc_act.gc");
/// Faceted contract of the whole system.
pub const SYSTEM_CONTRACT: &str = include_str!("../../assets/lgs.gc");
