//! A ProMeLa subset: parsing, translation to a timed automaton without
//! clocks, and a weak bisimulation check against hand-built automata.

mod ast;
mod bisim;
mod parse;
mod translate;

pub use ast::{PExpr, PmlDecl, PmlProcess, PmlType, Stmt, StmtKind};
pub use bisim::{edge_label, weak_bisimulation, weakly_bisimilar};
pub use parse::{parse_pml, PmlError, PmlErrorKind};
pub use translate::{translate, translate_network};

/// The pilot interface as a ProMeLa process.
pub const INTERFACE_PML: &str = include_str!("../../assets/interface.pml");
