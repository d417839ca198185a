//! Discrete-time timed-automata networks: data model, validation, successor
//! semantics, the text format and DOT export.

mod dot;
mod model;
mod system;
mod text;
mod validate;

pub use dot::network_to_dot;
pub use model::{
    CmpOp, Constraint, Declarations, Edge, Guard, Location, Network, Sync, TimedAutomaton, Update,
    Value, VarDecl, VarKind,
};
pub use system::{
    Atom, ClockValue, CompiledAutomaton, CompiledEdge, CompiledLocation, Move, Snapshot, State,
    Step, SyncKind, System,
};
pub use text::{parse_guard, parse_network, print_network, TextError};
pub use validate::{validate_network, Issue, ValidationReport};
