//! Explicit-state exploration, query evaluation, traces and simulation.

mod check;
mod graph;
mod simulate;
mod trace;

pub use check::{
    backward_reach, check, check_all, evaluate, inevitable, prepare, Outcome, Verdict,
};
pub use graph::{explore, ExploreOptions, StateGraph};
pub use simulate::{move_matches, simulate, Choice, SimError};
pub use trace::{replay, ReplayError, Trace, TraceAction, TraceStep};
