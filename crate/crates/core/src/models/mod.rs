//! Landing-gear system: component automata, their composition, fault
//! injection and nominal timing.

mod assembly;
mod components;
pub mod names;
mod timeline;
mod timing;

pub use assembly::{
    assemble_system, assemble_with_fault, AssemblyError, FaultError, FaultSpec, Phase,
};
pub use components::{
    build_actuator, build_door, build_gear, build_interface, monitors, Component, DoorPhase,
    GearPhase, LightState, Monitor,
};
pub use timeline::{
    extension_schedule, milestone_timeline, observe_events, retraction_schedule, Milestone,
    Sequence,
};
pub use timing::{TimingError, TimingTable};
