//! Composition of the four components and fault injection.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::components::{
    build_actuator, build_door, build_gear, build_interface, Component, DoorPhase, GearPhase,
};
use super::names::*;
use super::timing::{TimingError, TimingTable};
use crate::ta::{CmpOp, Constraint, Guard, Network, VarDecl};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Door(DoorPhase),
    Gear(GearPhase),
}

impl Phase {
    pub fn component(self) -> Component {
        match self {
            Phase::Door(_) => Component::Door,
            Phase::Gear(_) => Component::Gear,
        }
    }

    pub fn locations(self) -> Vec<&'static str> {
        match self {
            Phase::Door(p) => p.locations().to_vec(),
            Phase::Gear(p) => vec![p.location()],
        }
    }

    fn is_transient(self) -> bool {
        match self {
            Phase::Door(p) => p.is_transient(),
            Phase::Gear(p) => p.is_transient(),
        }
    }

    fn clock(self) -> &'static str {
        match self {
            Phase::Door(_) => CK_DOOR,
            Phase::Gear(_) => CK_GEAR,
        }
    }

    fn automaton(self) -> &'static str {
        match self {
            Phase::Door(_) => DOOR,
            Phase::Gear(_) => GEAR,
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::Door(p) => write!(f, "door:{p}"),
            Phase::Gear(p) => write!(f, "gear:{p}"),
        }
    }
}

/// A component that stops making progress in `phase` once its clock reaches
/// `stall_from`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultSpec {
    pub phase: Phase,
    pub stall_from: u32,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FaultError {
    #[error("malformed fault `{0}`, expected component:Phase@time")]
    Syntax(String),
    #[error("unknown component `{0}`")]
    Component(String),
    #[error("{0}")]
    Phase(String),
    #[error("phase {0} is not a moving or locking phase")]
    NotTransient(Phase),
    #[error("stall time {stall_from} is after the last exit of {phase} ({max})")]
    TooLate {
        phase: Phase,
        stall_from: u32,
        max: u32,
    },
}

impl FromStr for FaultSpec {
    type Err = FaultError;

    fn from_str(s: &str) -> Result<Self, FaultError> {
        let syntax = || FaultError::Syntax(s.to_string());
        let (component, rest) = s.trim().split_once(':').ok_or_else(syntax)?;
        let (phase, time) = rest.split_once('@').ok_or_else(syntax)?;
        let stall_from = time.trim().parse::<u32>().map_err(|_| syntax())?;
        let phase = match component.trim() {
            "door" => Phase::Door(phase.trim().parse().map_err(FaultError::Phase)?),
            "gear" => Phase::Gear(phase.trim().parse().map_err(FaultError::Phase)?),
            other => return Err(FaultError::Component(other.to_string())),
        };
        Ok(FaultSpec { phase, stall_from })
    }
}

impl fmt::Display for FaultSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.phase, self.stall_from)
    }
}

fn exits_of<'a>(
    network: &'a Network,
    phase: Phase,
) -> impl Iterator<Item = &'a crate::ta::Edge> + 'a {
    let locs = phase.locations();
    network
        .automaton(phase.automaton())
        .into_iter()
        .flat_map(|a| a.edges.iter())
        .filter(move |e| {
            locs.contains(&e.source.as_str())
                && !locs.contains(&e.target.as_str())
                && e.target != "failed"
        })
}

impl FaultSpec {
    /// Largest clock reading at which the phase is left nominally.
    pub fn max_exit(&self, network: &Network) -> u32 {
        let clock = self.phase.clock();
        exits_of(network, self.phase)
            .flat_map(|e| e.guard.conjuncts.iter())
            .filter(|c| c.lhs == clock && c.op == CmpOp::Eq)
            .map(|c| c.rhs.as_i64() as u32)
            .max()
            .unwrap_or(0)
    }

    pub fn validate(&self, network: &Network) -> Result<(), FaultError> {
        if !self.phase.is_transient() {
            return Err(FaultError::NotTransient(self.phase));
        }
        let max = self.max_exit(network);
        if self.stall_from > max {
            return Err(FaultError::TooLate {
                phase: self.phase,
                stall_from: self.stall_from,
                max,
            });
        }
        Ok(())
    }

    /// Drop the phase's invariants and forbid leaving it from `stall_from` on.
    pub fn apply(&self, network: &mut Network) -> Result<(), FaultError> {
        self.validate(network)?;
        let locs = self.phase.locations();
        let clock = self.phase.clock();
        let a = network
            .automaton_mut(self.phase.automaton())
            .expect("component present");
        for l in a
            .locations
            .iter_mut()
            .filter(|l| locs.contains(&l.id.as_str()))
        {
            l.invariant = Guard::always();
        }
        for e in a.edges.iter_mut() {
            if locs.contains(&e.source.as_str())
                && !locs.contains(&e.target.as_str())
                && e.target != "failed"
            {
                e.guard
                    .conjuncts
                    .push(Constraint::clock(clock, CmpOp::Lt, self.stall_from as i64));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum AssemblyError {
    #[error(transparent)]
    Timing(#[from] TimingError),
    #[error(transparent)]
    Fault(#[from] FaultError),
}

/// The landing-gear network: door, gear, actuator and interface.
pub fn assemble_system(timing: &TimingTable) -> Result<Network, AssemblyError> {
    timing.validate()?;
    let mut n = Network::default();
    for c in DECLARED_CHANNELS.iter().chain(LIGHT_CHANNELS.iter()) {
        n.globals.channel(c);
    }
    n.globals
        .var(VarDecl::int(SPEED, *ENV_RANGE.start()))
        .var(VarDecl::int(HEIGHT, *ENV_RANGE.start()))
        .var(VarDecl::int("i", 0))
        .var(VarDecl::int("j", 0));
    n.automata = vec![
        build_door(timing),
        build_gear(timing),
        build_actuator(),
        build_interface(),
    ];
    Ok(n)
}

pub fn assemble_with_fault(
    timing: &TimingTable,
    fault: Option<&FaultSpec>,
) -> Result<Network, AssemblyError> {
    let mut n = assemble_system(timing)?;
    if let Some(f) = fault {
        f.apply(&mut n)?;
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ta::{validate_network, System};

    #[test]
    fn nominal_network_validates() {
        let n = assemble_system(&TimingTable::nominal()).unwrap();
        let report = validate_network(&n);
        assert!(report.is_ok(), "{report}");
        let sys = System::new(&n).unwrap();
        assert_eq!(sys.automata().len(), 4);
        assert_eq!(sys.clock_top(sys.clock_index(CK_DOOR).unwrap()), 60);
        assert_eq!(sys.clock_top(sys.clock_index(CK_GEAR).unwrap()), 29);
    }

    #[test]
    fn zero_timing_rejected() {
        assert!(matches!(
            assemble_system(&TimingTable::zero()),
            Err(AssemblyError::Timing(_))
        ));
    }

    #[test]
    fn fault_parse_round_trip() {
        let f: FaultSpec = "door:MovingHighDown@10".parse().unwrap();
        assert_eq!(f.phase, Phase::Door(DoorPhase::MovingHighDown));
        assert_eq!(f.to_string(), "door:MovingHighDown@10");
        assert!(matches!(
            "wing:Open@1".parse::<FaultSpec>(),
            Err(FaultError::Component(_))
        ));
        assert!(matches!(
            "door@1".parse::<FaultSpec>(),
            Err(FaultError::Syntax(_))
        ));
    }

    #[test]
    fn fault_validation() {
        let n = assemble_system(&TimingTable::nominal()).unwrap();
        let stable: FaultSpec = "door:Open@3".parse().unwrap();
        assert_eq!(
            stable.validate(&n),
            Err(FaultError::NotTransient(stable.phase))
        );
        let late: FaultSpec = "door:UnlockingHigh@5".parse().unwrap();
        assert!(matches!(
            late.validate(&n),
            Err(FaultError::TooLate { max: 4, .. })
        ));
        let ok: FaultSpec = "door:LockingHigh@53".parse().unwrap();
        assert_eq!(ok.max_exit(&n), 59);
        assert!(ok.validate(&n).is_ok());
    }

    #[test]
    fn fault_removes_invariant_and_blocks_exit() {
        let f: FaultSpec = "gear:MovingHighDown@10".parse().unwrap();
        let n = assemble_with_fault(&TimingTable::nominal(), Some(&f)).unwrap();
        let gear = n.automaton(GEAR).unwrap();
        assert!(gear.location("man_highdown").unwrap().invariant.is_true());
        let exit = gear
            .edges
            .iter()
            .find(|e| e.source == "man_highdown" && e.target == "extended")
            .unwrap();
        assert!(exit.guard.to_string().contains("ck_gear<10"));
    }
}
