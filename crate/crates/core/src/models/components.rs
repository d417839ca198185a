//! Door, gear, actuator and pilot-interface automata.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::names::*;
use super::timing::TimingTable;
use crate::ta::{CmpOp, Constraint, Edge, Location, TimedAutomaton, Update, Value, VarDecl};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DoorPhase {
    LockedClosed,
    UnlockingHigh,
    MovingHighDown,
    Open,
    MovingDownHigh,
    LockingHigh,
    Failed,
}

impl DoorPhase {
    pub const ALL: [DoorPhase; 7] = [
        DoorPhase::LockedClosed,
        DoorPhase::UnlockingHigh,
        DoorPhase::MovingHighDown,
        DoorPhase::Open,
        DoorPhase::MovingDownHigh,
        DoorPhase::LockingHigh,
        DoorPhase::Failed,
    ];

    /// Door locations realising this phase. Closing and locking depend on
    /// the sequence, because `ck_door` is never reset mid-sequence.
    pub fn locations(self) -> &'static [&'static str] {
        match self {
            DoorPhase::LockedClosed => &["locked_closed"],
            DoorPhase::UnlockingHigh => &["unlocking"],
            DoorPhase::MovingHighDown => &["opening"],
            DoorPhase::Open => &["open"],
            DoorPhase::MovingDownHigh => &["closing_ext", "closing_ret"],
            DoorPhase::LockingHigh => &["locking_ext", "locking_ret"],
            DoorPhase::Failed => &["failed"],
        }
    }

    pub fn of_location(name: &str) -> Option<DoorPhase> {
        DoorPhase::ALL
            .into_iter()
            .find(|p| p.locations().contains(&name))
    }

    pub fn is_transient(self) -> bool {
        matches!(
            self,
            DoorPhase::UnlockingHigh
                | DoorPhase::MovingHighDown
                | DoorPhase::MovingDownHigh
                | DoorPhase::LockingHigh
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GearPhase {
    LockedHigh,
    UnlockingHigh,
    MovingHighDown,
    ExtendedUnlocked,
    LockedDown,
    UnlockingDown,
    MovingDownHigh,
    RetractedUnlocked,
    Failed,
}

impl GearPhase {
    pub const ALL: [GearPhase; 9] = [
        GearPhase::LockedHigh,
        GearPhase::UnlockingHigh,
        GearPhase::MovingHighDown,
        GearPhase::ExtendedUnlocked,
        GearPhase::LockedDown,
        GearPhase::UnlockingDown,
        GearPhase::MovingDownHigh,
        GearPhase::RetractedUnlocked,
        GearPhase::Failed,
    ];

    pub fn location(self) -> &'static str {
        match self {
            GearPhase::LockedHigh => "locked_high",
            GearPhase::UnlockingHigh => "unlocking_high",
            GearPhase::MovingHighDown => "man_highdown",
            GearPhase::ExtendedUnlocked => "extended",
            GearPhase::LockedDown => "locked_down",
            GearPhase::UnlockingDown => "unlocking_down",
            GearPhase::MovingDownHigh => "man_downhigh",
            GearPhase::RetractedUnlocked => "retracted",
            GearPhase::Failed => "failed",
        }
    }

    pub fn of_location(name: &str) -> Option<GearPhase> {
        GearPhase::ALL.into_iter().find(|p| p.location() == name)
    }

    pub fn is_transient(self) -> bool {
        !matches!(
            self,
            GearPhase::LockedHigh | GearPhase::LockedDown | GearPhase::Failed
        )
    }
}

macro_rules! phase_names {
    ($ty:ty, $($variant:ident),*) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                match self { $(Self::$variant => f.write_str(stringify!($variant)),)* }
            }
        }

        impl FromStr for $ty {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                $(if s.eq_ignore_ascii_case(stringify!($variant)) { return Ok(Self::$variant); })*
                Err(format!("unknown phase `{s}`"))
            }
        }
    };
}

phase_names!(
    DoorPhase,
    LockedClosed,
    UnlockingHigh,
    MovingHighDown,
    Open,
    MovingDownHigh,
    LockingHigh,
    Failed
);
phase_names!(
    GearPhase,
    LockedHigh,
    UnlockingHigh,
    MovingHighDown,
    ExtendedUnlocked,
    LockedDown,
    UnlockingDown,
    MovingDownHigh,
    RetractedUnlocked,
    Failed
);

/// Cockpit light, derived from the door and gear state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LightState {
    None,
    Green,
    Orange,
    Red,
}

impl LightState {
    pub fn location(self) -> &'static str {
        match self {
            LightState::None => "none",
            LightState::Green => "green",
            LightState::Orange => "orange",
            LightState::Red => "red",
        }
    }

    pub fn of_location(name: &str) -> Option<LightState> {
        [
            LightState::None,
            LightState::Green,
            LightState::Orange,
            LightState::Red,
        ]
        .into_iter()
        .find(|l| l.location() == name)
    }

    /// The light the cockpit must show: red on any failure, green with the
    /// gear locked down under a locked door, none with everything locked up,
    /// orange otherwise.
    pub fn expected(
        failure: bool,
        gear_locked_down: bool,
        gear_locked_high: bool,
        door_locked: bool,
    ) -> LightState {
        if failure {
            LightState::Red
        } else if gear_locked_down && door_locked {
            LightState::Green
        } else if gear_locked_high && door_locked {
            LightState::None
        } else {
            LightState::Orange
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Component {
    Door,
    Gear,
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Component::Door => "door",
            Component::Gear => "gear",
        })
    }
}

/// A failure-detection rule: from any of `sources`, once `clock` exceeds
/// `threshold` while `conditions` hold, the component fails.
#[derive(Debug, Clone)]
pub struct Monitor {
    pub id: &'static str,
    pub component: Component,
    pub sources: &'static [&'static str],
    pub clock: &'static str,
    pub threshold: u32,
    pub conditions: Vec<Constraint>,
}

impl Monitor {
    pub fn failure_var(&self) -> &'static str {
        match self.component {
            Component::Door => FAILURE_DOOR,
            Component::Gear => FAILURE_GEAR,
        }
    }

    fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.sources.iter().map(move |src| {
            let mut e = Edge::new(*src, "failed");
            e.guard.conjuncts.extend(self.conditions.iter().cloned());
            e.guard.conjuncts.push(Constraint::clock(
                self.clock,
                CmpOp::Gt,
                self.threshold as i64,
            ));
            e.send(FAILURE).set(self.failure_var(), true)
        })
    }
}

fn is(var: &str, v: bool) -> Constraint {
    Constraint::is(var, v)
}

/// The failure monitors, with the thresholds of the failure properties.
pub fn monitors() -> Vec<Monitor> {
    let down = is(ACTUATOR_POSITION, true);
    vec![
        Monitor {
            id: "P26",
            component: Component::Door,
            sources: &["unlocking"],
            clock: CK_DOOR,
            threshold: 4,
            conditions: vec![down.clone(), is(DOOR_LOCKED, true), is(DOOR_CLOSED, true)],
        },
        Monitor {
            id: "P27",
            component: Component::Door,
            sources: &["opening"],
            clock: CK_DOOR,
            threshold: 16,
            conditions: vec![down.clone(), is(DOOR_M_HIGHDOWN, true)],
        },
        Monitor {
            id: "P28",
            component: Component::Door,
            sources: &["closing_ext", "closing_ret"],
            clock: CK_DOOR,
            threshold: 44,
            conditions: vec![down.clone(), is(DOOR_M_DOWNHIGH, true)],
        },
        Monitor {
            id: "P29",
            component: Component::Door,
            sources: &[
                "opening",
                "open",
                "closing_ext",
                "closing_ret",
                "locking_ext",
                "locking_ret",
            ],
            clock: CK_DOOR,
            threshold: 59,
            conditions: vec![is(DOOR_LOCKED, false), down],
        },
        Monitor {
            id: "P30",
            component: Component::Gear,
            sources: &["unlocking_high"],
            clock: CK_GEAR,
            threshold: 8,
            conditions: vec![
                is(LANDING, true),
                is(GEAR_LOCKED_HIGH, true),
                is(DOOR_OPEN, true),
            ],
        },
        Monitor {
            id: "P31",
            component: Component::Gear,
            sources: &["man_highdown"],
            clock: CK_GEAR,
            threshold: 20,
            conditions: vec![
                is(LANDING, true),
                is(GEAR_M_HIGHDOWN, true),
                is(DOOR_OPEN, true),
            ],
        },
        Monitor {
            id: "P32",
            component: Component::Gear,
            sources: &["unlocking_high", "man_highdown", "extended"],
            clock: CK_GEAR,
            threshold: 24,
            conditions: vec![
                is(LANDING, true),
                is(GEAR_LOCKED_DOWN, false),
                is(DOOR_OPEN, true),
            ],
        },
        // Watches the unlocking phase itself (gear still latched down); the
        // literal `gear_locked_down==false` would fire on every nominal
        // retraction as soon as the gear starts moving.
        Monitor {
            id: "P33",
            component: Component::Gear,
            sources: &["unlocking_down"],
            clock: CK_GEAR,
            threshold: 8,
            conditions: vec![
                is(RETRACTION, true),
                is(GEAR_LOCKED_DOWN, true),
                is(DOOR_OPEN, true),
            ],
        },
        Monitor {
            id: "P34",
            component: Component::Gear,
            sources: &["man_downhigh"],
            clock: CK_GEAR,
            threshold: 24,
            conditions: vec![
                is(RETRACTION, true),
                is(GEAR_M_DOWNHIGH, true),
                is(DOOR_OPEN, true),
            ],
        },
        Monitor {
            id: "P35",
            component: Component::Gear,
            sources: &["unlocking_down", "man_downhigh", "retracted"],
            clock: CK_GEAR,
            threshold: 28,
            conditions: vec![is(RETRACTION, true), is(GEAR_LOCKED_HIGH, false)],
        },
    ]
}

fn at(clock: &str, k: u32) -> Constraint {
    Constraint::clock(clock, CmpOp::Eq, k as i64)
}

/// Door: unlock, open, wait for the gear, close, lock. `ck_door` is reset by
/// the actuator and runs through the whole sequence.
pub fn build_door(t: &TimingTable) -> TimedAutomaton {
    let unlocked = t.door_unlocked_at();
    let open = t.door_open_at();
    let [closed_ext, locked_ext] = t.door_closing(t.gear_extension()[2]);
    let [closed_ret, locked_ret] = t.door_closing(t.gear_retraction()[2]);

    let mut a = TimedAutomaton::new(DOOR, "locked_closed");
    a.decls.clock(CK_DOOR);
    for (name, init) in [
        (DOOR_LOCKED, true),
        (DOOR_OPEN, false),
        (DOOR_CLOSED, true),
        (DOOR_M_HIGHDOWN, false),
        (DOOR_M_DOWNHIGH, false),
        (FAILURE_DOOR, false),
    ] {
        a.decls.var(VarDecl::boolean(name, init));
    }
    a.add_location(Location::new("locked_closed"))
        .add_location(Location::bounded("unlocking", CK_DOOR, unlocked as i64))
        .add_location(Location::bounded("opening", CK_DOOR, open as i64))
        .add_location(Location::new("open"))
        .add_location(Location::bounded("closing_ext", CK_DOOR, closed_ext as i64))
        .add_location(Location::bounded("closing_ret", CK_DOOR, closed_ret as i64))
        .add_location(Location::bounded("locking_ext", CK_DOOR, locked_ext as i64))
        .add_location(Location::bounded("locking_ret", CK_DOOR, locked_ret as i64))
        .add_location(Location::new("failed"));

    a.add_edge(Edge::new("locked_closed", "unlocking").receive(GEAR_EXTEND))
        .add_edge(Edge::new("locked_closed", "unlocking").receive(GEAR_RETRACT))
        .add_edge(
            Edge::new("unlocking", "opening")
                .when(at(CK_DOOR, unlocked))
                .send(LIGHT_ORANGE)
                .set(DOOR_LOCKED, false)
                .set(DOOR_CLOSED, false)
                .set(DOOR_M_HIGHDOWN, true),
        );
    for (mode, chan) in [(LANDING, EXTEND_GEAR_NOW), (RETRACTION, RETRACT_GEAR_NOW)] {
        a.add_edge(
            Edge::new("opening", "open")
                .when(at(CK_DOOR, open))
                .when(is(mode, true))
                .send(chan)
                .set(DOOR_M_HIGHDOWN, false)
                .set(DOOR_OPEN, true),
        );
    }
    for (chan, closing) in [
        (FULL_EXTENDED, "closing_ext"),
        (FULL_RETRACTED, "closing_ret"),
    ] {
        a.add_edge(
            Edge::new("open", closing)
                .receive(chan)
                .set(DOOR_OPEN, false)
                .set(DOOR_M_DOWNHIGH, true),
        );
    }
    for (closing, locking, closed) in [
        ("closing_ext", "locking_ext", closed_ext),
        ("closing_ret", "locking_ret", closed_ret),
    ] {
        a.add_edge(
            Edge::new(closing, locking)
                .when(at(CK_DOOR, closed))
                .set(DOOR_M_DOWNHIGH, false)
                .set(DOOR_CLOSED, true),
        );
    }
    a.add_edge(
        Edge::new("locking_ext", "locked_closed")
            .when(at(CK_DOOR, locked_ext))
            .send(LIGHT_GREEN)
            .set(DOOR_LOCKED, true),
    );
    a.add_edge(
        Edge::new("locking_ret", "locked_closed")
            .when(at(CK_DOOR, locked_ret))
            .send(LIGHT_NONE)
            .set(DOOR_LOCKED, true)
            .set(RETRACTION, false),
    );
    for m in monitors().iter().filter(|m| m.component == Component::Door) {
        for e in m.edges() {
            a.add_edge(e);
        }
    }
    a
}

/// Gear: `ck_gear` restarts when the door reports it is open.
pub fn build_gear(t: &TimingTable) -> TimedAutomaton {
    let [unlocked, extended, locked_down] = t.gear_extension();
    let [unlocked_down, retracted, locked_high] = t.gear_retraction();

    let mut a = TimedAutomaton::new(GEAR, "locked_high");
    a.decls.clock(CK_GEAR);
    for (name, init) in [
        (FULL_GEAR_EXTENSION, false),
        (FULL_GEAR_RETRACTION, true),
        (GEAR_LOCKED_HIGH, true),
        (GEAR_LOCKED_DOWN, false),
        (GEAR_M_HIGHDOWN, false),
        (GEAR_M_DOWNHIGH, false),
        (FAILURE_GEAR, false),
    ] {
        a.decls.var(VarDecl::boolean(name, init));
    }
    a.add_location(Location::new("locked_high"))
        .add_location(Location::bounded(
            "unlocking_high",
            CK_GEAR,
            unlocked as i64,
        ))
        .add_location(Location::bounded("man_highdown", CK_GEAR, extended as i64))
        .add_location(Location::bounded("extended", CK_GEAR, locked_down as i64))
        .add_location(Location::new("locked_down"))
        .add_location(Location::bounded(
            "unlocking_down",
            CK_GEAR,
            unlocked_down as i64,
        ))
        .add_location(Location::bounded("man_downhigh", CK_GEAR, retracted as i64))
        .add_location(Location::bounded("retracted", CK_GEAR, locked_high as i64))
        .add_location(Location::new("failed"));

    a.add_edge(
        Edge::new("locked_high", "unlocking_high")
            .receive(EXTEND_GEAR_NOW)
            .reset(CK_GEAR),
    )
    .add_edge(
        Edge::new("unlocking_high", "man_highdown")
            .when(at(CK_GEAR, unlocked))
            .set(GEAR_LOCKED_HIGH, false)
            .set(FULL_GEAR_RETRACTION, false)
            .set(GEAR_M_HIGHDOWN, true),
    )
    .add_edge(
        Edge::new("man_highdown", "extended")
            .when(at(CK_GEAR, extended))
            .set(GEAR_M_HIGHDOWN, false)
            .set(FULL_GEAR_EXTENSION, true),
    )
    .add_edge(
        Edge::new("extended", "locked_down")
            .when(at(CK_GEAR, locked_down))
            .send(FULL_EXTENDED)
            .set(GEAR_LOCKED_DOWN, true),
    )
    .add_edge(
        Edge::new("locked_down", "unlocking_down")
            .receive(RETRACT_GEAR_NOW)
            .reset(CK_GEAR),
    )
    .add_edge(
        Edge::new("unlocking_down", "man_downhigh")
            .when(at(CK_GEAR, unlocked_down))
            .set(GEAR_LOCKED_DOWN, false)
            .set(FULL_GEAR_EXTENSION, false)
            .set(GEAR_M_DOWNHIGH, true),
    )
    .add_edge(
        Edge::new("man_downhigh", "retracted")
            .when(at(CK_GEAR, retracted))
            .set(GEAR_M_DOWNHIGH, false)
            .set(FULL_GEAR_RETRACTION, true),
    )
    .add_edge(
        Edge::new("retracted", "locked_high")
            .when(at(CK_GEAR, locked_high))
            .send(FULL_RETRACTED)
            .set(GEAR_LOCKED_HIGH, true),
    );
    for m in monitors().iter().filter(|m| m.component == Component::Gear) {
        for e in m.edges() {
            a.add_edge(e);
        }
    }
    a
}

/// Up/down lever. Pushing it restarts `ck_door`; it can only be moved once
/// the previous sequence has ended with the door locked. Environment inputs
/// (speed, height) change freely on self-loops.
pub fn build_actuator() -> TimedAutomaton {
    let mut a = TimedAutomaton::new(ACTUATOR, "up");
    for name in [LANDING, RETRACTION, ACTUATOR_POSITION] {
        a.decls.var(VarDecl::boolean(name, false));
    }
    a.add_location(Location::new("up"))
        .add_location(Location::new("down"));
    a.add_edge(
        Edge::new("up", "down")
            .when(is(GEAR_LOCKED_HIGH, true))
            .when(is(DOOR_LOCKED, true))
            .send(GEAR_EXTEND)
            .reset(CK_DOOR)
            .set(ACTUATOR_POSITION, true)
            .set(LANDING, true),
    );
    a.add_edge(
        Edge::new("down", "up")
            .when(is(GEAR_LOCKED_DOWN, true))
            .when(is(DOOR_LOCKED, true))
            .send(GEAR_RETRACT)
            .reset(CK_DOOR)
            .set(ACTUATOR_POSITION, false)
            .set(LANDING, false)
            .set(RETRACTION, true),
    );
    for loc in ["up", "down"] {
        for var in [SPEED, HEIGHT] {
            for v in ENV_RANGE {
                a.add_edge(Edge::new(loc, loc).assign(Update::new(var, Value::Int(v))));
            }
        }
    }
    a
}

/// Cockpit lights, driven by the door's lock/unlock events and failures.
pub fn build_interface() -> TimedAutomaton {
    let mut a = TimedAutomaton::new(INTERFACE, "none");
    for l in ["none", "green", "orange", "red"] {
        a.add_location(Location::new(l));
    }
    a.add_edge(Edge::new("none", "orange").receive(LIGHT_ORANGE))
        .add_edge(Edge::new("none", "red").receive(FAILURE))
        .add_edge(Edge::new("orange", "green").receive(LIGHT_GREEN))
        .add_edge(Edge::new("orange", "none").receive(LIGHT_NONE))
        .add_edge(Edge::new("orange", "red").receive(FAILURE))
        .add_edge(Edge::new("green", "orange").receive(LIGHT_ORANGE))
        .add_edge(Edge::new("green", "red").receive(FAILURE));
    for chan in [FAILURE, LIGHT_ORANGE, LIGHT_GREEN, LIGHT_NONE] {
        a.add_edge(Edge::new("red", "red").receive(chan));
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn door_phases_cover_every_location() {
        let door = build_door(&TimingTable::nominal());
        for l in &door.locations {
            assert!(DoorPhase::of_location(&l.id).is_some(), "{}", l.id);
        }
        let gear = build_gear(&TimingTable::nominal());
        for l in &gear.locations {
            assert!(GearPhase::of_location(&l.id).is_some(), "{}", l.id);
        }
    }

    #[test]
    fn door_invariants_follow_cumulative_milestones() {
        let door = build_door(&TimingTable::nominal());
        let bound = |id: &str| door.location(id).unwrap().invariant.conjuncts[0].rhs;
        assert_eq!(bound("unlocking"), Value::Int(4));
        assert_eq!(bound("opening"), Value::Int(16));
        assert_eq!(bound("closing_ext"), Value::Int(52));
        assert_eq!(bound("locking_ext"), Value::Int(55));
        assert_eq!(bound("closing_ret"), Value::Int(56));
        assert_eq!(bound("locking_ret"), Value::Int(59));
    }

    #[test]
    fn phase_names_parse() {
        assert_eq!(
            "MovingHighDown".parse::<DoorPhase>(),
            Ok(DoorPhase::MovingHighDown)
        );
        assert_eq!(
            "retractedunlocked".parse::<GearPhase>(),
            Ok(GearPhase::RetractedUnlocked)
        );
        assert!("Hovering".parse::<GearPhase>().is_err());
    }

    #[test]
    fn light_rules() {
        assert_eq!(
            LightState::expected(false, true, false, true),
            LightState::Green
        );
        assert_eq!(
            LightState::expected(false, false, true, true),
            LightState::None
        );
        assert_eq!(
            LightState::expected(false, false, false, false),
            LightState::Orange
        );
        assert_eq!(
            LightState::expected(true, true, false, true),
            LightState::Red
        );
    }

    #[test]
    fn monitor_ids_cover_failure_properties() {
        let ids: Vec<&str> = monitors().iter().map(|m| m.id).collect();
        assert_eq!(
            ids,
            ["P26", "P27", "P28", "P29", "P30", "P31", "P32", "P33", "P34", "P35"]
        );
    }
}
