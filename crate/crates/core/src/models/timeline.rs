//! Expected milestone timing of the nominal sequences and its observation
//! on simulated runs.

use serde::{Deserialize, Serialize};

use super::names::*;
use super::timing::TimingTable;
use crate::checker::Choice;
use crate::ta::{Snapshot, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sequence {
    Extension,
    Retraction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Milestone {
    pub event: &'static str,
    pub ck_door: u32,
    /// `None` before the gear clock restarts in this sequence.
    pub ck_gear: Option<u32>,
}

fn m(event: &'static str, ck_door: u32, ck_gear: Option<u32>) -> Milestone {
    Milestone {
        event,
        ck_door,
        ck_gear,
    }
}

pub fn milestone_timeline(t: &TimingTable, seq: Sequence) -> Vec<Milestone> {
    let unlocked = t.door_unlocked_at();
    let open = t.door_open_at();
    let (gear, names) = match seq {
        Sequence::Extension => (
            t.gear_extension(),
            ["gear_unlocked", "extended", "locked_down"],
        ),
        Sequence::Retraction => (
            t.gear_retraction(),
            ["gear_unlocked", "retracted", "locked_high"],
        ),
    };
    let [closed, locked] = t.door_closing(gear[2]);
    let mut out = vec![m("unlocked", unlocked, None), m("open", open, Some(0))];
    for (name, g) in names.into_iter().zip(gear) {
        out.push(m(name, open + g, Some(g)));
    }
    out.push(m("closed", closed, None));
    out.push(m("locked", locked, None));
    out
}

fn flag(s: &Snapshot, var: &str) -> bool {
    matches!(s.vars.get(var), Some(Value::Bool(true)))
}

/// Milestones seen along consecutive snapshots, stamped with the clock
/// readings of the snapshot in which the change first shows.
pub fn observe_events(seq: Sequence, snapshots: &[Snapshot]) -> Vec<Milestone> {
    let (unlatched, moved, relatched) = match seq {
        Sequence::Extension => (GEAR_LOCKED_HIGH, FULL_GEAR_EXTENSION, GEAR_LOCKED_DOWN),
        Sequence::Retraction => (GEAR_LOCKED_DOWN, FULL_GEAR_RETRACTION, GEAR_LOCKED_HIGH),
    };
    let (moved_name, relatched_name) = match seq {
        Sequence::Extension => ("extended", "locked_down"),
        Sequence::Retraction => ("retracted", "locked_high"),
    };
    // (event, variable, value it changes to, whether ck_gear is reported)
    let watch = [
        ("unlocked", DOOR_LOCKED, false, false),
        ("open", DOOR_OPEN, true, true),
        ("gear_unlocked", unlatched, false, true),
        (moved_name, moved, true, true),
        (relatched_name, relatched, true, true),
        ("closed", DOOR_CLOSED, true, false),
        ("locked", DOOR_LOCKED, true, false),
    ];
    let mut out = Vec::new();
    for w in snapshots.windows(2) {
        let (before, after) = (&w[0], &w[1]);
        for (event, var, to, with_gear) in watch {
            if flag(before, var) != to && flag(after, var) == to {
                let ck = |c: &str| after.clocks.get(c).copied().unwrap_or(0);
                out.push(m(event, ck(CK_DOOR), with_gear.then(|| ck(CK_GEAR))));
            }
        }
    }
    out
}

fn delay(out: &mut Vec<Choice>, d: u32) {
    if d > 0 {
        out.push(Choice::Delay(d));
    }
}

fn take(out: &mut Vec<Choice>, pattern: &str) {
    out.push(Choice::Take(pattern.to_string()));
}

/// Lever down from the initial state, then every nominal action on time.
pub fn extension_schedule(t: &TimingTable) -> Vec<Choice> {
    let mut s = Vec::new();
    take(&mut s, GEAR_EXTEND);
    delay(&mut s, t.door_unlock_high);
    take(&mut s, "door.unlocking->opening");
    delay(&mut s, t.door_high_to_down);
    take(&mut s, EXTEND_GEAR_NOW);
    delay(&mut s, t.gear_unlock_high);
    take(&mut s, "gear.unlocking_high->man_highdown");
    delay(&mut s, t.gear_high_to_down);
    take(&mut s, "gear.man_highdown->extended");
    delay(&mut s, t.gear_lock_down);
    take(&mut s, FULL_EXTENDED);
    delay(&mut s, t.door_down_to_high);
    take(&mut s, "door.closing_ext->locking_ext");
    delay(&mut s, t.door_lock_high);
    take(&mut s, "door.locking_ext->locked_closed");
    s
}

/// Lever up once the extension has completed.
pub fn retraction_schedule(t: &TimingTable) -> Vec<Choice> {
    let mut s = Vec::new();
    take(&mut s, GEAR_RETRACT);
    delay(&mut s, t.door_unlock_high);
    take(&mut s, "door.unlocking->opening");
    delay(&mut s, t.door_high_to_down);
    take(&mut s, RETRACT_GEAR_NOW);
    delay(&mut s, t.gear_unlock_down);
    take(&mut s, "gear.unlocking_down->man_downhigh");
    delay(&mut s, t.gear_down_to_high);
    take(&mut s, "gear.man_downhigh->retracted");
    delay(&mut s, t.gear_lock_high);
    take(&mut s, FULL_RETRACTED);
    delay(&mut s, t.door_down_to_high);
    take(&mut s, "door.closing_ret->locking_ret");
    delay(&mut s, t.door_lock_high);
    take(&mut s, "door.locking_ret->locked_closed");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nominal_extension_timeline() {
        let got: Vec<(&str, u32, Option<u32>)> =
            milestone_timeline(&TimingTable::nominal(), Sequence::Extension)
                .into_iter()
                .map(|m| (m.event, m.ck_door, m.ck_gear))
                .collect();
        assert_eq!(
            got,
            [
                ("unlocked", 4, None),
                ("open", 16, Some(0)),
                ("gear_unlocked", 24, Some(8)),
                ("extended", 36, Some(20)),
                ("locked_down", 40, Some(24)),
                ("closed", 52, None),
                ("locked", 55, None),
            ]
        );
    }

    #[test]
    fn nominal_retraction_timeline() {
        let last = milestone_timeline(&TimingTable::nominal(), Sequence::Retraction);
        assert_eq!(last[4], m("locked_high", 44, Some(28)));
        assert_eq!(last[6], m("locked", 59, None));
    }

    #[test]
    fn zero_table_collapses() {
        for seq in [Sequence::Extension, Sequence::Retraction] {
            assert!(milestone_timeline(&TimingTable::zero(), seq)
                .iter()
                .all(|m| m.ck_door == 0 && m.ck_gear.unwrap_or(0) == 0));
        }
        assert!(extension_schedule(&TimingTable::zero())
            .iter()
            .all(|c| matches!(c, Choice::Take(_))));
    }
}
