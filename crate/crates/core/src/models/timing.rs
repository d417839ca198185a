use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Durations of the elementary door and gear actions, in deciseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimingTable {
    pub door_unlock_high: u32,
    pub door_high_to_down: u32,
    pub door_down_to_high: u32,
    pub door_lock_high: u32,
    pub gear_unlock_high: u32,
    pub gear_high_to_down: u32,
    pub gear_lock_down: u32,
    pub gear_unlock_down: u32,
    pub gear_down_to_high: u32,
    pub gear_lock_high: u32,
}

impl Default for TimingTable {
    fn default() -> Self {
        TimingTable::nominal()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("timing `{0}` must be positive")]
pub struct TimingError(pub &'static str);

impl TimingTable {
    /// Front gear and front door durations scaled from seconds to deciseconds.
    pub const fn nominal() -> Self {
        TimingTable {
            door_unlock_high: 4,
            door_high_to_down: 12,
            door_down_to_high: 12,
            door_lock_high: 3,
            gear_unlock_high: 8,
            gear_high_to_down: 12,
            gear_lock_down: 4,
            gear_unlock_down: 8,
            gear_down_to_high: 16,
            gear_lock_high: 4,
        }
    }

    pub const fn zero() -> Self {
        TimingTable {
            door_unlock_high: 0,
            door_high_to_down: 0,
            door_down_to_high: 0,
            door_lock_high: 0,
            gear_unlock_high: 0,
            gear_high_to_down: 0,
            gear_lock_down: 0,
            gear_unlock_down: 0,
            gear_down_to_high: 0,
            gear_lock_high: 0,
        }
    }

    pub fn validate(&self) -> Result<(), TimingError> {
        let fields = [
            ("door_unlock_high", self.door_unlock_high),
            ("door_high_to_down", self.door_high_to_down),
            ("door_down_to_high", self.door_down_to_high),
            ("door_lock_high", self.door_lock_high),
            ("gear_unlock_high", self.gear_unlock_high),
            ("gear_high_to_down", self.gear_high_to_down),
            ("gear_lock_down", self.gear_lock_down),
            ("gear_unlock_down", self.gear_unlock_down),
            ("gear_down_to_high", self.gear_down_to_high),
            ("gear_lock_high", self.gear_lock_high),
        ];
        match fields.iter().find(|(_, v)| *v == 0) {
            Some((name, _)) => Err(TimingError(name)),
            None => Ok(()),
        }
    }

    /// `ck_door` when the door latch is released.
    pub fn door_unlocked_at(&self) -> u32 {
        self.door_unlock_high
    }

    /// `ck_door` when the door is completely open (and `ck_gear` restarts).
    pub fn door_open_at(&self) -> u32 {
        self.door_unlock_high + self.door_high_to_down
    }

    /// `ck_gear` milestones of the extension: unlocked, extended, locked down.
    pub fn gear_extension(&self) -> [u32; 3] {
        let unlocked = self.gear_unlock_high;
        let extended = unlocked + self.gear_high_to_down;
        [unlocked, extended, extended + self.gear_lock_down]
    }

    /// `ck_gear` milestones of the retraction: unlocked, retracted, locked high.
    pub fn gear_retraction(&self) -> [u32; 3] {
        let unlocked = self.gear_unlock_down;
        let retracted = unlocked + self.gear_down_to_high;
        [unlocked, retracted, retracted + self.gear_lock_high]
    }

    /// `ck_door` when the door is closed and when it is locked again, given
    /// the `ck_gear` reading at which the gear reached its final lock.
    pub fn door_closing(&self, gear_locked_at: u32) -> [u32; 2] {
        let closed = self.door_open_at() + gear_locked_at + self.door_down_to_high;
        [closed, closed + self.door_lock_high]
    }

    pub fn extension_total(&self) -> u32 {
        self.door_closing(self.gear_extension()[2])[1]
    }

    pub fn retraction_total(&self) -> u32 {
        self.door_closing(self.gear_retraction()[2])[1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nominal_totals() {
        let t = TimingTable::nominal();
        assert!(t.validate().is_ok());
        assert_eq!(t.extension_total(), 55);
        assert_eq!(t.retraction_total(), 59);
    }

    #[test]
    fn zero_table_is_invalid() {
        assert_eq!(
            TimingTable::zero().validate(),
            Err(TimingError("door_unlock_high"))
        );
    }
}
