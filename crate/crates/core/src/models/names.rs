//! Identifiers shared by the component models, properties and contracts.

pub const DOOR: &str = "door";
pub const GEAR: &str = "gear";
pub const ACTUATOR: &str = "actuator";
pub const INTERFACE: &str = "interface";

pub const CK_DOOR: &str = "ck_door";
pub const CK_GEAR: &str = "ck_gear";

pub const DOOR_LOCKED: &str = "door_locked";
pub const DOOR_OPEN: &str = "door_open";
pub const DOOR_CLOSED: &str = "door_closed";
pub const DOOR_M_HIGHDOWN: &str = "door_m_highdown";
pub const DOOR_M_DOWNHIGH: &str = "door_m_downhigh";
pub const FAILURE_DOOR: &str = "failure_door";

pub const LANDING: &str = "landing";
pub const RETRACTION: &str = "retraction";
pub const ACTUATOR_POSITION: &str = "actuator_position";

pub const FULL_GEAR_EXTENSION: &str = "full_gear_extension";
pub const FULL_GEAR_RETRACTION: &str = "full_gear_retraction";
pub const GEAR_LOCKED_HIGH: &str = "gear_locked_high";
pub const GEAR_LOCKED_DOWN: &str = "gear_locked_down";
pub const GEAR_M_HIGHDOWN: &str = "gear_m_highdown";
pub const GEAR_M_DOWNHIGH: &str = "gear_m_downhigh";
pub const FAILURE_GEAR: &str = "failure_gear";

pub const SPEED: &str = "speed";
pub const HEIGHT: &str = "height";
pub const ENV_RANGE: std::ops::RangeInclusive<i64> = 1..=4;

// Handshake channels.
pub const GEAR_EXTEND: &str = "gear_extend";
pub const GEAR_RETRACT: &str = "gear_retract";
pub const EXTEND_GEAR_NOW: &str = "extend_gear_now";
pub const RETRACT_GEAR_NOW: &str = "retract_gear_now";
pub const LOCK_HIGHGEAR: &str = "lock_highgear";
pub const UNLOCK_GEAR: &str = "unlock_gear";
pub const FAILURE: &str = "failure";
pub const FULL_EXTENDED: &str = "full_extended";
pub const FULL_RETRACTED: &str = "full_retracted";
pub const LOCK_DOWNGEAR: &str = "lock_downgear";
pub const LIGHT_ORANGE: &str = "light_orange";
pub const LIGHT_GREEN: &str = "light_green";
pub const LIGHT_NONE: &str = "light_none";

/// Channels of the declared interface, in declaration order.
pub const DECLARED_CHANNELS: [&str; 10] = [
    GEAR_EXTEND,
    GEAR_RETRACT,
    EXTEND_GEAR_NOW,
    RETRACT_GEAR_NOW,
    LOCK_HIGHGEAR,
    UNLOCK_GEAR,
    FAILURE,
    FULL_EXTENDED,
    FULL_RETRACTED,
    LOCK_DOWNGEAR,
];

pub const LIGHT_CHANNELS: [&str; 3] = [LIGHT_ORANGE, LIGHT_GREEN, LIGHT_NONE];
