//! Built-in catalog of the 33 scripted activities in the collection
//! protocol.
//!
//! 29 activities belong to exactly one of the three classes; the four
//! energy-expenditure-only activities (conventionally written with a
//! trailing `*`) carry no class flag and are excluded from the
//! classification sets.

use super::types::ClassFlags;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActivityClass {
    Sedentary,
    Locomotion,
    Lifestyle,
    /// Used for MET regression only, never for classification.
    EnergyExpenditureOnly,
}

impl ActivityClass {
    pub fn flags(self) -> ClassFlags {
        match self {
            ActivityClass::Sedentary => ClassFlags {
                sedentary: true,
                ..ClassFlags::NONE
            },
            ActivityClass::Locomotion => ClassFlags {
                locomotion: true,
                ..ClassFlags::NONE
            },
            ActivityClass::Lifestyle => ClassFlags {
                lifestyle: true,
                ..ClassFlags::NONE
            },
            ActivityClass::EnergyExpenditureOnly => ClassFlags::NONE,
        }
    }
}

/// One catalog row: canonical (uppercase, unstarred) name and class.
#[derive(Clone, Copy, Debug)]
pub struct ActivityInfo {
    pub name: &'static str,
    pub class: ActivityClass,
}

use ActivityClass::{EnergyExpenditureOnly, Lifestyle, Locomotion, Sedentary};

/// The full activity catalog, in protocol listing order.
pub const CATALOG: [ActivityInfo; 33] = [
    ActivityInfo { name: "LEISURE WALK", class: Locomotion },
    ActivityInfo { name: "RAPID WALK", class: Locomotion },
    ActivityInfo { name: "LIGHT GARDENING", class: Lifestyle },
    ActivityInfo { name: "YARD WORK", class: Lifestyle },
    ActivityInfo { name: "PREPARE SERVE MEAL", class: Lifestyle },
    ActivityInfo { name: "DIGGING", class: Lifestyle },
    ActivityInfo { name: "STRAIGHTENING UP DUSTING", class: Lifestyle },
    ActivityInfo { name: "WASHING DISHES", class: Lifestyle },
    ActivityInfo { name: "UNLOADING STORING DISHES", class: Lifestyle },
    ActivityInfo { name: "WALKING AT RPE 1", class: Locomotion },
    ActivityInfo { name: "PERSONAL CARE", class: Lifestyle },
    ActivityInfo { name: "DRESSING", class: Lifestyle },
    ActivityInfo { name: "WALKING AT RPE 5", class: Locomotion },
    ActivityInfo { name: "SWEEPING", class: Lifestyle },
    ActivityInfo { name: "VACUUMING", class: Lifestyle },
    ActivityInfo { name: "STAIR DESCENT", class: Locomotion },
    ActivityInfo { name: "STAIR ASCENT", class: Locomotion },
    ActivityInfo { name: "TRASH REMOVAL", class: Lifestyle },
    ActivityInfo { name: "REPLACING SHEETS ON A BED", class: Lifestyle },
    ActivityInfo { name: "STRETCHING YOGA", class: EnergyExpenditureOnly },
    ActivityInfo { name: "MOPPING", class: Lifestyle },
    ActivityInfo { name: "LIGHT HOME MAINTENANCE", class: Lifestyle },
    ActivityInfo { name: "COMPUTER WORK", class: Sedentary },
    ActivityInfo { name: "HEAVY LIFTING", class: Lifestyle },
    ActivityInfo { name: "SHOPPING", class: Lifestyle },
    ActivityInfo { name: "IRONING", class: Lifestyle },
    ActivityInfo { name: "LAUNDRY WASHING", class: Lifestyle },
    ActivityInfo { name: "STRENGTH EXERCISE LEG CURL", class: EnergyExpenditureOnly },
    ActivityInfo { name: "STRENGTH EXERCISE CHEST PRESS", class: EnergyExpenditureOnly },
    ActivityInfo { name: "STRENGTH EXERCISE LEG EXTENSION", class: EnergyExpenditureOnly },
    ActivityInfo { name: "TV WATCHING", class: Sedentary },
    ActivityInfo { name: "STANDING STILL", class: Sedentary },
    ActivityInfo { name: "WASHING WINDOWS", class: Lifestyle },
];

/// Activities eligible for the classification tasks (one-hot rows).
pub const CLASSIFICATION_ACTIVITY_COUNT: usize = 29;

/// Canonical lookup form: trimmed, uppercased, trailing `*` (the
/// energy-expenditure-only marker) stripped.
pub fn canonical_name(raw: &str) -> String {
    let trimmed = raw.trim();
    let stripped = trimmed.strip_suffix('*').unwrap_or(trimmed).trim_end();
    stripped.to_ascii_uppercase()
}

pub fn lookup(raw: &str) -> Option<&'static ActivityInfo> {
    let canon = canonical_name(raw);
    CATALOG.iter().find(|info| info.name == canon)
}
