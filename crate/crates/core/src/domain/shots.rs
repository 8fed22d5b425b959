use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::DomainError;

/// Raw shot names grouped by aggression level: 7 defensive, 4 working, 14 attacking.
pub const DEFENSIVE_SHOTS: [&str; 7] = [
    "No shot",
    "Forward Defensive",
    "Backward Defensive",
    "Fended",
    "Leave",
    "Padded",
    "Shoulders Arms",
];

pub const WORKING_SHOTS: [&str; 4] = ["Worked", "Pushed", "Steer", "Dropped"];

pub const ATTACKING_SHOTS: [&str; 14] = [
    "Drive",
    "Sweep",
    "Cut",
    "Slog-sweep",
    "Hook",
    "Upper Cut",
    "Pull",
    "Glance",
    "Reverse Sweep",
    "Flick",
    "Late Cut",
    "Slog",
    "Scoop",
    "Switch Hit",
];

/// One of the 25 raw shot names. Stored as an index into the canonical table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShotLabel(u8);

impl ShotLabel {
    pub const COUNT: usize = 25;

    pub fn all() -> impl Iterator<Item = ShotLabel> {
        (0..Self::COUNT as u8).map(ShotLabel)
    }

    /// Case- and whitespace-insensitive lookup. Hyphens are significant.
    pub fn parse(name: &str) -> Result<Self, DomainError> {
        let wanted = normalize(name);
        ShotLabel::all()
            .find(|s| normalize(s.name()) == wanted)
            .ok_or_else(|| DomainError::UnknownShotLabel(name.to_string()))
    }

    pub fn name(self) -> &'static str {
        let i = self.0 as usize;
        if i < 7 {
            DEFENSIVE_SHOTS[i]
        } else if i < 11 {
            WORKING_SHOTS[i - 7]
        } else {
            ATTACKING_SHOTS[i - 11]
        }
    }

    pub fn aggression(self) -> AggressionLabel {
        match self.0 {
            0..=6 => AggressionLabel::Defensive,
            7..=10 => AggressionLabel::Working,
            _ => AggressionLabel::Attacking,
        }
    }

    /// All labels of one aggression group, in table order.
    pub fn group(level: AggressionLabel) -> Vec<ShotLabel> {
        ShotLabel::all().filter(|s| s.aggression() == level).collect()
    }
}

fn normalize(s: &str) -> String {
    s.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

impl fmt::Display for ShotLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ShotLabel {
    type Err = DomainError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ShotLabel::parse(s)
    }
}

impl Serialize for ShotLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for ShotLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        ShotLabel::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Aggression level 0, 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum AggressionLabel {
    Defensive = 0,
    Working = 1,
    Attacking = 2,
}

impl AggressionLabel {
    pub fn level(self) -> u8 {
        self as u8
    }

    pub fn from_level(level: u8) -> Result<Self, DomainError> {
        match level {
            0 => Ok(Self::Defensive),
            1 => Ok(Self::Working),
            2 => Ok(Self::Attacking),
            other => Err(DomainError::InvalidAggression(other)),
        }
    }
}

impl From<AggressionLabel> for u8 {
    fn from(a: AggressionLabel) -> u8 {
        a.level()
    }
}

impl TryFrom<u8> for AggressionLabel {
    type Error = DomainError;
    fn try_from(v: u8) -> Result<Self, Self::Error> {
        AggressionLabel::from_level(v)
    }
}

pub fn aggression_label(shot: ShotLabel) -> AggressionLabel {
    shot.aggression()
}
