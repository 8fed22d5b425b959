use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::domain::{Bounce, BowlingAngle, FieldAngle, Handedness, ShotLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MatchFormat {
    ODI,
    T20,
}

impl MatchFormat {
    pub fn overs(self) -> u32 {
        match self {
            MatchFormat::ODI => 50,
            MatchFormat::T20 => 20,
        }
    }

    pub fn max_balls(self) -> u32 {
        self.overs() * 6
    }

    /// Overs per bowler per innings.
    pub fn bowler_quota(self) -> u32 {
        match self {
            MatchFormat::ODI => 10,
            MatchFormat::T20 => 4,
        }
    }

    /// Overs `[0, n)` bowled under fielding restrictions.
    pub fn powerplay_overs(self) -> u32 {
        match self {
            MatchFormat::ODI => 10,
            MatchFormat::T20 => 6,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "ODI" => Some(MatchFormat::ODI),
            "T20" => Some(MatchFormat::T20),
            _ => None,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            MatchFormat::ODI => "ODI",
            MatchFormat::T20 => "T20",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BowlerStyle {
    Fast,
    FastMedium,
    FingerSpin,
    WristSpin,
}

impl BowlerStyle {
    pub const ALL: [BowlerStyle; 4] = [
        BowlerStyle::Fast,
        BowlerStyle::FastMedium,
        BowlerStyle::FingerSpin,
        BowlerStyle::WristSpin,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_pace(self) -> bool {
        matches!(self, BowlerStyle::Fast | BowlerStyle::FastMedium)
    }

    pub fn code(self) -> &'static str {
        match self {
            BowlerStyle::Fast => "Fast",
            BowlerStyle::FastMedium => "FastMedium",
            BowlerStyle::FingerSpin => "FingerSpin",
            BowlerStyle::WristSpin => "WristSpin",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        BowlerStyle::ALL.into_iter().find(|b| b.code() == s.trim())
    }
}

/// One ball: trajectory, participants, match state and the observed shot.
///
/// `line_offset_m`, `swing_deg` and `turn_deg` are recorded relative to the
/// striker (positive toward the striker's off side). `shot_angle_deg` is in
/// the fixed field frame and is mirrored for left-handers when mapped to a zone.
#[derive(Debug, Clone, PartialEq)]
pub struct Delivery {
    pub match_id: String,
    pub date: NaiveDate,
    pub format: MatchFormat,
    pub innings_index: u8,
    pub over_number: u32,
    pub ball_in_over: u8,
    pub batsman_id: String,
    pub non_striker_id: String,
    pub bowler_id: String,
    pub batsman_hand: Handedness,
    pub bowler_hand: Handedness,
    pub bowler_style: BowlerStyle,
    pub bowling_angle: BowlingAngle,
    pub speed_kmh: f64,
    pub line_offset_m: f64,
    pub bounce: Bounce,
    pub swing_deg: f64,
    pub turn_deg: f64,
    pub bounce_height_m: f64,
    pub release_height_m: f64,
    pub shot_label: Option<ShotLabel>,
    pub shot_angle: Option<FieldAngle>,
    pub runs: u8,
    pub wicket: bool,
    pub team_runs_before: u32,
    pub team_wickets_before: u8,
}

/// Ordering key: (date, match, innings, over, ball).
pub type DeliveryKey<'a> = (NaiveDate, &'a str, u8, u32, u8);

impl Delivery {
    pub fn sort_key(&self) -> DeliveryKey<'_> {
        (
            self.date,
            &self.match_id,
            self.innings_index,
            self.over_number,
            self.ball_in_over,
        )
    }

    /// Extras carry no shot and are kept only as sequence context.
    pub fn is_extra(&self) -> bool {
        self.shot_label.is_none()
    }

    pub fn same_innings(&self, other: &Delivery) -> bool {
        self.match_id == other.match_id && self.innings_index == other.innings_index
    }

    /// The same ball seen by a batsman of the other hand facing a bowler of the
    /// other arm. Striker-relative quantities are unchanged.
    pub fn mirrored(&self) -> Delivery {
        let mut d = self.clone();
        d.batsman_hand = self.batsman_hand.flipped();
        d.bowler_hand = self.bowler_hand.flipped();
        d.shot_angle = self.shot_angle.map(crate::domain::mirror_angle);
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    Batsman,
    Bowler,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerInfo {
    pub name: String,
    /// Batting hand, or the bowling arm for players who never batted.
    pub hand: Handedness,
    pub roles: BTreeSet<Role>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bowling_hand: Option<Handedness>,
    /// Style of the player's most recent delivery.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bowler_style: Option<BowlerStyle>,
}

/// A validated, chronologically sorted set of deliveries.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    deliveries: Vec<Delivery>,
    players: BTreeMap<String, PlayerInfo>,
}

impl Corpus {
    /// Sorts and validates; see [`crate::ingest::validate`].
    pub fn new(deliveries: Vec<Delivery>) -> Result<Self, super::IngestError> {
        super::validate::build_corpus(deliveries)
    }

    pub(crate) fn from_parts(
        deliveries: Vec<Delivery>,
        players: BTreeMap<String, PlayerInfo>,
    ) -> Self {
        Corpus {
            deliveries,
            players,
        }
    }

    pub fn deliveries(&self) -> &[Delivery] {
        &self.deliveries
    }

    pub fn players(&self) -> &BTreeMap<String, PlayerInfo> {
        &self.players
    }

    pub fn len(&self) -> usize {
        self.deliveries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deliveries.is_empty()
    }

    /// Contiguous index ranges, one per innings, in corpus order.
    pub fn innings_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..=self.deliveries.len() {
            if i == self.deliveries.len() || !self.deliveries[i].same_innings(&self.deliveries[i - 1]) {
                out.push(start..i);
                start = i;
            }
        }
        out
    }

    /// Contiguous index ranges, one per match, in corpus order.
    pub fn match_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..=self.deliveries.len() {
            if i == self.deliveries.len() || self.deliveries[i].match_id != self.deliveries[i - 1].match_id {
                out.push(start..i);
                start = i;
            }
        }
        out
    }

    /// Sub-corpus over a delivery range; players are re-derived.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Corpus {
        let deliveries = self.deliveries[range].to_vec();
        let players = super::validate::derive_players(&deliveries)
            .expect("a valid corpus has consistent players");
        Corpus::from_parts(deliveries, players)
    }
}
