//! Rolling per-player statistics over each player's most recent involvements.
//!
//! Sums are maintained incrementally as records enter and leave the window;
//! every statistic is a ratio of those sums, so a profile can always be
//! rebuilt from its window contents alone.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::FeatureError;
use crate::domain::{AggressionLabel, CoarseLength, Sector};
use crate::ingest::{target_of, Delivery};

pub const WINDOW: usize = 500;
pub const BATTING_STATS: usize = 28;
pub const BOWLING_STATS: usize = 18;

/// One ball a batsman played a shot to, in canonical coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BattingRecord {
    pub length: CoarseLength,
    pub aggression: AggressionLabel,
    /// Direction sector for non-defensive shots.
    pub sector: Option<Sector>,
    pub runs: u8,
    pub wicket: bool,
    pub vs_pace: bool,
}

/// One ball a bowler delivered.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BowlingRecord {
    pub length: CoarseLength,
    pub runs: u8,
    pub wicket: bool,
    pub line_offset_m: f64,
    /// Full tosses count as 0 m.
    pub bounce_distance_m: f64,
}

impl BattingRecord {
    /// `None` for extras and for shots whose zone cannot be determined.
    pub fn from_delivery(d: &Delivery) -> Option<Self> {
        let zone = target_of(d).ok()?;
        Some(BattingRecord {
            length: CoarseLength::of(d.bounce).ok()?,
            aggression: d.shot_label?.aggression(),
            sector: zone.sector(),
            runs: d.runs,
            wicket: d.wicket,
            vs_pace: d.bowler_style.is_pace(),
        })
    }
}

impl BowlingRecord {
    pub fn from_delivery(d: &Delivery) -> Option<Self> {
        Some(BowlingRecord {
            length: CoarseLength::of(d.bounce).ok()?,
            runs: d.runs,
            wicket: d.wicket,
            line_offset_m: d.line_offset_m,
            bounce_distance_m: d.bounce.distance().unwrap_or(0.0),
        })
    }
}

/// A record type with additive window sums and statistics derived from them.
pub trait ProfileRecord: Copy {
    type Sums: Default + Clone + std::fmt::Debug;
    const STATS: usize;
    fn add_to(&self, sums: &mut Self::Sums, sign: f64);
    /// Personal statistics; `None` where the window has no data for a ratio.
    fn stats(sums: &Self::Sums) -> Vec<Option<f64>>;
    fn names() -> Vec<String>;
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > 0.0).then(|| num / den)
}

#[derive(Debug, Clone, Default)]
pub struct BattingSums {
    /// Per coarse length: balls, attacking shots, runs, dismissals.
    band: [[f64; 4]; 4],
    sectors: [f64; 9],
    hits: f64,
    balls: f64,
    runs: f64,
    attacking: f64,
    defensive: f64,
    boundaries: f64,
    dots: f64,
    pace: [f64; 2],
    spin: [f64; 2],
}

impl ProfileRecord for BattingRecord {
    type Sums = BattingSums;
    const STATS: usize = BATTING_STATS;

    fn add_to(&self, s: &mut BattingSums, sign: f64) {
        let attack = if self.aggression == AggressionLabel::Attacking { 1.0 } else { 0.0 };
        let runs = self.runs as f64;
        let b = &mut s.band[self.length.index()];
        b[0] += sign;
        b[1] += sign * attack;
        b[2] += sign * runs;
        b[3] += sign * if self.wicket { 1.0 } else { 0.0 };
        if let Some(sector) = self.sector {
            s.sectors[sector.index()] += sign;
            s.hits += sign;
        }
        s.balls += sign;
        s.runs += sign * runs;
        s.attacking += sign * attack;
        if self.aggression == AggressionLabel::Defensive {
            s.defensive += sign;
        }
        if self.runs == 4 || self.runs == 6 {
            s.boundaries += sign;
        }
        if self.runs == 0 {
            s.dots += sign;
        }
        let split = if self.vs_pace { &mut s.pace } else { &mut s.spin };
        split[0] += sign;
        split[1] += sign * attack;
    }

    fn stats(s: &BattingSums) -> Vec<Option<f64>> {
        let mut out = Vec::with_capacity(BATTING_STATS);
        for b in &s.band {
            out.push(ratio(b[1], b[0]));
            out.push(ratio(b[2], b[0]));
            out.push(ratio(b[3], b[0]));
        }
        for c in s.sectors {
            out.push(ratio(c, s.hits));
        }
        out.push(ratio(100.0 * s.runs, s.balls));
        out.push(ratio(s.attacking, s.balls));
        out.push(ratio(s.defensive, s.balls));
        out.push(ratio(s.boundaries, s.balls));
        out.push(ratio(s.dots, s.balls));
        out.push(ratio(s.pace[1], s.pace[0]));
        out.push(ratio(s.spin[1], s.spin[0]));
        out
    }

    fn names() -> Vec<String> {
        let mut out = Vec::new();
        for band in CoarseLength::ALL {
            for stat in ["aggression_share", "runs_per_ball", "dismissal_rate"] {
                out.push(format!("bat_{}_{stat}", band.name()));
            }
        }
        for s in Sector::ALL {
            out.push(format!("bat_share_{}", s.name()));
        }
        for n in [
            "bat_strike_rate",
            "bat_aggression_proportion",
            "bat_defensive_proportion",
            "bat_boundary_rate",
            "bat_dot_rate",
            "bat_aggression_vs_pace",
            "bat_aggression_vs_spin",
        ] {
            out.push(n.to_string());
        }
        out
    }
}

#[derive(Debug, Clone, Default)]
pub struct BowlingSums {
    /// Per coarse length: balls, runs, dots, boundaries.
    band: [[f64; 4]; 4],
    balls: f64,
    runs: f64,
    dots: f64,
    boundaries: f64,
    wickets: f64,
    line: [f64; 2],
    length: [f64; 2],
}

fn spread(sum: f64, sum_sq: f64, n: f64) -> Option<f64> {
    (n > 0.0).then(|| {
        let mean = sum / n;
        (sum_sq / n - mean * mean).max(0.0).sqrt()
    })
}

impl ProfileRecord for BowlingRecord {
    type Sums = BowlingSums;
    const STATS: usize = BOWLING_STATS;

    fn add_to(&self, s: &mut BowlingSums, sign: f64) {
        let runs = self.runs as f64;
        let dot = if self.runs == 0 { 1.0 } else { 0.0 };
        let boundary = if self.runs == 4 || self.runs == 6 { 1.0 } else { 0.0 };
        let b = &mut s.band[self.length.index()];
        b[0] += sign;
        b[1] += sign * runs;
        b[2] += sign * dot;
        b[3] += sign * boundary;
        s.balls += sign;
        s.runs += sign * runs;
        s.dots += sign * dot;
        s.boundaries += sign * boundary;
        s.wickets += sign * if self.wicket { 1.0 } else { 0.0 };
        s.line[0] += sign * self.line_offset_m;
        s.line[1] += sign * self.line_offset_m * self.line_offset_m;
        s.length[0] += sign * self.bounce_distance_m;
        s.length[1] += sign * self.bounce_distance_m * self.bounce_distance_m;
    }

    fn stats(s: &BowlingSums) -> Vec<Option<f64>> {
        let mut out = Vec::with_capacity(BOWLING_STATS);
        for b in &s.band {
            out.push(ratio(b[1], b[0]));
            out.push(ratio(b[2], b[0]));
            out.push(ratio(b[3], b[0]));
        }
        out.push(ratio(6.0 * s.runs, s.balls));
        out.push(ratio(s.dots, s.balls));
        out.push(ratio(s.boundaries, s.balls));
        out.push(ratio(s.wickets, s.balls));
        out.push(spread(s.line[0], s.line[1], s.balls));
        out.push(spread(s.length[0], s.length[1], s.balls));
        out
    }

    fn names() -> Vec<String> {
        let mut out = Vec::new();
        for band in CoarseLength::ALL {
            for stat in ["runs_per_ball", "dot_proportion", "boundary_proportion"] {
                out.push(format!("bowl_{}_{stat}", band.name()));
            }
        }
        for n in [
            "bowl_economy",
            "bowl_dot_rate",
            "bowl_boundary_rate",
            "bowl_wicket_rate",
            "bowl_line_consistency",
            "bowl_length_consistency",
        ] {
            out.push(n.to_string());
        }
        out
    }
}

/// A player's last [`WINDOW`] involvements in one role.
#[derive(Debug, Clone)]
pub struct PlayerProfile<R: ProfileRecord> {
    player_id: String,
    window: VecDeque<R>,
    sums: R::Sums,
    n_seen: u64,
    matches: u32,
    last_match: Option<String>,
}

pub type BattingProfile = PlayerProfile<BattingRecord>;
pub type BowlingProfile = PlayerProfile<BowlingRecord>;

impl<R: ProfileRecord> PlayerProfile<R> {
    pub fn new(player_id: impl Into<String>) -> Self {
        PlayerProfile {
            player_id: player_id.into(),
            window: VecDeque::with_capacity(WINDOW),
            sums: R::Sums::default(),
            n_seen: 0,
            matches: 0,
            last_match: None,
        }
    }

    /// Rebuilds a profile from stored window contents.
    pub fn from_window(
        player_id: impl Into<String>,
        window: Vec<R>,
        n_seen: u64,
        matches: u32,
    ) -> Self {
        let mut p = Self::new(player_id);
        for r in window.into_iter().rev().take(WINDOW).collect::<Vec<_>>().into_iter().rev() {
            r.add_to(&mut p.sums, 1.0);
            p.window.push_back(r);
        }
        p.n_seen = n_seen.max(p.window.len() as u64);
        p.matches = matches;
        p
    }

    pub fn player_id(&self) -> &str {
        &self.player_id
    }

    /// Lifetime involvements, not capped by the window.
    pub fn n_seen(&self) -> u64 {
        self.n_seen
    }

    pub fn matches(&self) -> u32 {
        self.matches
    }

    pub fn window(&self) -> impl ExactSizeIterator<Item = &R> {
        self.window.iter()
    }

    pub fn push(&mut self, record: R) {
        if self.window.len() == WINDOW {
            let old = self.window.pop_front().expect("full window");
            old.add_to(&mut self.sums, -1.0);
        }
        record.add_to(&mut self.sums, 1.0);
        self.window.push_back(record);
        self.n_seen += 1;
    }

    fn note_match(&mut self, match_id: &str) {
        if self.last_match.as_deref() != Some(match_id) {
            self.matches += 1;
            self.last_match = Some(match_id.to_string());
        }
    }

    pub fn stats(&self) -> Vec<Option<f64>> {
        R::stats(&self.sums)
    }

    /// Blend weight of the personal statistics.
    pub fn blend_weight(&self) -> f64 {
        blend_weight(self.n_seen)
    }
}

impl BattingProfile {
    pub fn update(&mut self, d: &Delivery) -> Result<(), FeatureError> {
        if d.batsman_id != self.player_id {
            return Err(FeatureError::RoleMismatch {
                player: self.player_id.clone(),
                role: "batsman",
            });
        }
        self.note_match(&d.match_id);
        if let Some(r) = BattingRecord::from_delivery(d) {
            self.push(r);
        }
        Ok(())
    }
}

impl BowlingProfile {
    pub fn update(&mut self, d: &Delivery) -> Result<(), FeatureError> {
        if d.bowler_id != self.player_id {
            return Err(FeatureError::RoleMismatch {
                player: self.player_id.clone(),
                role: "bowler",
            });
        }
        self.note_match(&d.match_id);
        if let Some(r) = BowlingRecord::from_delivery(d) {
            self.push(r);
        }
        Ok(())
    }
}

/// Pooled statistics over arbitrarily many records, with no window.
#[derive(Debug, Clone)]
pub struct Pooled<R: ProfileRecord> {
    sums: R::Sums,
}

impl<R: ProfileRecord> Default for Pooled<R> {
    fn default() -> Self {
        Pooled { sums: R::Sums::default() }
    }
}

impl<R: ProfileRecord> Pooled<R> {
    pub fn add(&mut self, r: &R) {
        r.add_to(&mut self.sums, 1.0);
    }

    pub fn stats(&self) -> Vec<Option<f64>> {
        R::stats(&self.sums)
    }
}

/// Weight of personal history: `min(n, 500) / 500`.
pub fn blend_weight(n_seen: u64) -> f64 {
    n_seen.min(WINDOW as u64) as f64 / WINDOW as f64
}

/// Linear blend of a personal value with the global mean by history length.
pub fn blend(personal: f64, global_mean: f64, n_seen: u64) -> f64 {
    let w = blend_weight(n_seen);
    if w == 1.0 {
        personal
    } else if w == 0.0 {
        global_mean
    } else {
        w * personal + (1.0 - w) * global_mean
    }
}
