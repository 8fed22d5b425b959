use serde::{Deserialize, Serialize};

use super::profile::{
    blend, BattingProfile, BattingRecord, BowlingProfile, BowlingRecord, Pooled, ProfileRecord,
    BATTING_STATS, BOWLING_STATS,
};
use crate::ingest::Delivery;

pub const AUX_LEN: usize = BATTING_STATS + BOWLING_STATS;

/// Names of the 46 auxiliary entries: batting statistics first, then bowling.
pub fn aux_names() -> Vec<String> {
    let mut names = BattingRecord::names();
    names.extend(BowlingRecord::names());
    names
}

/// Unit and documented range of an auxiliary entry, from its name.
pub fn aux_unit(name: &str) -> (&'static str, f64, f64) {
    if name.ends_with("runs_per_ball") {
        ("runs per ball", 0.0, 6.0)
    } else if name == "bat_strike_rate" {
        ("runs per 100 balls", 0.0, 600.0)
    } else if name == "bowl_economy" {
        ("runs per over", 0.0, 36.0)
    } else if name == "bowl_line_consistency" {
        ("m, standard deviation", 0.0, 1.6)
    } else if name == "bowl_length_consistency" {
        ("m, standard deviation", 0.0, 10.0)
    } else {
        ("proportion", 0.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxVector(pub [f64; AUX_LEN]);

impl AuxVector {
    pub fn batting(&self) -> &[f64] {
        &self.0[..BATTING_STATS]
    }

    pub fn bowling(&self) -> &[f64] {
        &self.0[BATTING_STATS..]
    }
}

/// Population means of every auxiliary statistic, pooled over a set of
/// deliveries. Statistics with no supporting data are 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalStats {
    pub batting: Vec<f64>,
    pub bowling: Vec<f64>,
}

impl GlobalStats {
    pub fn from_deliveries(deliveries: &[Delivery]) -> Self {
        let mut bat = Pooled::<BattingRecord>::default();
        let mut bowl = Pooled::<BowlingRecord>::default();
        for d in deliveries {
            if let Some(r) = BattingRecord::from_delivery(d) {
                bat.add(&r);
            }
            if let Some(r) = BowlingRecord::from_delivery(d) {
                bowl.add(&r);
            }
        }
        GlobalStats {
            batting: bat.stats().into_iter().map(|v| v.unwrap_or(0.0)).collect(),
            bowling: bowl.stats().into_iter().map(|v| v.unwrap_or(0.0)).collect(),
        }
    }

    pub fn as_vector(&self) -> AuxVector {
        let mut v = [0.0; AUX_LEN];
        v[..BATTING_STATS].copy_from_slice(&self.batting);
        v[BATTING_STATS..].copy_from_slice(&self.bowling);
        AuxVector(v)
    }

    pub fn is_consistent(&self) -> bool {
        self.batting.len() == BATTING_STATS
            && self.bowling.len() == BOWLING_STATS
            && self.batting.iter().chain(&self.bowling).all(|v| v.is_finite())
    }
}

fn blended(
    personal: Vec<Option<f64>>,
    global: &[f64],
    n_seen: u64,
    out: &mut [f64],
) {
    for ((o, p), &g) in out.iter_mut().zip(personal).zip(global) {
        // an undefined personal ratio carries no information beyond the mean
        *o = blend(p.unwrap_or(g), g, n_seen);
    }
}

/// Each entry is the player's personal statistic blended toward the global
/// mean by that player's history length.
pub fn aux_vector(batsman: &BattingProfile, bowler: &BowlingProfile, globals: &GlobalStats) -> AuxVector {
    let mut v = [0.0; AUX_LEN];
    blended(batsman.stats(), &globals.batting, batsman.n_seen(), &mut v[..BATTING_STATS]);
    blended(bowler.stats(), &globals.bowling, bowler.n_seen(), &mut v[BATTING_STATS..]);
    AuxVector(v)
}
