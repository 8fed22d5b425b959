use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::domain::{Bounce, BowlingAngle, Handedness};
use crate::ingest::{BowlerStyle, Delivery, MatchFormat};

pub const CONTEXT_LEN: usize = 39;

/// Name, unit and documented range of each context entry.
pub const CONTEXT_LEDGER: [(&str, &str, f64, f64); CONTEXT_LEN] = [
    // delivery trajectory (14)
    ("line_offset_m", "m, striker's off side positive", -1.6, 1.6),
    ("bounce_distance_m", "m from striker's stumps, 0 for a full toss", 0.0, 20.0),
    ("speed_kmh", "km/h", 40.0, 165.0),
    ("swing_deg", "deg", -45.0, 45.0),
    ("turn_deg", "deg", -45.0, 45.0),
    ("bounce_height_m", "m", 0.0, 5.0),
    ("release_height_m", "m", 1.0, 2.6),
    ("bowler_is_left_handed", "flag, canonical frame", 0.0, 1.0),
    ("style_fast", "one-hot", 0.0, 1.0),
    ("style_fast_medium", "one-hot", 0.0, 1.0),
    ("style_finger_spin", "one-hot", 0.0, 1.0),
    ("style_wrist_spin", "one-hot", 0.0, 1.0),
    ("around_the_wicket", "flag", 0.0, 1.0),
    ("is_full_toss", "flag", 0.0, 1.0),
    // match state (17)
    ("format_is_t20", "flag", 0.0, 1.0),
    ("innings_index", "1 or 2", 1.0, 2.0),
    ("balls_bowled", "balls", 0.0, 299.0),
    ("balls_remaining", "balls", 1.0, 300.0),
    ("over_number", "overs, 0-based", 0.0, 49.0),
    ("ball_in_over", "1..6", 1.0, 6.0),
    ("team_runs", "runs", 0.0, 1000.0),
    ("team_wickets_lost", "wickets", 0.0, 9.0),
    ("current_run_rate", "runs per over", 0.0, 36.0),
    ("required_run_rate", "runs per over, capped", 0.0, 36.0),
    ("chasing_flag", "flag", 0.0, 1.0),
    ("fielding_restriction_flag", "flag", 0.0, 1.0),
    ("runs_off_previous_ball", "runs", 0.0, 6.0),
    ("wicket_previous_ball", "flag", 0.0, 1.0),
    ("partnership_runs", "runs", 0.0, 1000.0),
    ("partnership_balls", "balls", 0.0, 300.0),
    ("striker_batting_position", "1..11", 1.0, 11.0),
    // striker state (8)
    ("batsman_runs", "runs", 0.0, 1000.0),
    ("batsman_balls_faced", "balls", 0.0, 300.0),
    ("batsman_innings_strike_rate", "runs per 100 balls", 0.0, 600.0),
    ("batsman_is_left_handed", "flag, canonical frame", 0.0, 1.0),
    ("consecutive_dot_balls", "balls", 0.0, 300.0),
    ("fours_this_innings", "count", 0.0, 300.0),
    ("sixes_this_innings", "count", 0.0, 300.0),
    ("new_batsman_flag", "flag, fewer than 10 balls faced", 0.0, 1.0),
];

pub fn context_index(name: &str) -> Option<usize> {
    CONTEXT_LEDGER.iter().position(|e| e.0 == name)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContextVector(#[serde(with = "serde_arrays")] pub [f64; CONTEXT_LEN]);

impl ContextVector {
    pub const ZERO: ContextVector = ContextVector([0.0; CONTEXT_LEN]);

    pub fn get(&self, name: &str) -> f64 {
        self.0[context_index(name).unwrap_or_else(|| panic!("unknown context entry {name}"))]
    }
}

mod serde_arrays {
    use serde::{Deserialize, Deserializer, Serializer};
    use super::CONTEXT_LEN;

    pub fn serialize<S: Serializer>(v: &[f64; CONTEXT_LEN], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[f64; CONTEXT_LEN], D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        let n = v.len();
        v.try_into()
            .map_err(|_| serde::de::Error::custom(format!("context vector needs {CONTEXT_LEN} entries, got {n}")))
    }
}

/// Everything the context vector is computed from, for either a recorded
/// delivery or a hypothetical scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextInputs {
    pub line_offset_m: f64,
    pub bounce: Bounce,
    pub speed_kmh: f64,
    pub swing_deg: f64,
    pub turn_deg: f64,
    pub bounce_height_m: f64,
    pub release_height_m: f64,
    pub batsman_hand: Handedness,
    pub bowler_hand: Handedness,
    pub bowler_style: BowlerStyle,
    pub bowling_angle: BowlingAngle,

    pub format: MatchFormat,
    pub innings_index: u8,
    pub over_number: u32,
    pub ball_in_over: u8,
    pub team_runs: u32,
    pub team_wickets: u8,
    /// Runs needed to win, second innings only.
    pub target: Option<u32>,
    pub runs_previous_ball: u8,
    pub wicket_previous_ball: bool,
    pub partnership_runs: u32,
    pub partnership_balls: u32,
    pub batting_position: u8,

    pub batsman_runs: u32,
    pub batsman_balls_faced: u32,
    pub consecutive_dots: u32,
    pub fours: u32,
    pub sixes: u32,
}

impl ContextInputs {
    /// Fills all 39 entries in right-handed canonical coordinates: the striker
    /// is always treated as right-handed and the bowler's arm is expressed
    /// relative to the striker's hand.
    pub fn to_vector(&self) -> ContextVector {
        let mut v = [0.0; CONTEXT_LEN];
        let flag = |b: bool| if b { 1.0 } else { 0.0 };
        let balls_bowled = self.over_number * 6 + self.ball_in_over as u32 - 1;
        let balls_remaining = self.format.max_balls().saturating_sub(balls_bowled);
        let crr = if balls_bowled == 0 {
            0.0
        } else {
            (6.0 * self.team_runs as f64 / balls_bowled as f64).min(36.0)
        };
        let rrr = match self.target {
            Some(t) if self.innings_index == 2 => {
                let need = t.saturating_sub(self.team_runs) as f64;
                (6.0 * need / balls_remaining.max(1) as f64).min(36.0)
            }
            _ => 0.0,
        };
        let chasing = self.innings_index == 2 && self.target.is_some();
        let sr = if self.batsman_balls_faced == 0 {
            0.0
        } else {
            (100.0 * self.batsman_runs as f64 / self.batsman_balls_faced as f64).min(600.0)
        };

        v[0] = self.line_offset_m;
        v[1] = self.bounce.distance().unwrap_or(0.0);
        v[2] = self.speed_kmh;
        v[3] = self.swing_deg;
        v[4] = self.turn_deg;
        v[5] = self.bounce_height_m;
        v[6] = self.release_height_m;
        v[7] = flag(self.bowler_hand != self.batsman_hand);
        v[8 + self.bowler_style.index()] = 1.0;
        v[12] = flag(self.bowling_angle == BowlingAngle::AroundTheWicket);
        v[13] = flag(self.bounce.is_full_toss());

        v[14] = flag(self.format == MatchFormat::T20);
        v[15] = self.innings_index as f64;
        v[16] = balls_bowled as f64;
        v[17] = balls_remaining as f64;
        v[18] = self.over_number as f64;
        v[19] = self.ball_in_over as f64;
        v[20] = self.team_runs as f64;
        v[21] = self.team_wickets as f64;
        v[22] = crr;
        v[23] = rrr;
        v[24] = flag(chasing);
        v[25] = flag(self.over_number < self.format.powerplay_overs());
        v[26] = self.runs_previous_ball as f64;
        v[27] = flag(self.wicket_previous_ball);
        v[28] = self.partnership_runs as f64;
        v[29] = self.partnership_balls as f64;
        v[30] = self.batting_position as f64;

        v[31] = self.batsman_runs as f64;
        v[32] = self.batsman_balls_faced as f64;
        v[33] = sr;
        // canonical frame: the striker is right-handed
        v[34] = 0.0;
        v[35] = self.consecutive_dots as f64;
        v[36] = self.fours as f64;
        v[37] = self.sixes as f64;
        v[38] = flag(self.batsman_balls_faced < 10);
        ContextVector(v)
    }
}

#[derive(Debug, Clone, Default)]
struct StrikerInnings {
    runs: u32,
    balls: u32,
    dots: u32,
    fours: u32,
    sixes: u32,
}

/// Running totals for one innings, fed deliveries in order.
#[derive(Debug, Clone)]
pub struct InningsState {
    target: Option<u32>,
    previous: Option<(u8, bool)>,
    partnership_runs: u32,
    partnership_balls: u32,
    order: HashMap<String, u8>,
    strikers: HashMap<String, StrikerInnings>,
}

impl InningsState {
    pub fn new(target: Option<u32>) -> Self {
        InningsState {
            target,
            previous: None,
            partnership_runs: 0,
            partnership_balls: 0,
            order: HashMap::new(),
            strikers: HashMap::new(),
        }
    }

    fn position(&mut self, id: &str) -> u8 {
        let next = (self.order.len() + 1).min(11) as u8;
        *self.order.entry(id.to_string()).or_insert(next)
    }

    /// Inputs for `d`, using only what happened before it.
    pub fn inputs_for(&mut self, d: &Delivery) -> ContextInputs {
        let position = self.position(&d.batsman_id);
        self.position(&d.non_striker_id);
        let s = self.strikers.get(&d.batsman_id).cloned().unwrap_or_default();
        let (runs_prev, wicket_prev) = self.previous.unwrap_or((0, false));
        ContextInputs {
            line_offset_m: d.line_offset_m,
            bounce: d.bounce,
            speed_kmh: d.speed_kmh,
            swing_deg: d.swing_deg,
            turn_deg: d.turn_deg,
            bounce_height_m: d.bounce_height_m,
            release_height_m: d.release_height_m,
            batsman_hand: d.batsman_hand,
            bowler_hand: d.bowler_hand,
            bowler_style: d.bowler_style,
            bowling_angle: d.bowling_angle,
            format: d.format,
            innings_index: d.innings_index,
            over_number: d.over_number,
            ball_in_over: d.ball_in_over,
            team_runs: d.team_runs_before,
            team_wickets: d.team_wickets_before,
            target: self.target,
            runs_previous_ball: runs_prev,
            wicket_previous_ball: wicket_prev,
            partnership_runs: self.partnership_runs,
            partnership_balls: self.partnership_balls,
            batting_position: position,
            batsman_runs: s.runs,
            batsman_balls_faced: s.balls,
            consecutive_dots: s.dots,
            fours: s.fours,
            sixes: s.sixes,
        }
    }

    pub fn record(&mut self, d: &Delivery) {
        let s = self.strikers.entry(d.batsman_id.clone()).or_default();
        s.balls += 1;
        // extras add to the team total but not to the striker
        if !d.is_extra() {
            s.runs += d.runs as u32;
            match d.runs {
                0 => s.dots += 1,
                4 => s.fours += 1,
                6 => s.sixes += 1,
                _ => {}
            }
            if d.runs != 0 {
                s.dots = 0;
            }
        }
        self.previous = Some((d.runs, d.wicket));
        if d.wicket {
            self.partnership_runs = 0;
            self.partnership_balls = 0;
        } else {
            self.partnership_runs += d.runs as u32;
            self.partnership_balls += 1;
        }
    }
}

/// Context vectors for one innings, in delivery order.
pub fn innings_contexts(innings: &[Delivery], target: Option<u32>) -> Vec<ContextVector> {
    let mut state = InningsState::new(target);
    innings
        .iter()
        .map(|d| {
            let v = state.inputs_for(d).to_vector();
            state.record(d);
            v
        })
        .collect()
}

/// Context vector of one delivery given the running innings state.
pub fn context_vector(d: &Delivery, state: &mut InningsState) -> ContextVector {
    state.inputs_for(d).to_vector()
}
