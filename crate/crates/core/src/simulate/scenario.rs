use std::fmt;

use serde::{Deserialize, Serialize};

use super::SimError;
use crate::domain::{length_band, Bounce, BowlingAngle, Handedness, LengthBand, LineBand, ZoneDistribution, MAX_LINE_OFFSET_M};
use crate::featurize::{
    aux_vector, BattingProfile, BowlingProfile, ContextInputs, ContextVector, FeatureFrame, GlobalStats, ProfileStore,
    LOOKBACK,
};
use crate::ingest::{BowlerStyle, MatchFormat, Role};
use crate::models::ModelBundle;
use crate::nn::Scalar;

/// A named line band or an explicit offset in meters (striker's off side positive).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LineSpec {
    Band(LineBand),
    Offset(f64),
}

impl LineSpec {
    pub fn offset_m(self) -> f64 {
        match self {
            LineSpec::Band(b) => b.midpoint(),
            LineSpec::Offset(x) => x,
        }
    }
}

impl fmt::Display for LineSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LineSpec::Band(b) => write!(f, "{b:?}"),
            LineSpec::Offset(x) => write!(f, "{x} m"),
        }
    }
}

/// A named length band or an explicit bounce distance in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LengthSpec {
    Band(LengthBand),
    Distance(f64),
}

impl LengthSpec {
    pub fn bounce(self) -> Bounce {
        match self {
            LengthSpec::Band(b) => b.midpoint(),
            LengthSpec::Distance(x) => Bounce::At(x),
        }
    }
}

impl fmt::Display for LengthSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LengthSpec::Band(b) => write!(f, "{b:?}"),
            LengthSpec::Distance(x) => write!(f, "{x} m"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatsmanState {
    pub runs: u32,
    pub balls_faced: u32,
    pub batting_position: u8,
}

impl Default for BatsmanState {
    fn default() -> Self {
        BatsmanState { runs: 0, balls_faced: 0, batting_position: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatchState {
    pub format: MatchFormat,
    pub innings: u8,
    /// 0-based.
    pub over: u32,
    pub ball: u8,
    pub score: u32,
    pub wickets: u8,
    /// Chase target (first-innings total plus one), second innings only.
    pub target: Option<u32>,
}

impl Default for MatchState {
    fn default() -> Self {
        MatchState { format: MatchFormat::ODI, innings: 1, over: 10, ball: 1, score: 50, wickets: 1, target: None }
    }
}

/// The ball being simulated. Unset numbers take style-typical values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeliverySpec {
    pub line: LineSpec,
    pub length: LengthSpec,
    pub speed_kmh: Option<f64>,
    pub swing_deg: f64,
    pub turn_deg: Option<f64>,
    pub bowling_angle: BowlingAngle,
    pub bounce_height_m: Option<f64>,
    pub release_height_m: Option<f64>,
}

impl Default for DeliverySpec {
    fn default() -> Self {
        DeliverySpec {
            line: LineSpec::Band(LineBand::OffStump),
            length: LengthSpec::Band(LengthBand::GoodLength),
            speed_kmh: None,
            swing_deg: 0.0,
            turn_deg: None,
            bowling_angle: BowlingAngle::OverTheWicket,
            bounce_height_m: None,
            release_height_m: None,
        }
    }
}

/// A hypothetical delivery to a given batsman from a given bowler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub batsman_id: String,
    pub bowler_id: String,
    #[serde(default)]
    pub batsman: BatsmanState,
    #[serde(default, rename = "match")]
    pub match_state: MatchState,
    #[serde(default)]
    pub delivery: DeliverySpec,
    /// Context vectors of up to five earlier balls of the innings, oldest
    /// first. Empty means a cold start.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub history: Vec<ContextVector>,
    /// Overrides of what the profile store records.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batsman_hand: Option<Handedness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bowler_hand: Option<Handedness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bowler_style: Option<BowlerStyle>,
    /// Unknown players get global-mean statistics instead of an error.
    #[serde(default)]
    pub allow_unknown: bool,
}

impl Scenario {
    pub fn new(batsman_id: impl Into<String>, bowler_id: impl Into<String>) -> Self {
        Scenario {
            batsman_id: batsman_id.into(),
            bowler_id: bowler_id.into(),
            batsman: BatsmanState::default(),
            match_state: MatchState::default(),
            delivery: DeliverySpec::default(),
            history: Vec::new(),
            batsman_hand: None,
            bowler_hand: None,
            bowler_style: None,
            allow_unknown: false,
        }
    }
}

/// A scenario with every default filled in and its model input.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub batsman_hand: Handedness,
    pub bowler_hand: Handedness,
    pub bowler_style: BowlerStyle,
    pub inputs: ContextInputs,
    pub frame: FeatureFrame,
}

fn typical_speed(style: BowlerStyle) -> f64 {
    match style {
        BowlerStyle::Fast => 140.0,
        BowlerStyle::FastMedium => 130.0,
        BowlerStyle::FingerSpin => 85.0,
        BowlerStyle::WristSpin => 80.0,
    }
}

fn config<T>(msg: String) -> Result<T, SimError> {
    Err(SimError::Config(msg))
}

/// Bowling arm and style of a bowler: scenario override, then profile store.
pub(crate) fn bowler_identity(
    profiles: &ProfileStore,
    id: &str,
    hand: Option<Handedness>,
    style: Option<BowlerStyle>,
) -> Option<(Handedness, BowlerStyle)> {
    let info = profiles.player(id);
    let hand = hand.or_else(|| info.and_then(|p| p.bowling_hand))?;
    let style = style.or_else(|| info.and_then(|p| p.bowler_style))?;
    Some((hand, style))
}

fn check_match(m: &MatchState) -> Result<(), SimError> {
    if !(1..=2).contains(&m.innings) {
        return config(format!("innings must be 1 or 2, got {}", m.innings));
    }
    if !(1..=6).contains(&m.ball) {
        return config(format!("ball must be in 1..=6, got {}", m.ball));
    }
    if m.over >= m.format.overs() {
        return config(format!("over {} is past the end of a {:?} innings", m.over, m.format));
    }
    if m.wickets > 9 {
        return config(format!("wickets must be at most 9, got {}", m.wickets));
    }
    Ok(())
}

/// Fills in defaults and builds the model input for a scenario.
pub fn resolve(profiles: &ProfileStore, globals: &GlobalStats, scenario: &Scenario) -> Result<Resolved, SimError> {
    let bat = profiles.batting(&scenario.batsman_id);
    let bowl = profiles.bowling(&scenario.bowler_id);
    if !scenario.allow_unknown {
        if bat.is_none() {
            return Err(SimError::UnknownPlayer { id: scenario.batsman_id.clone(), role: Role::Batsman });
        }
        if bowl.is_none() {
            return Err(SimError::UnknownPlayer { id: scenario.bowler_id.clone(), role: Role::Bowler });
        }
    }
    let batsman_hand = scenario
        .batsman_hand
        .or_else(|| profiles.player(&scenario.batsman_id).map(|p| p.hand))
        .unwrap_or(Handedness::Right);
    let (bowler_hand, bowler_style) =
        bowler_identity(profiles, &scenario.bowler_id, scenario.bowler_hand, scenario.bowler_style).ok_or_else(|| {
            SimError::Config(format!("bowling arm and style of {} are unknown; set bowler_hand and bowler_style", scenario.bowler_id))
        })?;

    let m = &scenario.match_state;
    check_match(m)?;
    let d = &scenario.delivery;
    let line = d.line.offset_m();
    if !(line.abs() <= MAX_LINE_OFFSET_M) {
        return config(format!("line offset {line} m is outside ±{MAX_LINE_OFFSET_M} m"));
    }
    let bounce = d.length.bounce();
    length_band(bounce).map_err(|e| SimError::Config(e.to_string()))?;
    let speed = d.speed_kmh.unwrap_or_else(|| typical_speed(bowler_style));
    if !(40.0..=165.0).contains(&speed) {
        return config(format!("speed {speed} km/h is outside 40..=165"));
    }
    let bounce_height = d.bounce_height_m.unwrap_or(match bounce {
        Bounce::FullToss => 0.0,
        Bounce::At(x) => (0.3 + 0.06 * x + 0.004 * (speed - 100.0)).clamp(0.0, 3.0),
    });
    let release = d.release_height_m.unwrap_or(if bowler_style.is_pace() { 2.15 } else { 1.95 });
    let turn = d.turn_deg.unwrap_or(if bowler_style.is_pace() { 0.0 } else { 3.0 });
    let numbers = [d.swing_deg, turn, bounce_height, release];
    if numbers.iter().any(|v| !v.is_finite()) || d.swing_deg.abs() > 45.0 || turn.abs() > 45.0 {
        return config("swing and turn must lie within ±45°".into());
    }
    if !(0.0..=5.0).contains(&bounce_height) || !(1.0..=2.6).contains(&release) {
        return config("bounce height must be in 0..=5 m and release height in 1..=2.6 m".into());
    }

    let b = &scenario.batsman;
    let inputs = ContextInputs {
        line_offset_m: line,
        bounce,
        speed_kmh: speed,
        swing_deg: d.swing_deg,
        turn_deg: turn,
        bounce_height_m: bounce_height,
        release_height_m: release,
        batsman_hand,
        bowler_hand,
        bowler_style,
        bowling_angle: d.bowling_angle,
        format: m.format,
        innings_index: m.innings,
        over_number: m.over,
        ball_in_over: m.ball,
        team_runs: m.score,
        team_wickets: m.wickets,
        target: m.target,
        runs_previous_ball: 0,
        wicket_previous_ball: false,
        partnership_runs: b.runs,
        partnership_balls: b.balls_faced,
        batting_position: b.batting_position.clamp(1, 11),
        batsman_runs: b.runs,
        batsman_balls_faced: b.balls_faced,
        consecutive_dots: 0,
        fours: 0,
        sixes: 0,
    };

    if scenario.history.len() > LOOKBACK - 1 {
        return config(format!("at most {} earlier balls fit the lookback window", LOOKBACK - 1));
    }
    if scenario.history.iter().any(|c| c.0.iter().any(|v| !v.is_finite())) {
        return config("history context vectors must be finite".into());
    }
    let mut sequence = [ContextVector::ZERO; LOOKBACK];
    let mut mask = [true; LOOKBACK];
    let start = LOOKBACK - 1 - scenario.history.len();
    for (k, c) in scenario.history.iter().enumerate() {
        sequence[start + k] = *c;
        mask[start + k] = false;
    }
    sequence[LOOKBACK - 1] = inputs.to_vector();
    mask[LOOKBACK - 1] = false;

    let empty_bat;
    let empty_bowl;
    let bat = match bat {
        Some(p) => p,
        None => {
            empty_bat = BattingProfile::new(scenario.batsman_id.clone());
            &empty_bat
        }
    };
    let bowl = match bowl {
        Some(p) => p,
        None => {
            empty_bowl = BowlingProfile::new(scenario.bowler_id.clone());
            &empty_bowl
        }
    };
    let frame = FeatureFrame { sequence, mask, aux: aux_vector(bat, bowl, globals), target: None };
    Ok(Resolved { batsman_hand, bowler_hand, bowler_style, inputs, frame })
}

/// Zone probabilities for a scenario, in the batsman's own frame of reference.
pub fn predict_scenario<S: Scalar>(bundle: &ModelBundle<S>, scenario: &Scenario) -> Result<ZoneDistribution, SimError> {
    bundle.check_version()?;
    let r = resolve(&bundle.profiles, &bundle.globals, scenario)?;
    Ok(bundle.predict(&r.frame)?)
}
