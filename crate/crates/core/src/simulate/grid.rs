use serde::{Deserialize, Serialize};

use super::scenario::{bowler_identity, LengthSpec, LineSpec, Scenario};
use super::SimError;
use crate::domain::{BowlingAngle, Handedness};
use crate::featurize::ProfileStore;

/// Stage of the batsman's innings, realized as representative balls faced and runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BatsmanPhase {
    /// 0 to 9 balls faced.
    #[serde(rename = "0-9")]
    Start,
    /// More than 60 balls faced.
    #[serde(rename = ">60")]
    Set,
}

impl BatsmanPhase {
    pub fn balls_faced(self) -> u32 {
        match self {
            BatsmanPhase::Start => 5,
            BatsmanPhase::Set => 65,
        }
    }

    /// Runs at 80 per 100 balls.
    pub fn runs(self) -> u32 {
        match self {
            BatsmanPhase::Start => 4,
            BatsmanPhase::Set => 52,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BatsmanPhase::Start => "0-9",
            BatsmanPhase::Set => ">60",
        }
    }
}

/// Axes swept around a base scenario. An absent axis keeps the base value;
/// a present one must be non-empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioGrid {
    pub base: Scenario,
    #[serde(default)]
    pub bowlers: Option<Vec<String>>,
    #[serde(default)]
    pub angles: Option<Vec<BowlingAngle>>,
    #[serde(default)]
    pub phases: Option<Vec<BatsmanPhase>>,
    #[serde(default)]
    pub lines: Option<Vec<LineSpec>>,
    #[serde(default)]
    pub lengths: Option<Vec<LengthSpec>>,
}

/// One grid point: its axis values and the full scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub bowler_id: String,
    pub bowler_hand: Handedness,
    pub angle: BowlingAngle,
    pub phase: Option<BatsmanPhase>,
    pub line: LineSpec,
    pub length: LengthSpec,
    pub scenario: Scenario,
}

fn axis<T: Clone>(name: &str, values: &Option<Vec<T>>, base: T) -> Result<Vec<T>, SimError> {
    match values {
        None => Ok(vec![base]),
        Some(v) if v.is_empty() => Err(SimError::Config(format!("grid axis `{name}` is empty"))),
        Some(v) => Ok(v.clone()),
    }
}

/// The Cartesian product of the axes, bowler-major, then angle, phase, line
/// and length. Left-arm pace bowlers contribute only the first listed angle.
pub fn build_grid(grid: &ScenarioGrid, profiles: &ProfileStore) -> Result<Vec<GridCell>, SimError> {
    let base = &grid.base;
    let bowlers = axis("bowlers", &grid.bowlers, base.bowler_id.clone())?;
    let angles = axis("angles", &grid.angles, base.delivery.bowling_angle)?;
    let phases: Vec<Option<BatsmanPhase>> = match &grid.phases {
        None => vec![None],
        Some(_) => axis("phases", &grid.phases, BatsmanPhase::Start)?.into_iter().map(Some).collect(),
    };
    let lines = axis("lines", &grid.lines, base.delivery.line)?;
    let lengths = axis("lengths", &grid.lengths, base.delivery.length)?;
    if !base.allow_unknown && profiles.batting(&base.batsman_id).is_none() {
        return Err(SimError::Config(format!("unknown batsman {}", base.batsman_id)));
    }
    // overrides in the base describe the base bowler only
    let swept = grid.bowlers.is_some();

    let mut cells = Vec::new();
    for bowler in &bowlers {
        if !base.allow_unknown && profiles.bowling(bowler).is_none() {
            return Err(SimError::Config(format!("unknown bowler {bowler}")));
        }
        let (hand_override, style_override) = if swept { (None, None) } else { (base.bowler_hand, base.bowler_style) };
        let (hand, style) = bowler_identity(profiles, bowler, hand_override, style_override)
            .ok_or_else(|| SimError::Config(format!("bowling arm and style of {bowler} are unknown")))?;
        let bowler_angles = if hand == Handedness::Left && style.is_pace() { &angles[..1] } else { &angles[..] };
        for &angle in bowler_angles {
            for &phase in &phases {
                for &line in &lines {
                    for &length in &lengths {
                        let mut s = base.clone();
                        s.bowler_id = bowler.clone();
                        s.bowler_hand = Some(hand);
                        s.bowler_style = Some(style);
                        s.delivery.bowling_angle = angle;
                        s.delivery.line = line;
                        s.delivery.length = length;
                        if let Some(p) = phase {
                            s.batsman.balls_faced = p.balls_faced();
                            s.batsman.runs = p.runs();
                        }
                        cells.push(GridCell {
                            bowler_id: bowler.clone(),
                            bowler_hand: hand,
                            angle,
                            phase,
                            line,
                            length,
                            scenario: s,
                        });
                    }
                }
            }
        }
    }
    Ok(cells)
}
