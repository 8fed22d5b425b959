use std::fmt::Write as _;

use serde::Serialize;

use super::grid::{build_grid, BatsmanPhase, ScenarioGrid};
use super::scenario::{predict_scenario, LengthSpec, LineSpec};
use super::summary::{format_comparison, percent, summarize, TacticalSummary};
use super::SimError;
use crate::domain::{exact_sum, BowlingAngle, Handedness, ZoneDistribution};
use crate::models::ModelBundle;
use crate::nn::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub bowler_id: String,
    pub bowler_hand: Handedness,
    pub angle: BowlingAngle,
    pub phase: Option<BatsmanPhase>,
    pub line: LineSpec,
    pub length: LengthSpec,
    pub summary: TacticalSummary,
    pub distribution: ZoneDistribution,
}

/// Mean attacking share of one bowler's rows, early versus set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseDelta {
    pub bowler_id: String,
    pub bowler_hand: Handedness,
    pub start_attack: f64,
    pub set_attack: f64,
    /// `set_attack - start_attack`, in percentage points.
    pub delta_points: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub phase_deltas: Vec<PhaseDelta>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = values.collect();
    (!v.is_empty()).then(|| exact_sum(v.iter().copied()) / v.len() as f64)
}

fn phase_deltas(rows: &[SweepRow]) -> Vec<PhaseDelta> {
    let mut out: Vec<PhaseDelta> = Vec::new();
    for row in rows {
        if out.iter().any(|d| d.bowler_id == row.bowler_id) {
            continue;
        }
        let attack = |phase: BatsmanPhase| {
            mean(
                rows.iter()
                    .filter(|r| r.bowler_id == row.bowler_id && r.phase == Some(phase))
                    .map(|r| r.summary.p_attack),
            )
        };
        if let (Some(start), Some(set)) = (attack(BatsmanPhase::Start), attack(BatsmanPhase::Set)) {
            out.push(PhaseDelta {
                bowler_id: row.bowler_id.clone(),
                bowler_hand: row.bowler_hand,
                start_attack: start,
                set_attack: set,
                delta_points: 100.0 * (set - start),
            });
        }
    }
    out
}

/// Predicts and summarizes every grid point, in grid order.
pub fn sweep_report<S: Scalar>(bundle: &ModelBundle<S>, grid: &ScenarioGrid) -> Result<SweepReport, SimError> {
    bundle.check_version()?;
    let cells = build_grid(grid, &bundle.profiles)?;
    let mut rows = Vec::with_capacity(cells.len());
    for cell in cells {
        let distribution = predict_scenario(bundle, &cell.scenario)?;
        rows.push(SweepRow {
            bowler_id: cell.bowler_id,
            bowler_hand: cell.bowler_hand,
            angle: cell.angle,
            phase: cell.phase,
            line: cell.line,
            length: cell.length,
            summary: summarize(&distribution),
            distribution,
        });
    }
    let phase_deltas = phase_deltas(&rows);
    Ok(SweepReport { rows, phase_deltas })
}

impl SweepReport {
    /// Tab-separated rows, then one comparison line per bowler when the grid
    /// has both batsman phases.
    pub fn to_table(&self) -> String {
        let mut out = String::from(
            "bowler\tarm\tangle\tphase\tline\tlength\tdefensive\trotate\tattack\tdeflect\toff_side\tleg_side\ttop_zone\n",
        );
        let share = |p: Option<f64>| p.map(percent).unwrap_or_else(|| "-".into());
        for r in &self.rows {
            let s = &r.summary;
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.bowler_id,
                r.bowler_hand.code(),
                r.angle.code(),
                r.phase.map(BatsmanPhase::label).unwrap_or("-"),
                r.line,
                r.length,
                percent(s.p_defensive),
                percent(s.p_rotate),
                percent(s.p_attack),
                percent(s.p_deflect),
                share(s.off_side_share),
                share(s.leg_side_share),
                s.top_zones[0].zone,
            );
        }
        for d in &self.phase_deltas {
            let _ = writeln!(
                out,
                "{} ({}-arm): attacking shots {} (>60 vs 0-9 balls), {:+.1} points",
                d.bowler_id,
                d.bowler_hand.code(),
                format_comparison(d.set_attack, d.start_attack),
                d.delta_points,
            );
        }
        out
    }
}
