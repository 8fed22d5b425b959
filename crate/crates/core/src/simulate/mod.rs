//! What-if scenarios: hypothetical deliveries, Cartesian grids of them, and
//! tactical summaries of the predicted zone distributions.

mod grid;
mod scenario;
mod summary;
mod sweep;

pub use grid::{build_grid, BatsmanPhase, GridCell, ScenarioGrid};
pub use scenario::{
    predict_scenario, resolve, BatsmanState, DeliverySpec, LengthSpec, LineSpec, MatchState, Resolved, Scenario,
};
pub use summary::{format_comparison, percent, summarize, RankedZone, TacticalSummary, TOP_ZONES};
pub use sweep::{sweep_report, PhaseDelta, SweepReport, SweepRow};

use thiserror::Error;

use crate::ingest::Role;
use crate::models::ModelError;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    Config(String),
    #[error("unknown {role:?} `{id}`")]
    UnknownPlayer { id: String, role: Role },
    #[error(transparent)]
    Model(#[from] ModelError),
}
