//! Model inputs: per-delivery context vectors, rolling player profiles blended
//! into auxiliary vectors, and lookback sequences.

mod aux;
mod context;
mod export;
mod frames;
mod profile;
mod store;

pub use aux::{aux_names, aux_unit, aux_vector, AuxVector, GlobalStats, AUX_LEN};
pub use context::{
    context_index, context_vector, innings_contexts, ContextInputs, ContextVector, InningsState,
    CONTEXT_LEDGER, CONTEXT_LEN,
};
pub use export::{export_feature_vectors, ExportTable, EXPORT_MIN_MATCHES};
pub use frames::{build_features, sequence_window, FeatureFrame, FeatureTable, LOOKBACK};
pub use profile::{
    blend, blend_weight, BattingProfile, BattingRecord, BowlingProfile, BowlingRecord,
    PlayerProfile, Pooled, ProfileRecord, BATTING_STATS, BOWLING_STATS, WINDOW,
};
pub use store::ProfileStore;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("player {player} is not the {role} of this delivery")]
    RoleMismatch { player: String, role: &'static str },
    #[error("profile store built for taxonomy version {found}, expected {expected}")]
    VersionMismatch { expected: u32, found: u32 },
    #[error("malformed profile store: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Serialize)]
pub struct LedgerEntry {
    pub index: usize,
    pub name: String,
    pub unit: String,
    pub min: f64,
    pub max: f64,
}

/// Names, units and ranges of every model input.
#[derive(Debug, Clone, Serialize)]
pub struct FeatureLedger {
    pub context: Vec<LedgerEntry>,
    pub aux: Vec<LedgerEntry>,
    pub lookback: usize,
    pub profile_window: usize,
}

pub fn feature_ledger() -> FeatureLedger {
    FeatureLedger {
        context: CONTEXT_LEDGER
            .iter()
            .enumerate()
            .map(|(index, &(name, unit, min, max))| LedgerEntry {
                index,
                name: name.into(),
                unit: unit.into(),
                min,
                max,
            })
            .collect(),
        aux: aux_names()
            .into_iter()
            .enumerate()
            .map(|(index, name)| {
                let (unit, min, max) = aux_unit(&name);
                LedgerEntry { index, name, unit: unit.into(), min, max }
            })
            .collect(),
        lookback: LOOKBACK,
        profile_window: WINDOW,
    }
}
