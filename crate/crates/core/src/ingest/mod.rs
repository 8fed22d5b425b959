//! Ball-by-ball corpora: the open delivery schema, validation, and synthetic
//! generation with planted player tendencies.

mod csv_io;
mod delivery;
pub mod synth;
mod validate;

use thiserror::Error;

use crate::domain::{zone_of, AggressionLabel, DomainError, ZoneId};

pub use csv_io::{corpus_digest, corpus_to_string, parse_corpus, write_corpus, COLUMNS};
pub use delivery::{BowlerStyle, Corpus, Delivery, MatchFormat, PlayerInfo, Role};
pub use synth::{synthesize, ArchetypeSet, BatsmanArchetype, BowlerArchetype, SignalStrength};
pub use validate::{check_delivery, matches_per_player};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("row {row}: {field}: {msg}")]
    Value {
        row: usize,
        field: &'static str,
        msg: String,
    },
    #[error("row {row}: duplicate ball key {key}")]
    Order { row: usize, key: String },
    #[error("config error: {0}")]
    Config(String),
    #[error("delivery has no shot label")]
    MissingShot,
    #[error("attacking or working shot without a shot angle")]
    MissingAngle,
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The training target of a delivery.
pub fn target_of(d: &Delivery) -> Result<ZoneId, IngestError> {
    let shot = d.shot_label.ok_or(IngestError::MissingShot)?;
    let level = shot.aggression();
    if level == AggressionLabel::Defensive {
        return Ok(ZoneId::DEFENSIVE);
    }
    let theta = d.shot_angle.ok_or(IngestError::MissingAngle)?;
    Ok(zone_of(level, theta, d.batsman_hand))
}
