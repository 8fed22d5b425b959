//! Shot taxonomy, target zones, pitch bands and handedness mirroring.
//!
//! Everything here is a pure function over fixed tables. The
//! [`TaxonomyDocument`] export is the single machine-readable copy of those
//! tables shared with the service and the UI.

mod bands;
mod shots;
mod sum;
mod zones;

use serde::Serialize;
use thiserror::Error;

pub use bands::{
    length_band, line_band, BowlingAngle, Bounce, CoarseLength, LengthBand, LineBand,
    MAX_BOUNCE_M, MAX_LINE_OFFSET_M,
};
pub use shots::{
    aggression_label, AggressionLabel, ShotLabel, ATTACKING_SHOTS, DEFENSIVE_SHOTS, WORKING_SHOTS,
};
pub use sum::exact_sum;
pub use zones::{
    mirror_angle, zone_of, AggressionClass, FieldAngle, Handedness, Sector, ZoneDistribution,
    ZoneId,
};

/// Bumped whenever a shot group, zone id or band threshold changes.
pub const TAXONOMY_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("unknown shot label `{0}`")]
    UnknownShotLabel(String),
    #[error("aggression level must be 0, 1 or 2, got {0}")]
    InvalidAggression(u8),
    #[error("zone id {0} out of range 0..17")]
    InvalidZone(usize),
    #[error("unknown zone name `{0}`")]
    UnknownZoneName(String),
    #[error("no zone for {0:?}/{1:?}")]
    NoSuchZone(Sector, AggressionClass),
    #[error("{what} = {value} is out of range")]
    OutOfRange { what: &'static str, value: f64 },
    #[error("not a probability simplex: {0}")]
    NotASimplex(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct TaxonomyDocument {
    pub version: u32,
    pub shots: Vec<ShotEntry>,
    pub zones: Vec<ZoneEntry>,
    pub length_bands_m: Vec<BandEntry>,
    pub line_bands_m: Vec<BandEntry>,
    pub angle_convention: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShotEntry {
    pub name: &'static str,
    pub aggression: u8,
}

#[derive(Debug, Clone, Serialize)]
pub struct ZoneEntry {
    pub id: usize,
    pub name: String,
    pub sector: Option<&'static str>,
    pub class: AggressionClass,
    /// Canonical right-handed range in degrees, `[from, to)`.
    pub angle_deg: Option<[f64; 2]>,
    pub off_side: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BandEntry {
    pub name: String,
    /// `None` for FullToss, which has no bounce point.
    pub range: Option<[f64; 2]>,
    pub midpoint: Option<f64>,
}

pub fn taxonomy_document() -> TaxonomyDocument {
    TaxonomyDocument {
        version: TAXONOMY_VERSION,
        shots: ShotLabel::all()
            .map(|s| ShotEntry {
                name: s.name(),
                aggression: s.aggression().level(),
            })
            .collect(),
        zones: ZoneId::all()
            .map(|z| ZoneEntry {
                id: z.index(),
                name: z.name(),
                sector: z.sector().map(Sector::name),
                class: z.class(),
                angle_deg: z.sector().map(|s| {
                    let (lo, hi) = s.range_deg();
                    [lo, hi]
                }),
                off_side: z.sector().map(Sector::is_off_side),
            })
            .collect(),
        length_bands_m: LengthBand::ALL
            .iter()
            .map(|b| BandEntry {
                name: format!("{b:?}"),
                range: b.range_m().map(|(lo, hi)| [lo, hi]),
                midpoint: b.midpoint().distance(),
            })
            .collect(),
        line_bands_m: LineBand::ALL
            .iter()
            .map(|b| {
                let (lo, hi) = b.range_m();
                BandEntry {
                    name: format!("{b:?}"),
                    range: Some([lo, hi]),
                    midpoint: Some(b.midpoint()),
                }
            })
            .collect(),
        angle_convention: "degrees counterclockwise from straight down the pitch through the \
                           right-hander's off side; left-handers are mirrored (360 - theta)",
    }
}
