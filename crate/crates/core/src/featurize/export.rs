use std::io::Write;

use super::profile::{BattingRecord, BowlingRecord, PlayerProfile, ProfileRecord};
use super::store::ProfileStore;
use super::FeatureError;
use crate::ingest::Role;

/// Players need at least this many matches in a role to be exported.
pub const EXPORT_MIN_MATCHES: u32 = 10;

/// Unblended personal statistics, one row per qualifying player.
#[derive(Debug, Clone, PartialEq)]
pub struct ExportTable {
    pub columns: Vec<String>,
    pub rows: Vec<(String, Vec<Option<f64>>)>,
}

fn rows<'a, R: ProfileRecord + 'a>(
    profiles: impl Iterator<Item = &'a PlayerProfile<R>>,
) -> Vec<(String, Vec<Option<f64>>)> {
    profiles
        .filter(|p| p.matches() >= EXPORT_MIN_MATCHES)
        .map(|p| (p.player_id().to_string(), p.stats()))
        .collect()
}

pub fn export_feature_vectors(store: &ProfileStore, role: Role) -> ExportTable {
    match role {
        Role::Batsman => ExportTable {
            columns: BattingRecord::names(),
            rows: rows(store.batting_profiles()),
        },
        Role::Bowler => ExportTable {
            columns: BowlingRecord::names(),
            rows: rows(store.bowling_profiles()),
        },
    }
}

impl ExportTable {
    /// Header row then one row per player; undefined statistics are empty cells.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), FeatureError> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["player_id".to_string()];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header)?;
        for (id, values) in &self.rows {
            let mut rec = vec![id.clone()];
            rec.extend(values.iter().map(|v| v.map(|x| x.to_string()).unwrap_or_default()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}
