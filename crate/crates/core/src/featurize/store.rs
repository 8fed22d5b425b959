use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::profile::{BattingProfile, BattingRecord, BowlingProfile, BowlingRecord, PlayerProfile, ProfileRecord};
use super::FeatureError;
use crate::domain::TAXONOMY_VERSION;
use crate::ingest::PlayerInfo;

/// Rolling profiles of every known player, as of the end of a corpus.
#[derive(Debug, Clone, Default)]
pub struct ProfileStore {
    players: BTreeMap<String, PlayerInfo>,
    batting: BTreeMap<String, BattingProfile>,
    bowling: BTreeMap<String, BowlingProfile>,
}

#[derive(Serialize, Deserialize)]
struct StoredProfile<R> {
    n_seen: u64,
    matches: u32,
    window: Vec<R>,
}

#[derive(Serialize, Deserialize)]
struct StoredPlayer {
    #[serde(flatten)]
    info: PlayerInfo,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    batting: Option<StoredProfile<BattingRecord>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    bowling: Option<StoredProfile<BowlingRecord>>,
}

#[derive(Serialize, Deserialize)]
struct StoredStore {
    taxonomy_version: u32,
    players: BTreeMap<String, StoredPlayer>,
}

fn stored<R: ProfileRecord>(p: &PlayerProfile<R>) -> StoredProfile<R> {
    StoredProfile {
        n_seen: p.n_seen(),
        matches: p.matches(),
        window: p.window().copied().collect(),
    }
}

impl ProfileStore {
    pub fn new(
        players: BTreeMap<String, PlayerInfo>,
        batting: BTreeMap<String, BattingProfile>,
        bowling: BTreeMap<String, BowlingProfile>,
    ) -> Self {
        // rebuilt from window contents so that a stored copy reloads bit-identically
        fn canonical<R: ProfileRecord>(m: BTreeMap<String, PlayerProfile<R>>) -> BTreeMap<String, PlayerProfile<R>> {
            m.into_iter()
                .map(|(id, p)| {
                    let window = p.window().copied().collect();
                    let q = PlayerProfile::from_window(&id, window, p.n_seen(), p.matches());
                    (id, q)
                })
                .collect()
        }
        ProfileStore { players, batting: canonical(batting), bowling: canonical(bowling) }
    }

    pub fn players(&self) -> &BTreeMap<String, PlayerInfo> {
        &self.players
    }

    pub fn player(&self, id: &str) -> Option<&PlayerInfo> {
        self.players.get(id)
    }

    pub fn batting(&self, id: &str) -> Option<&BattingProfile> {
        self.batting.get(id)
    }

    pub fn bowling(&self, id: &str) -> Option<&BowlingProfile> {
        self.bowling.get(id)
    }

    pub fn batting_profiles(&self) -> impl Iterator<Item = &BattingProfile> {
        self.batting.values()
    }

    pub fn bowling_profiles(&self) -> impl Iterator<Item = &BowlingProfile> {
        self.bowling.values()
    }

    pub fn to_json(&self) -> String {
        let doc = StoredStore {
            taxonomy_version: TAXONOMY_VERSION,
            players: self
                .players
                .iter()
                .map(|(id, info)| {
                    (
                        id.clone(),
                        StoredPlayer {
                            info: info.clone(),
                            batting: self.batting.get(id).map(stored),
                            bowling: self.bowling.get(id).map(stored),
                        },
                    )
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("profile store serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, FeatureError> {
        let doc: StoredStore = serde_json::from_str(text)?;
        if doc.taxonomy_version != TAXONOMY_VERSION {
            return Err(FeatureError::VersionMismatch {
                expected: TAXONOMY_VERSION,
                found: doc.taxonomy_version,
            });
        }
        let mut store = ProfileStore::default();
        for (id, p) in doc.players {
            if let Some(b) = p.batting {
                store
                    .batting
                    .insert(id.clone(), PlayerProfile::from_window(&id, b.window, b.n_seen, b.matches));
            }
            if let Some(b) = p.bowling {
                store
                    .bowling
                    .insert(id.clone(), PlayerProfile::from_window(&id, b.window, b.n_seen, b.matches));
            }
            store.players.insert(id, p.info);
        }
        Ok(store)
    }

    pub fn save(&self, path: &Path) -> Result<(), FeatureError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, FeatureError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
