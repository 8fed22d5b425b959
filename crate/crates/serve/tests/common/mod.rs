use std::path::Path;

use shotzone_core::ingest::{synthesize, ArchetypeSet, SignalStrength};
use shotzone_core::models::{save_bundle, train_model, ModelKind, TrainConfig, TrainingData};
use shotzone_core::Real;

/// Archetype seed whose set has one left-arm seamer (W03) among twelve bowlers.
pub const SEED: u64 = 2;

/// Trains a small bundle on a synthetic corpus and writes it to `path`.
pub fn write_bundle(path: &Path, train_seed: u64) {
    let set = ArchetypeSet::generate(20, 12, SignalStrength::High, SEED);
    let corpus = synthesize(&set, 6_000, SEED).unwrap();
    let data = TrainingData::new(&corpus, 0.2).unwrap();
    let config = TrainConfig { hidden: 6, head: 6, max_epochs: 1, batch_size: 128, ..TrainConfig::default() };
    let bundle = train_model::<Real>(ModelKind::PersonalizedLstm, &data, &config, train_seed).unwrap();
    save_bundle(&bundle, path).unwrap();
}
