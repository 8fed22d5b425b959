//! Trains the four models on a synthetic corpus and prints one row per model.
//!
//! `cargo run --release --example ladder -- [deliveries] [seed] [hidden] [epochs]`

use std::time::Instant;

use shotzone_core::ingest::{synthesize, ArchetypeSet, SignalStrength};
use shotzone_core::models::{evaluate, train_model, EvalReport, ModelKind, TrainConfig, TrainingData};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, d: usize| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let (n, seed, hidden, epochs) = (arg(0, 50_000), arg(1, 1) as u64, arg(2, 32), arg(3, 16));
    let set = ArchetypeSet::generate(20, 12, SignalStrength::High, seed);
    let corpus = synthesize(&set, n, seed)?;
    let data = TrainingData::new(&corpus, 0.2)?;
    let test = data.test_frames();
    let config = TrainConfig { hidden, head: hidden, max_epochs: epochs, ..TrainConfig::default() };
    println!("{}", EvalReport::TABLE_HEADER);
    for kind in ModelKind::ALL {
        let t = Instant::now();
        let bundle = train_model::<f32>(kind, &data, &config, seed)?;
        let report = evaluate(&bundle, &test)?;
        println!("{}\t{:.1}s\tepochs {}", report.table_row(), t.elapsed().as_secs_f64(), bundle.manifest.epochs_run);
    }
    Ok(())
}
