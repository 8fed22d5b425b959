//! Subcommands of the `shotzone` binary.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use shotzone_core::domain::ZoneId;
use shotzone_core::featurize::{build_features, export_feature_vectors, ProfileStore};
use shotzone_core::ingest::{corpus_digest, parse_corpus, synthesize, write_corpus, ArchetypeSet, Corpus, Role, SignalStrength};
use shotzone_core::models::{evaluate, load_bundle, save_bundle, train_model, EvalReport, ModelKind, TrainConfig, TrainingData};
use shotzone_core::simulate::{percent, Scenario, ScenarioGrid};
use shotzone_core::{Bundle, Real};

use crate::api::{self, ServiceConfig};
use crate::schema::api_document;
use crate::wire::{self, PredictBody, SimulateBody};

// println! panics when stdout is a closed pipe; this propagates the error instead.
macro_rules! out {
    ($($arg:tt)*) => {
        writeln!(std::io::stdout().lock(), $($arg)*)?
    };
}

#[derive(Debug, Parser)]
#[command(name = "shotzone", version, about = "Shot-zone prediction and what-if simulation for ball-by-ball cricket data")]
pub struct Cli {
    /// Output style for reports.
    #[arg(long, value_enum, global = true, default_value_t = Format::Table)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Signal {
    Low,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RoleArg {
    Batsman,
    Bowler,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a delivery file and write it back in canonical order.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic corpus with planted player tendencies.
    Synth(SynthArgs),
    /// Build rolling player profiles from a corpus.
    Featurize {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train one model of the ladder.
    Train(TrainArgs),
    /// Score bundles on a corpus: its held-out tail when it is the training corpus, otherwise all of it.
    Eval {
        #[arg(long = "bundle", required = true)]
        bundles: Vec<PathBuf>,
        #[arg(long)]
        corpus: PathBuf,
    },
    /// Predict the zone distribution of one scenario document.
    Predict {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        scenario: PathBuf,
        #[command(flatten)]
        lookup: Lookup,
    },
    /// Sweep a grid document and summarize every cell.
    Simulate {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        #[command(flatten)]
        lookup: Lookup,
    },
    /// Write per-player feature vectors for players with enough matches.
    ExportFeatures {
        #[arg(long, required_unless_present = "profiles", conflicts_with = "profiles")]
        corpus: Option<PathBuf>,
        #[arg(long)]
        profiles: Option<PathBuf>,
        #[arg(long, value_enum)]
        role: RoleArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long)]
        bundle: PathBuf,
        #[command(flatten)]
        lookup: Lookup,
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
        /// Directory of static UI assets served at `/`.
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
    },
    /// Print the HTTP request and response document.
    Schema,
}

#[derive(Debug, Args)]
pub struct Lookup {
    /// Profile store replacing the one inside the bundle.
    #[arg(long)]
    pub profiles: Option<PathBuf>,
    /// Predict for players missing from the profiles, using global means.
    #[arg(long)]
    pub allow_unknown: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Archetype document; generated from the counts below when absent.
    #[arg(long)]
    pub players: Option<PathBuf>,
    #[arg(long, default_value_t = 50_000)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub batsmen: usize,
    #[arg(long, default_value_t = 12)]
    pub bowlers: usize,
    #[arg(long, value_enum, default_value_t = Signal::High)]
    pub signal: Signal,
    /// Also write the archetypes used.
    #[arg(long)]
    pub write_players: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// naive, ffn, lstm or personalized-lstm.
    #[arg(long, value_parser = parse_kind, default_value = "personalized-lstm")]
    pub model: ModelKind,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Training settings document; flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 0.2)]
    pub holdout: f64,
    #[arg(long)]
    pub hidden: Option<usize>,
    #[arg(long)]
    pub head: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
}

fn parse_kind(s: &str) -> Result<ModelKind, String> {
    ModelKind::parse(s).ok_or_else(|| format!("unknown model `{s}`; expected naive, ffn, lstm or personalized-lstm"))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    serde_json::from_reader(BufReader::new(file)).with_context(|| format!("{} is not a valid document", path.display()))
}

fn read_corpus(path: &Path) -> Result<Corpus> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    parse_corpus(BufReader::new(file)).with_context(|| format!("{}", path.display()))
}

fn save_corpus(corpus: &Corpus, path: &Path) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut out = BufWriter::new(file);
    write_corpus(corpus, &mut out)?;
    out.flush()?;
    Ok(())
}

fn load(path: &Path, lookup: &Lookup) -> Result<Bundle> {
    let mut bundle = load_bundle::<Real>(path).with_context(|| format!("{}", path.display()))?;
    bundle.check_version()?;
    if let Some(p) = &lookup.profiles {
        bundle.profiles = ProfileStore::load(p).with_context(|| format!("{}", p.display()))?;
    }
    Ok(bundle)
}

fn structured<T: Serialize>(value: &T) -> Result<()> {
    out!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

#[derive(Serialize)]
struct CorpusSummary {
    deliveries: usize,
    matches: usize,
    players: usize,
    digest: String,
}

fn corpus_summary(c: &Corpus) -> CorpusSummary {
    CorpusSummary {
        deliveries: c.len(),
        matches: c.match_ranges().len(),
        players: c.players().len(),
        digest: corpus_digest(c),
    }
}

fn print_summary(format: Format, s: &CorpusSummary) -> Result<()> {
    match format {
        Format::Structured => structured(s),
        Format::Table => {
            out!("deliveries\t{}\nmatches\t{}\nplayers\t{}\ndigest\t{}", s.deliveries, s.matches, s.players, s.digest);
            Ok(())
        }
    }
}

fn print_predict(b: &PredictBody) -> Result<()> {
    out!("{} ({}) vs {} ({}-arm {:?})", b.batsman_id, b.batsman_hand.code(), b.bowler_id, b.bowler_hand.code(), b.bowler_style);
    out!("zone\tprobability");
    for z in ZoneId::all() {
        out!("{}\t{:.4}", z.name(), b.distribution.0.get(z));
    }
    let s = &b.summary;
    out!(
        "defensive {}  rotate {}  attack {}  deflect {}",
        percent(s.p_defensive),
        percent(s.p_rotate),
        percent(s.p_attack),
        percent(s.p_deflect)
    );
    if let (Some(off), Some(leg)) = (s.off_side_share, s.leg_side_share) {
        out!("off side {}  leg side {}", percent(off), percent(leg));
    }
    Ok(())
}

#[derive(Serialize)]
struct EvalRow {
    bundle: String,
    split: &'static str,
    #[serde(flatten)]
    report: EvalReport,
}

fn eval_one(bundle: &Bundle, corpus: &Corpus, digest: &str) -> Result<(&'static str, EvalReport)> {
    if bundle.manifest.corpus_digest == digest {
        let data = TrainingData::new(corpus, bundle.manifest.holdout_fraction)?;
        Ok(("held-out", evaluate(bundle, &data.test_frames())?))
    } else {
        let (table, _) = build_features(corpus, &bundle.globals);
        Ok(("full", evaluate(bundle, &table.labelled_frames(0..table.len()))?))
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let format = cli.format;
    match cli.command {
        Command::Ingest { input, out } => {
            let corpus = read_corpus(&input)?;
            if let Some(out) = out {
                save_corpus(&corpus, &out)?;
            }
            print_summary(format, &corpus_summary(&corpus))
        }
        Command::Synth(a) => {
            let set = match &a.players {
                Some(p) => read_json::<ArchetypeSet>(p)?,
                None => {
                    let signal = match a.signal {
                        Signal::Low => SignalStrength::Low,
                        Signal::High => SignalStrength::High,
                    };
                    ArchetypeSet::generate(a.batsmen, a.bowlers, signal, a.seed)
                }
            };
            let corpus = synthesize(&set, a.n, a.seed)?;
            save_corpus(&corpus, &a.out)?;
            if let Some(p) = &a.write_players {
                std::fs::write(p, serde_json::to_string_pretty(&set)?).with_context(|| format!("cannot write {}", p.display()))?;
            }
            print_summary(format, &corpus_summary(&corpus))
        }
        Command::Featurize { corpus, out } => {
            let corpus = read_corpus(&corpus)?;
            let globals = shotzone_core::featurize::GlobalStats::from_deliveries(corpus.deliveries());
            let (_, store) = build_features(&corpus, &globals);
            store.save(&out).with_context(|| format!("cannot write {}", out.display()))?;
            let counts = serde_json::json!({
                "players": store.players().len(),
                "batting_profiles": store.batting_profiles().count(),
                "bowling_profiles": store.bowling_profiles().count(),
            });
            match format {
                Format::Structured => structured(&counts),
                Format::Table => {
                    for (k, v) in counts.as_object().expect("object") {
                        out!("{k}\t{v}");
                    }
                    Ok(())
                }
            }
        }
        Command::Train(a) => {
            let mut config: TrainConfig = match &a.config {
                Some(p) => read_json(p)?,
                None => TrainConfig::default(),
            };
            if let Some(h) = a.hidden {
                config.hidden = h;
            }
            if let Some(h) = a.head {
                config.head = h;
            }
            if let Some(e) = a.epochs {
                config.max_epochs = e;
            }
            let corpus = read_corpus(&a.corpus)?;
            let data = TrainingData::new(&corpus, a.holdout)?;
            let bundle = train_model::<Real>(a.model, &data, &config, a.seed)?;
            save_bundle(&bundle, &a.out).with_context(|| format!("cannot write {}", a.out.display()))?;
            let report = evaluate(&bundle, &data.test_frames())?;
            match format {
                Format::Structured => structured(&serde_json::json!({"manifest": bundle.manifest, "test": report})),
                Format::Table => {
                    let m = &bundle.manifest;
                    out!("epochs run {} (best {}), {} training frames", m.epochs_run, m.best_epoch, m.n_train_frames);
                    out!("{}", EvalReport::TABLE_HEADER);
                    out!("{}", report.table_row());
                    Ok(())
                }
            }
        }
        Command::Eval { bundles, corpus } => {
            let c = read_corpus(&corpus)?;
            let digest = corpus_digest(&c);
            let mut rows = Vec::new();
            for path in &bundles {
                let bundle = load(path, &Lookup { profiles: None, allow_unknown: false })?;
                let (split, report) = eval_one(&bundle, &c, &digest)?;
                rows.push(EvalRow { bundle: path.display().to_string(), split, report });
            }
            match format {
                Format::Structured => structured(&rows),
                Format::Table => {
                    out!("{}\tsplit", EvalReport::TABLE_HEADER);
                    for r in &rows {
                        out!("{}\t{}", r.report.table_row(), r.split);
                    }
                    Ok(())
                }
            }
        }
        Command::Predict { bundle, scenario, lookup } => {
            let bundle = load(&bundle, &lookup)?;
            let value: serde_json::Value = read_json(&scenario)?;
            let mut s: Scenario = wire::parse_scenario(wire::strip_taxonomy(value)).map_err(field_errors)?;
            s.allow_unknown |= lookup.allow_unknown;
            let body = wire::predict_body(&bundle, &s)?;
            match format {
                Format::Structured => structured(&body),
                Format::Table => {
                    print_predict(&body)?;
                    Ok(())
                }
            }
        }
        Command::Simulate { bundle, grid, lookup } => {
            let bundle = load(&bundle, &lookup)?;
            let value: serde_json::Value = read_json(&grid)?;
            let mut g: ScenarioGrid = wire::parse_grid(wire::strip_taxonomy(value)).map_err(field_errors)?;
            g.base.allow_unknown |= lookup.allow_unknown;
            let report = shotzone_core::simulate::sweep_report(&bundle, &g)?;
            match format {
                Format::Structured => structured(&SimulateBody::new(&bundle, report)),
                Format::Table => {
                    write!(std::io::stdout().lock(), "{}", report.to_table())?;
                    Ok(())
                }
            }
        }
        Command::ExportFeatures { corpus, profiles, role, out } => {
            let store = match (corpus, profiles) {
                (_, Some(p)) => ProfileStore::load(&p).with_context(|| format!("{}", p.display()))?,
                (Some(c), None) => {
                    let c = read_corpus(&c)?;
                    let globals = shotzone_core::featurize::GlobalStats::from_deliveries(c.deliveries());
                    build_features(&c, &globals).1
                }
                (None, None) => bail!("either --corpus or --profiles is required"),
            };
            let role = match role {
                RoleArg::Batsman => Role::Batsman,
                RoleArg::Bowler => Role::Bowler,
            };
            let table = export_feature_vectors(&store, role);
            match out {
                Some(p) => {
                    let file = File::create(&p).with_context(|| format!("cannot create {}", p.display()))?;
                    table.write_csv(BufWriter::new(file))?;
                }
                None => table.write_csv(std::io::stdout().lock())?,
            }
            Ok(())
        }
        Command::Serve { bundle, lookup, bind, static_dir } => {
            let config = ServiceConfig {
                bundle_path: bundle,
                profiles_path: lookup.profiles,
                bind,
                allow_unknown: lookup.allow_unknown,
                static_dir,
            };
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(api::serve(config))
        }
        Command::Schema => structured(&api_document()),
    }
}

fn field_errors(errors: Vec<wire::FieldError>) -> anyhow::Error {
    let list: Vec<String> = errors.iter().map(|e| format!("{}: {}", e.field, e.message)).collect();
    anyhow::anyhow!("invalid document: {}", list.join("; "))
}
