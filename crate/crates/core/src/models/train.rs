use std::ops::Range;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::bundle::{Manifest, ModelBundle, Standardizer, ValidationMetrics};
use super::eval::evaluate_with;
use super::split::{split_chronological, split_ranges, Split};
use super::{ModelError, ModelKind, TrainConfig};
use crate::domain::{ZoneDistribution, ZoneId, TAXONOMY_VERSION};
use crate::featurize::{build_features, FeatureFrame, FeatureTable, GlobalStats, ProfileStore, AUX_LEN, CONTEXT_LEN};
use crate::ingest::{corpus_digest, Corpus};
use crate::nn::{Adam, AdamConfig, NetInput, NetShape, Network, Scalar, Workspace};

/// A corpus featurized once for training and evaluation. Global means come
/// from the training side of the split only.
#[derive(Debug, Clone)]
pub struct TrainingData {
    pub table: FeatureTable,
    pub profiles: ProfileStore,
    pub globals: GlobalStats,
    pub split: Split,
    pub holdout_fraction: f64,
    pub digest: String,
    matches: Vec<Range<usize>>,
    keys: Vec<(chrono::NaiveDate, String)>,
}

impl TrainingData {
    pub fn new(corpus: &Corpus, holdout_fraction: f64) -> Result<Self, ModelError> {
        let split = split_chronological(corpus, holdout_fraction)?;
        let globals = GlobalStats::from_deliveries(&corpus.deliveries()[split.train.clone()]);
        let (table, profiles) = build_features(corpus, &globals);
        let matches = corpus.match_ranges();
        let keys = matches
            .iter()
            .map(|r| {
                let d = &corpus.deliveries()[r.start];
                (d.date, d.match_id.clone())
            })
            .collect();
        Ok(TrainingData {
            table,
            profiles,
            globals,
            split,
            holdout_fraction,
            digest: corpus_digest(corpus),
            matches,
            keys,
        })
    }

    pub fn train_frames(&self) -> Vec<FeatureFrame> {
        self.table.labelled_frames(self.split.train.clone())
    }

    pub fn test_frames(&self) -> Vec<FeatureFrame> {
        self.table.labelled_frames(self.split.test.clone())
    }

    /// The last `fraction` of the training matches, for early stopping.
    pub fn validation_split(&self, fraction: f64) -> (Range<usize>, Range<usize>) {
        let train: Vec<Range<usize>> = self.matches.iter().filter(|r| r.end <= self.split.train.end).cloned().collect();
        if fraction <= 0.0 {
            return (self.split.train.clone(), self.split.train.end..self.split.train.end);
        }
        match split_ranges(&train, self.split.train.end, fraction) {
            Ok(s) => (s.train, s.test),
            Err(_) => (self.split.train.clone(), self.split.train.end..self.split.train.end),
        }
    }

    fn key_at(&self, index: usize) -> Option<(chrono::NaiveDate, String)> {
        self.matches.iter().position(|r| r.contains(&index)).map(|k| self.keys[k].clone())
    }
}

/// Empirical class proportions of the labelled frames.
pub fn class_proportions(frames: &[FeatureFrame]) -> [f64; ZoneId::COUNT] {
    let mut counts = [0u64; ZoneId::COUNT];
    for f in frames {
        if let Some(t) = f.target {
            counts[t.index()] += 1;
        }
    }
    let n: u64 = counts.iter().sum();
    let mut p = [0.0; ZoneId::COUNT];
    if n == 0 {
        return ZoneDistribution::uniform().probs().to_owned();
    }
    for (pi, c) in p.iter_mut().zip(counts) {
        *pi = c as f64 / n as f64;
    }
    p
}

/// Frames converted to network inputs once.
struct Encoded<S> {
    steps: Vec<S>,
    spans: Vec<Range<usize>>,
    aux: Vec<S>,
    targets: Vec<usize>,
}

impl<S: Scalar> Encoded<S> {
    fn new(frames: &[FeatureFrame], standardizer: &Standardizer) -> Self {
        let mut out = Encoded { steps: Vec::new(), spans: Vec::new(), aux: Vec::new(), targets: Vec::new() };
        let (mut s, mut a) = (Vec::new(), Vec::new());
        for f in frames {
            let Some(t) = f.target else { continue };
            standardizer.encode::<S>(f, &mut s, &mut a);
            let start = out.steps.len();
            out.steps.extend_from_slice(&s);
            out.spans.push(start..out.steps.len());
            out.aux.extend_from_slice(&a);
            out.targets.push(t.index());
        }
        out
    }

    fn input(&self, i: usize) -> NetInput<'_, S> {
        NetInput { steps: &self.steps[self.spans[i].clone()], aux: &self.aux[i * AUX_LEN..(i + 1) * AUX_LEN] }
    }

    fn len(&self) -> usize {
        self.targets.len()
    }
}

fn metrics<S: Scalar>(net: &Network<S>, standardizer: &Standardizer, frames: &[FeatureFrame]) -> Result<ValidationMetrics, ModelError> {
    let mut ws = Workspace::default();
    let (mut steps, mut aux) = (Vec::new(), Vec::new());
    let report = evaluate_with("validation", frames, |f| {
        standardizer.encode::<S>(f, &mut steps, &mut aux);
        let logits = net.logits(&NetInput { steps: &steps, aux: &aux }, &mut ws)?;
        let wide: Vec<f64> = logits.iter().map(|v| v.as_f64()).collect();
        Ok(ZoneDistribution::from_logits(&wide))
    })?;
    Ok(ValidationMetrics { n: report.n_deliveries, accuracy: report.accuracy, log_loss: report.log_loss })
}

pub struct Fitted<S> {
    pub network: Network<S>,
    pub standardizer: Standardizer,
    pub epochs_run: usize,
    pub best_epoch: usize,
    pub validation: Option<ValidationMetrics>,
}

/// Mini-batch training with early stopping on validation log loss. The
/// returned network is the best one seen, the untrained one included.
pub fn fit_network<S: Scalar>(
    kind: ModelKind,
    train: &[FeatureFrame],
    validation: &[FeatureFrame],
    config: &TrainConfig,
    seed: u64,
) -> Result<Fitted<S>, ModelError> {
    config.validate()?;
    let topology = kind.topology().ok_or_else(|| ModelError::Config("the naive model has no network".into()))?;
    if !train.iter().any(|f| f.target.is_some()) {
        return Err(ModelError::Config("no labelled training frames".into()));
    }
    let standardizer = Standardizer::fit(train);
    let data = Encoded::<S>::new(train, &standardizer);
    let shape = NetShape {
        context: CONTEXT_LEN,
        aux: AUX_LEN,
        hidden: config.hidden,
        layers: config.layers,
        head: config.head,
        classes: ZoneId::COUNT,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = Network::<S>::new(topology, shape, &mut rng);
    let mut grad = net.zeros_like();
    let sizes: Vec<usize> = net.blocks().iter().map(|(_, b)| b.len()).collect();
    let mut adam = Adam::<S>::new(AdamConfig { lr: config.learning_rate, ..AdamConfig::default() }, &sizes);
    let mut ws = Workspace::default();
    let mut order: Vec<usize> = (0..data.len()).collect();

    let has_validation = validation.iter().any(|f| f.target.is_some());
    let mut best = if has_validation { Some(metrics(&net, &standardizer, validation)?) } else { None };
    let mut best_net = net.clone();
    let (mut best_epoch, mut since_best, mut epochs_run) = (0, 0, 0);

    for epoch in 1..=config.max_epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(config.batch_size) {
            grad.fill_zero();
            let mut loss = S::zero();
            for &i in chunk {
                loss += net.accumulate_gradient(&data.input(i), data.targets[i], &mut ws, &mut grad)?;
            }
            if !loss.is_finite() {
                return Err(ModelError::Divergence { epoch });
            }
            let scale = S::one() / S::lit(chunk.len() as f64);
            for block in grad.blocks_mut() {
                block.iter_mut().for_each(|g| *g *= scale);
            }
            let grads: Vec<&[S]> = grad.blocks().into_iter().map(|(_, b)| b).collect();
            adam.step(&mut net.blocks_mut(), &grads)?;
        }
        if !net.all_finite() {
            return Err(ModelError::Divergence { epoch });
        }
        epochs_run = epoch;
        if has_validation {
            let m = metrics(&net, &standardizer, validation)?;
            if m.log_loss < best.map_or(f64::INFINITY, |b| b.log_loss) {
                best = Some(m);
                best_net = net.clone();
                best_epoch = epoch;
                since_best = 0;
            } else {
                since_best += 1;
                if since_best >= config.patience {
                    break;
                }
            }
        } else {
            best_net = net.clone();
            best_epoch = epoch;
        }
    }
    Ok(Fitted { network: best_net, standardizer, epochs_run, best_epoch, validation: best })
}

/// Trains one rung of the ladder on the training side of `data`.
pub fn train_model<S: Scalar>(kind: ModelKind, data: &TrainingData, config: &TrainConfig, seed: u64) -> Result<ModelBundle<S>, ModelError> {
    config.validate()?;
    let (fit_range, val_range) = data.validation_split(config.validation_fraction);
    let fit_frames = data.table.labelled_frames(fit_range.clone());
    let val_frames = data.table.labelled_frames(val_range.clone());
    let mut manifest = Manifest {
        kind,
        seed,
        config: config.clone(),
        epochs_run: 0,
        best_epoch: 0,
        corpus_digest: data.digest.clone(),
        holdout_fraction: data.holdout_fraction,
        train_start: data.key_at(0).map(|k| k.0),
        train_end: data.split.train.end.checked_sub(1).and_then(|i| data.key_at(i)).map(|k| k.0),
        test_start: data.key_at(data.split.test.start),
        n_train_frames: fit_frames.len(),
        n_validation_frames: val_frames.len(),
        validation: None,
    };
    let (network, class_prior, standardizer) = match kind {
        ModelKind::Naive => {
            let mut all = fit_frames;
            all.extend(val_frames);
            manifest.n_train_frames = all.len();
            manifest.n_validation_frames = 0;
            (None, Some(class_proportions(&all)), Standardizer::identity())
        }
        _ => {
            let fitted = fit_network::<S>(kind, &fit_frames, &val_frames, config, seed)?;
            manifest.epochs_run = fitted.epochs_run;
            manifest.best_epoch = fitted.best_epoch;
            manifest.validation = fitted.validation;
            (Some(fitted.network), None, fitted.standardizer)
        }
    };
    Ok(ModelBundle {
        kind,
        taxonomy_version: TAXONOMY_VERSION,
        network,
        class_prior,
        standardizer,
        globals: data.globals.clone(),
        profiles: data.profiles.clone(),
        manifest,
    })
}
