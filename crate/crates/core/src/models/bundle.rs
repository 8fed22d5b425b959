use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::{ModelError, ModelKind, TrainConfig};
use crate::domain::{ZoneDistribution, ZoneId, TAXONOMY_VERSION};
use crate::featurize::{FeatureFrame, GlobalStats, ProfileStore, AUX_LEN, CONTEXT_LEN, LOOKBACK};
use crate::nn::{NetInput, Network, Scalar, Workspace};

/// Standardized values are `(x - mean) / std`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub context_mean: Vec<f64>,
    pub context_std: Vec<f64>,
    pub aux_mean: Vec<f64>,
    pub aux_std: Vec<f64>,
}

pub const STD_FLOOR: f64 = 1e-6;

fn moments<'a>(rows: impl Iterator<Item = &'a [f64]>, width: usize) -> (Vec<f64>, Vec<f64>) {
    let mut n = 0usize;
    let mut mean = vec![0.0; width];
    let mut m2 = vec![0.0; width];
    for row in rows {
        n += 1;
        for k in 0..width {
            let delta = row[k] - mean[k];
            mean[k] += delta / n as f64;
            m2[k] += delta * (row[k] - mean[k]);
        }
    }
    let std = m2
        .iter()
        .map(|v| if n > 0 { (v / n as f64).sqrt().max(STD_FLOOR) } else { 1.0 })
        .collect();
    (mean, std)
}

impl Standardizer {
    pub fn identity() -> Self {
        Standardizer {
            context_mean: vec![0.0; CONTEXT_LEN],
            context_std: vec![1.0; CONTEXT_LEN],
            aux_mean: vec![0.0; AUX_LEN],
            aux_std: vec![1.0; AUX_LEN],
        }
    }

    /// Fitted on the current-delivery context and aux vectors of `frames`.
    pub fn fit(frames: &[FeatureFrame]) -> Self {
        let (context_mean, context_std) = moments(frames.iter().map(|f| &f.sequence[LOOKBACK - 1].0[..]), CONTEXT_LEN);
        let (aux_mean, aux_std) = moments(frames.iter().map(|f| &f.aux.0[..]), AUX_LEN);
        Standardizer { context_mean, context_std, aux_mean, aux_std }
    }

    pub fn is_valid(&self) -> bool {
        self.context_mean.len() == CONTEXT_LEN
            && self.context_std.len() == CONTEXT_LEN
            && self.aux_mean.len() == AUX_LEN
            && self.aux_std.len() == AUX_LEN
            && self.context_std.iter().chain(&self.aux_std).all(|s| *s >= STD_FLOOR)
    }

    /// Network input for a frame: the unmasked steps, then the aux vector.
    pub fn encode<S: Scalar>(&self, frame: &FeatureFrame, steps: &mut Vec<S>, aux: &mut Vec<S>) {
        steps.clear();
        for (ctx, &masked) in frame.sequence.iter().zip(&frame.mask) {
            if !masked {
                steps.extend(
                    ctx.0
                        .iter()
                        .zip(&self.context_mean)
                        .zip(&self.context_std)
                        .map(|((x, m), s)| S::lit((x - m) / s)),
                );
            }
        }
        aux.clear();
        aux.extend(
            frame
                .aux
                .0
                .iter()
                .zip(&self.aux_mean)
                .zip(&self.aux_std)
                .map(|((x, m), s)| S::lit((x - m) / s)),
        );
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationMetrics {
    pub n: usize,
    pub accuracy: f64,
    pub log_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub kind: ModelKind,
    pub seed: u64,
    pub config: TrainConfig,
    pub epochs_run: usize,
    pub best_epoch: usize,
    pub corpus_digest: String,
    pub holdout_fraction: f64,
    pub train_start: Option<NaiveDate>,
    pub train_end: Option<NaiveDate>,
    /// First held-out delivery of the training corpus, as (date, match id).
    pub test_start: Option<(NaiveDate, String)>,
    pub n_train_frames: usize,
    pub n_validation_frames: usize,
    pub validation: Option<ValidationMetrics>,
}

/// Everything needed to predict: parameters, input scaling, blending means and
/// the player profiles known at training time.
#[derive(Debug, Clone)]
pub struct ModelBundle<S> {
    pub kind: ModelKind,
    pub taxonomy_version: u32,
    pub network: Option<Network<S>>,
    /// Class proportions of the naive model.
    pub class_prior: Option<[f64; ZoneId::COUNT]>,
    pub standardizer: Standardizer,
    pub globals: GlobalStats,
    pub profiles: ProfileStore,
    pub manifest: Manifest,
}

impl<S: Scalar> ModelBundle<S> {
    pub fn check_version(&self) -> Result<(), ModelError> {
        if self.taxonomy_version != TAXONOMY_VERSION {
            return Err(ModelError::VersionMismatch { bundle: self.taxonomy_version, runtime: TAXONOMY_VERSION });
        }
        Ok(())
    }

    pub fn predictor(&self) -> Result<Predictor<'_, S>, ModelError> {
        self.check_version()?;
        Ok(Predictor { bundle: self, ws: Workspace::default(), steps: Vec::new(), aux: Vec::new() })
    }

    pub fn predict(&self, frame: &FeatureFrame) -> Result<ZoneDistribution, ModelError> {
        self.predictor()?.predict(frame)
    }
}

/// A bundle with reusable buffers, for predicting many frames.
pub struct Predictor<'a, S> {
    bundle: &'a ModelBundle<S>,
    ws: Workspace<S>,
    steps: Vec<S>,
    aux: Vec<S>,
}

impl<S: Scalar> Predictor<'_, S> {
    pub fn predict(&mut self, frame: &FeatureFrame) -> Result<ZoneDistribution, ModelError> {
        let b = self.bundle;
        if let Some(prior) = &b.class_prior {
            return Ok(ZoneDistribution::new(*prior)?);
        }
        let net = b.network.as_ref().ok_or_else(|| ModelError::Format("bundle has neither network nor prior".into()))?;
        b.standardizer.encode(frame, &mut self.steps, &mut self.aux);
        let logits = net.logits(&NetInput { steps: &self.steps, aux: &self.aux }, &mut self.ws)?;
        let wide: Vec<f64> = logits.iter().map(|v| v.as_f64()).collect();
        Ok(ZoneDistribution::from_logits(&wide))
    }
}
