//! The model ladder: naive prior, feed-forward, LSTM and personalized LSTM,
//! with chronological splitting, training, evaluation and bundle persistence.

mod bundle;
mod eval;
mod io;
mod split;
mod train;

pub use bundle::{Manifest, ModelBundle, Predictor, Standardizer, ValidationMetrics, STD_FLOOR};
pub use eval::{evaluate, evaluate_with, EvalReport, PROB_FLOOR};
pub use io::{decode_bundle, encode_bundle, load_bundle, save_bundle, BUNDLE_FORMAT_VERSION, BUNDLE_MAGIC};
pub use split::{split_chronological, Split};
pub use train::{class_proportions, fit_network, train_model, Fitted, TrainingData};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::DomainError;
use crate::nn::{NnError, Topology};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("training diverged in epoch {epoch}: non-finite loss or parameters")]
    Divergence { epoch: usize },
    #[error("bundle uses taxonomy version {bundle}, this build uses {runtime}")]
    VersionMismatch { bundle: u32, runtime: u32 },
    #[error("unreadable bundle: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Naive,
    Ffn,
    Lstm,
    PersonalizedLstm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Naive, ModelKind::Ffn, ModelKind::Lstm, ModelKind::PersonalizedLstm];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Naive => "naive",
            ModelKind::Ffn => "ffn",
            ModelKind::Lstm => "lstm",
            ModelKind::PersonalizedLstm => "personalized-lstm",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s.trim().to_ascii_lowercase())
    }

    pub fn topology(self) -> Option<Topology> {
        match self {
            ModelKind::Naive => None,
            ModelKind::Ffn => Some(Topology::FeedForward),
            ModelKind::Lstm => Some(Topology::Lstm),
            ModelKind::PersonalizedLstm => Some(Topology::PersonalizedLstm),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub hidden: usize,
    pub layers: usize,
    pub head: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    /// Share of training deliveries, latest matches first, used for early stopping.
    pub validation_fraction: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            hidden: 64,
            layers: 2,
            head: 64,
            learning_rate: 1e-3,
            batch_size: 256,
            max_epochs: 30,
            patience: 3,
            validation_fraction: 0.1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: &str| Err(ModelError::Config(m.to_string()));
        if self.hidden == 0 || self.head == 0 || self.layers == 0 {
            return bad("layer sizes and depth must be positive");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning rate must be positive");
        }
        if self.batch_size == 0 {
            return bad("batch size must be positive");
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return bad("validation fraction must be in [0, 1)");
        }
        Ok(())
    }
}
