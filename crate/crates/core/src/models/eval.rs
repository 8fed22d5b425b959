use serde::Serialize;

use super::bundle::ModelBundle;
use super::ModelError;
use crate::domain::{exact_sum, ZoneDistribution, ZoneId};
use crate::featurize::FeatureFrame;
use crate::nn::Scalar;

/// Probabilities below this are raised to it inside the log loss.
pub const PROB_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub model: String,
    pub n_deliveries: usize,
    pub accuracy: f64,
    pub log_loss: f64,
    /// Rows are observed zones, columns predicted zones.
    pub confusion: Vec<Vec<u64>>,
}

impl EvalReport {
    pub const TABLE_HEADER: &'static str = "model\taccuracy\tlog_loss\tn";

    pub fn table_row(&self) -> String {
        format!("{}\t{:.4}\t{:.4}\t{}", self.model, self.accuracy, self.log_loss, self.n_deliveries)
    }
}

/// Scores any predictor over the labelled frames; unlabelled frames are skipped.
pub fn evaluate_with<F>(model: &str, frames: &[FeatureFrame], mut predict: F) -> Result<EvalReport, ModelError>
where
    F: FnMut(&FeatureFrame) -> Result<ZoneDistribution, ModelError>,
{
    let mut confusion = vec![vec![0u64; ZoneId::COUNT]; ZoneId::COUNT];
    let mut losses = Vec::with_capacity(frames.len());
    for f in frames {
        let Some(target) = f.target else { continue };
        let dist = predict(f)?;
        confusion[target.index()][dist.argmax().index()] += 1;
        losses.push(-dist.get(target).max(PROB_FLOOR).ln());
    }
    let n = losses.len();
    let correct: u64 = (0..ZoneId::COUNT).map(|k| confusion[k][k]).sum();
    let (accuracy, log_loss) = if n == 0 { (0.0, 0.0) } else { (correct as f64 / n as f64, exact_sum(losses) / n as f64) };
    Ok(EvalReport { model: model.to_string(), n_deliveries: n, accuracy, log_loss, confusion })
}

pub fn evaluate<S: Scalar>(bundle: &ModelBundle<S>, frames: &[FeatureFrame]) -> Result<EvalReport, ModelError> {
    let mut predictor = bundle.predictor()?;
    evaluate_with(bundle.kind.name(), frames, |f| predictor.predict(f))
}
