//! Request parsing and response bodies shared by the CLI and the service.

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use serde_json::Value;

use shotzone_core::domain::{BowlingAngle, Handedness, ZoneDistribution, ZoneId, TAXONOMY_VERSION};
use shotzone_core::ingest::BowlerStyle;
use shotzone_core::models::{ModelBundle, ModelKind};
use shotzone_core::nn::Scalar;
use shotzone_core::simulate::{
    resolve, summarize, sweep_report, LengthSpec, LineSpec, PhaseDelta, Resolved, Scenario, ScenarioGrid, SimError,
    SweepReport, TacticalSummary,
};

/// Zone probabilities keyed by zone name, in zone id order.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedDistribution(pub ZoneDistribution);

impl Serialize for NamedDistribution {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(ZoneId::COUNT))?;
        for z in ZoneId::all() {
            map.serialize_entry(&z.name(), &self.0.get(z))?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelInfo {
    pub kind: ModelKind,
    pub taxonomy_version: u32,
    pub seed: u64,
    pub corpus_digest: String,
}

impl ModelInfo {
    pub fn of<S: Scalar>(bundle: &ModelBundle<S>) -> Self {
        ModelInfo {
            kind: bundle.kind,
            taxonomy_version: bundle.taxonomy_version,
            seed: bundle.manifest.seed,
            corpus_digest: bundle.manifest.corpus_digest.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PredictBody {
    pub batsman_id: String,
    pub bowler_id: String,
    /// Zones are relative to this batsman; left-handers see mirrored field labels.
    pub batsman_hand: Handedness,
    pub bowler_hand: Handedness,
    pub bowler_style: BowlerStyle,
    pub distribution: NamedDistribution,
    pub summary: TacticalSummary,
    pub model: ModelInfo,
}

impl PredictBody {
    pub fn new<S: Scalar>(bundle: &ModelBundle<S>, scenario: &Scenario, resolved: &Resolved, dist: ZoneDistribution) -> Self {
        PredictBody {
            batsman_id: scenario.batsman_id.clone(),
            bowler_id: scenario.bowler_id.clone(),
            batsman_hand: resolved.batsman_hand,
            bowler_hand: resolved.bowler_hand,
            bowler_style: resolved.bowler_style,
            summary: summarize(&dist),
            distribution: NamedDistribution(dist),
            model: ModelInfo::of(bundle),
        }
    }
}

/// Resolves and predicts one scenario.
pub fn predict_body<S: Scalar>(bundle: &ModelBundle<S>, scenario: &Scenario) -> Result<PredictBody, SimError> {
    bundle.check_version()?;
    let resolved = resolve(&bundle.profiles, &bundle.globals, scenario)?;
    let dist = bundle.predict(&resolved.frame)?;
    Ok(PredictBody::new(bundle, scenario, &resolved, dist))
}

/// Predicts and summarizes every cell of a grid.
pub fn simulate_body<S: Scalar>(bundle: &ModelBundle<S>, grid: &ScenarioGrid) -> Result<SimulateBody, SimError> {
    Ok(SimulateBody::new(bundle, sweep_report(bundle, grid)?))
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateRow {
    pub bowler_id: String,
    pub bowler_hand: Handedness,
    pub angle: BowlingAngle,
    /// "0-9" or ">60" when the grid sweeps batsman phase.
    pub phase: Option<&'static str>,
    pub line: LineSpec,
    pub length: LengthSpec,
    pub summary: TacticalSummary,
    pub distribution: NamedDistribution,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateBody {
    pub n_rows: usize,
    pub rows: Vec<SimulateRow>,
    pub phase_deltas: Vec<PhaseDelta>,
    pub model: ModelInfo,
}

impl SimulateBody {
    pub fn new<S: Scalar>(bundle: &ModelBundle<S>, report: SweepReport) -> Self {
        let rows: Vec<SimulateRow> = report
            .rows
            .into_iter()
            .map(|r| SimulateRow {
                bowler_id: r.bowler_id,
                bowler_hand: r.bowler_hand,
                angle: r.angle,
                phase: r.phase.map(|p| p.label()),
                line: r.line,
                length: r.length,
                summary: r.summary,
                distribution: NamedDistribution(r.distribution),
            })
            .collect();
        SimulateBody { n_rows: rows.len(), rows, phase_deltas: report.phase_deltas, model: ModelInfo::of(bundle) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        FieldError { field: field.into(), message: message.into() }
    }
}

fn join(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.to_string()
    } else {
        format!("{prefix}.{name}")
    }
}

fn required(obj: &serde_json::Map<String, Value>, prefix: &str, names: &[&str], errors: &mut Vec<FieldError>) {
    for name in names {
        if obj.get(*name).is_none_or(Value::is_null) {
            errors.push(FieldError::new(join(prefix, name), "required"));
        }
    }
}

fn check_scenario_fields(value: &Value, prefix: &str, errors: &mut Vec<FieldError>) {
    let Some(obj) = value.as_object() else {
        errors.push(FieldError::new(if prefix.is_empty() { "body" } else { prefix }, "expected an object"));
        return;
    };
    required(obj, prefix, &["batsman_id", "bowler_id", "delivery"], errors);
    if let Some(d) = obj.get("delivery").filter(|d| !d.is_null()) {
        match d.as_object() {
            Some(d) => required(d, &join(prefix, "delivery"), &["line", "length"], errors),
            None => errors.push(FieldError::new(join(prefix, "delivery"), "expected an object")),
        }
    }
}

fn typed<T: serde::de::DeserializeOwned>(value: Value, prefix: &str) -> Result<T, Vec<FieldError>> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let field = match (prefix, path.as_str()) {
            (p, ".") => if p.is_empty() { "body".to_string() } else { p.to_string() },
            (_, path) => path.to_string(),
        };
        vec![FieldError::new(field, e.into_inner().to_string())]
    })
}

/// A scenario document, with every missing required field listed.
pub fn parse_scenario(value: Value) -> Result<Scenario, Vec<FieldError>> {
    let mut errors = Vec::new();
    check_scenario_fields(&value, "", &mut errors);
    if !errors.is_empty() {
        return Err(errors);
    }
    typed(value, "")
}

/// A grid document: a base scenario plus optional axes.
pub fn parse_grid(value: Value) -> Result<ScenarioGrid, Vec<FieldError>> {
    let mut errors = Vec::new();
    match value.as_object() {
        None => errors.push(FieldError::new("body", "expected an object")),
        Some(obj) => match obj.get("base") {
            None | Some(Value::Null) => errors.push(FieldError::new("base", "required")),
            Some(base) => check_scenario_fields(base, "base", &mut errors),
        },
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    typed(value, "")
}

/// Taxonomy version the request was written against, if it says.
pub fn check_taxonomy(value: &Value) -> Result<(), FieldError> {
    match value.get("taxonomy_version").and_then(Value::as_u64) {
        Some(v) if v != TAXONOMY_VERSION as u64 => Err(FieldError::new(
            "taxonomy_version",
            format!("request uses taxonomy {v}, the service uses {TAXONOMY_VERSION}"),
        )),
        _ => Ok(()),
    }
}

/// Drops the optional `taxonomy_version` key before typed parsing.
pub fn strip_taxonomy(mut value: Value) -> Value {
    if let Some(obj) = value.as_object_mut() {
        obj.remove("taxonomy_version");
    }
    value
}
