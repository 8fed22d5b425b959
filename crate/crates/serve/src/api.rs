//! The HTTP service: JSON endpoints over an immutable model snapshot that a
//! reload swaps atomically.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Serialize;
use serde_json::{json, Value};
use tower_http::services::ServeDir;

use shotzone_core::domain::{taxonomy_document, Handedness};
use shotzone_core::featurize::{blend_weight, ProfileStore};
use shotzone_core::ingest::{BowlerStyle, Role};
use shotzone_core::models::load_bundle;
use shotzone_core::simulate::{build_grid, SimError};
use shotzone_core::{Bundle, Real};

use crate::schema::{api_document, MAX_GRID_CELLS};
use crate::wire::{self, FieldError, ModelInfo};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub bundle_path: PathBuf,
    /// Replaces the profiles stored in the bundle.
    pub profiles_path: Option<PathBuf>,
    pub bind: SocketAddr,
    pub allow_unknown: bool,
    pub static_dir: Option<PathBuf>,
}

/// A loaded bundle. Requests hold an `Arc` to one for their whole lifetime.
pub struct Snapshot {
    pub bundle: Bundle,
}

impl Snapshot {
    pub fn load(config: &ServiceConfig) -> anyhow::Result<Self> {
        let mut bundle = load_bundle::<Real>(&config.bundle_path)
            .map_err(|e| anyhow::anyhow!("{}: {e}", config.bundle_path.display()))?;
        bundle.check_version()?;
        if let Some(path) = &config.profiles_path {
            bundle.profiles = ProfileStore::load(path).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        }
        Ok(Snapshot { bundle })
    }
}

pub struct AppState {
    config: ServiceConfig,
    current: RwLock<Arc<Snapshot>>,
    reloading: AtomicBool,
    reload_lock: tokio::sync::Mutex<()>,
}

/// Marks a reload in progress until dropped.
pub struct ReloadGuard<'a>(&'a AtomicBool);

impl Drop for ReloadGuard<'_> {
    fn drop(&mut self) {
        self.0.store(false, Ordering::SeqCst);
    }
}

impl AppState {
    pub fn new(config: ServiceConfig, snapshot: Snapshot) -> Arc<Self> {
        Arc::new(AppState {
            config,
            current: RwLock::new(Arc::new(snapshot)),
            reloading: AtomicBool::new(false),
            reload_lock: tokio::sync::Mutex::new(()),
        })
    }

    pub fn snapshot(&self) -> Result<Arc<Snapshot>, ApiError> {
        if self.reloading.load(Ordering::SeqCst) {
            return Err(ApiError::Reloading);
        }
        Ok(self.current.read().expect("snapshot lock").clone())
    }

    pub fn begin_reload(&self) -> ReloadGuard<'_> {
        self.reloading.store(true, Ordering::SeqCst);
        ReloadGuard(&self.reloading)
    }

    fn install(&self, snapshot: Snapshot) {
        *self.current.write().expect("snapshot lock") = Arc::new(snapshot);
    }
}

#[derive(Debug)]
pub enum ApiError {
    Fields(Vec<FieldError>),
    NotFound(String),
    TooLarge(usize),
    Reloading,
    Internal(String),
}

impl From<SimError> for ApiError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::UnknownPlayer { .. } => ApiError::NotFound(e.to_string()),
            SimError::Config(m) => ApiError::Fields(vec![FieldError { field: "scenario".into(), message: m }]),
            SimError::Model(m) => ApiError::Internal(m.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = match self {
            ApiError::Fields(fields) => (StatusCode::BAD_REQUEST, json!({"error": "invalid request", "fields": fields})),
            ApiError::NotFound(m) => (StatusCode::NOT_FOUND, json!({"error": m})),
            ApiError::TooLarge(n) => (
                StatusCode::PAYLOAD_TOO_LARGE,
                json!({"error": format!("grid has {n} scenarios; at most {MAX_GRID_CELLS} are accepted per request"),
                       "limit": MAX_GRID_CELLS}),
            ),
            ApiError::Reloading => (StatusCode::SERVICE_UNAVAILABLE, json!({"error": "model is reloading; retry shortly"})),
            ApiError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, json!({"error": m})),
        };
        (status, Json(body)).into_response()
    }
}

fn parse_body(body: &Bytes) -> Result<Value, ApiError> {
    let value: Value = serde_json::from_slice(body).map_err(|e| {
        ApiError::Fields(vec![FieldError { field: "body".into(), message: format!("not a JSON document: {e}") }])
    })?;
    wire::check_taxonomy(&value).map_err(|e| ApiError::Fields(vec![e]))?;
    Ok(wire::strip_taxonomy(value))
}

#[derive(Serialize)]
struct ProfileSummary {
    n_seen: u64,
    matches: u32,
    /// Weight of the personal statistics against the global means.
    blend_weight: f64,
}

#[derive(Serialize)]
struct PlayerEntry<'a> {
    id: &'a str,
    name: &'a str,
    hand: Handedness,
    roles: Vec<Role>,
    bowling_hand: Option<Handedness>,
    bowler_style: Option<BowlerStyle>,
    batting: Option<ProfileSummary>,
    bowling: Option<ProfileSummary>,
}

async fn players(State(state): State<Arc<AppState>>) -> Result<Response, ApiError> {
    let snap = state.snapshot()?;
    let store = &snap.bundle.profiles;
    let summary = |n_seen: u64, matches: u32| ProfileSummary { n_seen, matches, blend_weight: blend_weight(n_seen) };
    let list: Vec<PlayerEntry> = store
        .players()
        .iter()
        .map(|(id, p)| PlayerEntry {
            id,
            name: &p.name,
            hand: p.hand,
            roles: p.roles.iter().copied().collect(),
            bowling_hand: p.bowling_hand,
            bowler_style: p.bowler_style,
            batting: store.batting(id).map(|b| summary(b.n_seen(), b.matches())),
            bowling: store.bowling(id).map(|b| summary(b.n_seen(), b.matches())),
        })
        .collect();
    Ok(Json(list).into_response())
}

async fn model(State(state): State<Arc<AppState>>) -> Result<Response, ApiError> {
    let snap = state.snapshot()?;
    let b = &snap.bundle;
    Ok(Json(json!({
        "model": ModelInfo::of(b),
        "manifest": b.manifest,
        "parameters": b.network.as_ref().map(|n| n.parameter_count()),
        "precision": std::any::type_name::<Real>(),
        "players": b.profiles.players().len(),
    }))
    .into_response())
}

async fn predict(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let snap = state.snapshot()?;
    let mut scenario = wire::parse_scenario(parse_body(&body)?).map_err(ApiError::Fields)?;
    scenario.allow_unknown = state.config.allow_unknown;
    let out = wire::predict_body(&snap.bundle, &scenario)?;
    Ok(Json(out).into_response())
}

fn check_players(store: &ProfileStore, batsman: &str, bowlers: &[String]) -> Result<(), ApiError> {
    if store.batting(batsman).is_none() {
        return Err(ApiError::NotFound(format!("unknown Batsman `{batsman}`")));
    }
    match bowlers.iter().find(|b| store.bowling(b).is_none()) {
        Some(b) => Err(ApiError::NotFound(format!("unknown Bowler `{b}`"))),
        None => Ok(()),
    }
}

async fn simulate(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let snap = state.snapshot()?;
    let mut grid = wire::parse_grid(parse_body(&body)?).map_err(ApiError::Fields)?;
    grid.base.allow_unknown = state.config.allow_unknown;
    if !grid.base.allow_unknown {
        let bowlers = grid.bowlers.clone().unwrap_or_else(|| vec![grid.base.bowler_id.clone()]);
        check_players(&snap.bundle.profiles, &grid.base.batsman_id, &bowlers)?;
    }
    let n = build_grid(&grid, &snap.bundle.profiles)?.len();
    if n > MAX_GRID_CELLS {
        return Err(ApiError::TooLarge(n));
    }
    let out = tokio::task::spawn_blocking(move || wire::simulate_body(&snap.bundle, &grid))
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))??;
    Ok(Json(out).into_response())
}

async fn reload(State(state): State<Arc<AppState>>) -> Result<Response, ApiError> {
    let _serial = state.reload_lock.lock().await;
    let _guard = state.begin_reload();
    let config = state.config.clone();
    let snapshot = tokio::task::spawn_blocking(move || Snapshot::load(&config))
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))?
        .map_err(|e| ApiError::Internal(format!("reload failed, keeping the previous model: {e:#}")))?;
    let info = ModelInfo::of(&snapshot.bundle);
    state.install(snapshot);
    tracing::info!(kind = info.kind.name(), "model reloaded");
    Ok(Json(json!({"reloaded": true, "model": info})).into_response())
}

const INDEX: &str = "<!doctype html>
<title>shotzone</title>
<h1>shotzone</h1>
<p>Endpoints: GET /api/players, GET /api/model, GET /api/taxonomy, GET /api/schema,
POST /api/predict, POST /api/simulate, POST /api/reload.</p>
<p>Start the service with <code>--static DIR</code> to serve the tactics board here.</p>
";

pub fn router(state: Arc<AppState>) -> Router {
    let api = Router::new()
        .route("/api/players", get(players))
        .route("/api/model", get(model))
        .route("/api/taxonomy", get(|| async { Json(taxonomy_document()) }))
        .route("/api/schema", get(|| async { Json(api_document()) }))
        .route("/api/predict", post(predict))
        .route("/api/simulate", post(simulate))
        .route("/api/reload", post(reload));
    let api = match &state.config.static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(|| async { Html(INDEX) })),
    };
    api.with_state(state)
}

pub async fn serve(config: ServiceConfig) -> anyhow::Result<()> {
    let snapshot = Snapshot::load(&config)?;
    let bind = config.bind;
    let state = AppState::new(config, snapshot);
    let listener = tokio::net::TcpListener::bind(bind).await?;
    tracing::info!(address = %listener.local_addr()?, "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
