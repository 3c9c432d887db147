//! Read-only HTTP/JSON API over the served snapshot.
//!
//! The served snapshot is an `Arc` behind a lock that is held only long
//! enough to clone or replace the pointer. A request clones the `Arc` once
//! and computes everything from that snapshot, so a reload never mixes
//! data from two snapshots in one response. Reloads build the new snapshot
//! without holding the lock and publish it with a single pointer swap.

use std::future::Future;
use std::sync::{Arc, RwLock};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Query as QueryParams, State};
use axum::http::{header, HeaderMap, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use crashdash_core::{DatasetSnapshot, IdentificationCounts};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tower_http::cors::CorsLayer;

use crate::boundaries::boundaries_to_geojson;
use crate::config::Config;
use crate::hotspot_export;
use crate::query::{self, Envelope, ParamError, Params, QueryResult};
use crate::store::{self, InputPaths};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotInfo {
    pub snapshot_id: String,
    pub ingested_at: String,
    pub record_count: usize,
    pub tribal_count: usize,
    pub conflict_count: usize,
    pub source_digest: String,
    pub identification: IdentificationCounts,
}

impl SnapshotInfo {
    pub fn of(s: &DatasetSnapshot) -> Self {
        Self {
            snapshot_id: s.snapshot_id().into(),
            ingested_at: s.meta().ingested_at.clone(),
            record_count: s.len(),
            tribal_count: s.tribal_count(),
            conflict_count: s.conflict_count(),
            source_digest: s.meta().source_digest.clone(),
            identification: s.identification_counts(),
        }
    }
}

/// Error body: `{code, message, param?}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub param: Option<String>,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self { status, body: ErrorBody { code: code.into(), message: message.into(), param: None } }
    }

    fn no_snapshot() -> Self {
        Self::new(StatusCode::SERVICE_UNAVAILABLE, "no_snapshot", "no snapshot has been ingested yet")
    }

    fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl From<ParamError> for ApiError {
    fn from(e: ParamError) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            body: ErrorBody { code: "invalid_param".into(), message: e.message, param: Some(e.param) },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

pub struct AppState {
    config: Config,
    served: RwLock<Option<Arc<DatasetSnapshot>>>,
    /// Serialises reloads; never taken by readers.
    reload_gate: tokio::sync::Mutex<()>,
}

impl AppState {
    pub fn new(config: Config, snapshot: Option<DatasetSnapshot>) -> Arc<Self> {
        Arc::new(Self { config, served: RwLock::new(snapshot.map(Arc::new)), reload_gate: tokio::sync::Mutex::new(()) })
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn current(&self) -> Option<Arc<DatasetSnapshot>> {
        self.served.read().unwrap_or_else(|e| e.into_inner()).clone()
    }

    /// Replaces the served snapshot; readers holding the old `Arc` finish
    /// against it.
    pub fn publish(&self, snapshot: DatasetSnapshot) {
        *self.served.write().unwrap_or_else(|e| e.into_inner()) = Some(Arc::new(snapshot));
    }

    fn snapshot(&self) -> Result<Arc<DatasetSnapshot>, ApiError> {
        self.current().ok_or_else(ApiError::no_snapshot)
    }
}

type Shared = State<Arc<AppState>>;
type RawParams = Result<QueryParams<Vec<(String, String)>>, QueryRejection>;

fn pairs(raw: RawParams) -> Result<Vec<(String, String)>, ApiError> {
    raw.map(|q| q.0).map_err(|e| ParamError::new("query", e.body_text()).into())
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError::internal(e.to_string()))
}

async fn answer(state: Arc<AppState>, kind: &'static str, raw: RawParams) -> Result<Json<Envelope<QueryResult>>, ApiError> {
    let params = Params::from_pairs(pairs(raw)?)?;
    let snapshot = state.snapshot()?;
    let defaults = state.config.defaults();
    let envelope = blocking(move || query::run(kind, params, &snapshot, &defaults)).await??;
    Ok(Json(envelope))
}

async fn snapshot_info(State(state): Shared) -> Result<Json<SnapshotInfo>, ApiError> {
    let s = state.snapshot()?;
    Ok(Json(SnapshotInfo::of(&s)))
}

async fn summary(State(s): Shared, q: RawParams) -> Result<Json<Envelope<QueryResult>>, ApiError> {
    answer(s, "summary", q).await
}

async fn rankings(State(s): Shared, q: RawParams) -> Result<Json<Envelope<QueryResult>>, ApiError> {
    answer(s, "rankings", q).await
}

async fn breakdown(State(s): Shared, q: RawParams) -> Result<Json<Envelope<QueryResult>>, ApiError> {
    answer(s, "breakdown", q).await
}

async fn road(State(s): Shared, q: RawParams) -> Result<Json<Envelope<QueryResult>>, ApiError> {
    answer(s, "road", q).await
}

async fn crash_types(State(s): Shared, q: RawParams) -> Result<Json<Envelope<QueryResult>>, ApiError> {
    answer(s, "crash-types", q).await
}

async fn crashes(State(s): Shared, q: RawParams) -> Result<Json<Envelope<QueryResult>>, ApiError> {
    answer(s, "crashes", q).await
}

/// Hotspots as the grid result, or with `format=geojson` as the cell
/// FeatureCollection.
async fn hotspots(State(state): Shared, raw: RawParams) -> Result<Response, ApiError> {
    let mut list = pairs(raw)?;
    let geojson = match list.iter().position(|(k, _)| k == "format") {
        None => false,
        Some(i) => match list.remove(i).1.as_str() {
            "geojson" => true,
            "json" => false,
            other => return Err(ParamError::new("format", format!("expected json or geojson, got {other:?}")).into()),
        },
    };
    let Json(envelope) = answer(state, "hotspots", Ok(QueryParams(list))).await?;
    if !geojson {
        return Ok(Json(envelope).into_response());
    }
    let QueryResult::Hotspots(report) = &envelope.result else {
        return Err(ApiError::internal("hotspot query returned another result"));
    };
    let body = Envelope { snapshot_id: envelope.snapshot_id.clone(), result: hotspot_export::to_geojson(report) };
    Ok(Json(body).into_response())
}

async fn boundaries(State(state): Shared) -> Result<Json<Envelope<Value>>, ApiError> {
    let s = state.snapshot()?;
    Ok(Json(Envelope { snapshot_id: s.snapshot_id().into(), result: boundaries_to_geojson(s.boundaries()) }))
}

/// Byte comparison whose running time does not depend on where the inputs
/// first differ.
fn same_secret(a: &[u8], b: &[u8]) -> bool {
    a.len() == b.len() && a.iter().zip(b).fold(0u8, |acc, (x, y)| acc | (x ^ y)) == 0
}

fn authorize(config: &Config, headers: &HeaderMap) -> Result<(), ApiError> {
    let unauthorized = || ApiError::new(StatusCode::UNAUTHORIZED, "unauthorized", "missing or wrong admin token");
    let expected = config.admin_token.as_deref().ok_or_else(unauthorized)?;
    let presented = headers
        .get(header::AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "))
        .ok_or_else(unauthorized)?;
    if same_secret(presented.trim().as_bytes(), expected.as_bytes()) {
        Ok(())
    } else {
        Err(unauthorized())
    }
}

async fn reload(
    State(state): Shared,
    headers: HeaderMap,
    body: Result<Json<InputPaths>, JsonRejection>,
) -> Result<Json<SnapshotInfo>, ApiError> {
    authorize(&state.config, &headers)?;
    let Json(paths) = body.map_err(|e| ParamError::new("body", e.body_text()))?;
    let _gate = state.reload_gate.lock().await;
    let schema = state.config.schema.clone();
    let data_dir = state.config.data_dir.clone();
    let built = blocking(move || {
        let (snapshot, report) =
            store::build_from_paths(&paths, &schema, &store::now_rfc3339()).map_err(|e| e.to_string())?;
        store::save(&data_dir, &snapshot, &report).map_err(|e| e.to_string())?;
        Ok::<_, String>((snapshot, report))
    });
    let (snapshot, report) = built
        .await?
        .map_err(|e: String| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "ingest_failed", e))?;
    let info = SnapshotInfo::of(&snapshot);
    state.publish(snapshot);
    tracing::info!(snapshot_id = %info.snapshot_id, accepted = report.accepted_count, rejected = report.rejected.len(), "snapshot reloaded");
    Ok(Json(info))
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint")
}

pub fn router(state: Arc<AppState>) -> Router {
    let api = Router::new()
        .route("/snapshot", get(snapshot_info))
        .route("/summary", get(summary))
        .route("/tribes/rankings", get(rankings))
        .route("/breakdown", get(breakdown))
        .route("/road", get(road))
        .route("/crash-types", get(crash_types))
        .route("/hotspots", get(hotspots))
        .route("/crashes", get(crashes))
        .route("/boundaries", get(boundaries))
        .route("/admin/reload", post(reload));
    let mut app = Router::new().nest("/api/v1", api).fallback(not_found);
    if let Some(origin) = state.config.cors_origin.as_deref().and_then(|o| HeaderValue::from_str(o).ok()) {
        app = app.layer(
            CorsLayer::new()
                .allow_origin(origin)
                .allow_methods([Method::GET, Method::POST])
                .allow_headers([header::AUTHORIZATION, header::CONTENT_TYPE]),
        );
    }
    app.with_state(state)
}

/// Serves until `shutdown` resolves, then lets in-flight requests finish.
pub async fn serve(
    listener: tokio::net::TcpListener,
    state: Arc<AppState>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    tracing::info!(addr = %listener.local_addr()?, snapshot = ?state.current().map(|s| s.snapshot_id().to_string()), "listening");
    axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await?;
    tracing::info!("shut down");
    Ok(())
}
