//! HTTP API over a corpus directory.
//!
//! Every body, success or error, is canonical JSON (sorted keys, no
//! insignificant whitespace) followed by a newline; see [`structured`].

pub mod config;
mod error;
mod idempotency;
pub mod ops;

use std::io;
use std::net::SocketAddr;
use std::path::Path;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path as UrlPath, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tokio::net::TcpListener;
use tokio::sync::oneshot;
use tokio::task::JoinHandle;

use plp_core::canonical::{sha256_hex, to_canonical_bytes};
use plp_core::clock::Clock;
use plp_core::lector::{PackInput, PackState};
use plp_core::refraction::{Execution, ViewKind};
use plp_core::Corpus;

pub use config::Config;
pub use error::ApiError;
use idempotency::{IdempotencyStore, Lookup, StoredResponse};
use ops::OpResult;

pub const CURATOR_HEADER: &str = "x-curator-id";
pub const IDEMPOTENCY_HEADER: &str = "idempotency-key";
pub const REPLAYED_HEADER: &str = "idempotent-replayed";
const MAX_BODY: usize = 64 * 1024 * 1024;

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("address {0} is already in use")]
    AddressInUse(SocketAddr),
    #[error(transparent)]
    Core(#[from] plp_core::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Canonical JSON plus a trailing newline: the structured output format of
/// both the API and the CLI.
pub fn structured<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = to_canonical_bytes(value);
    out.push(b'\n');
    out
}

pub struct AppState {
    pub corpus: Corpus,
    /// Mutations take it exclusively so reads see a consistent snapshot.
    gate: RwLock<()>,
    idempotency: IdempotencyStore,
}

pub type Shared = Arc<AppState>;

impl AppState {
    pub fn open(data_dir: &Path, clock: Clock) -> Result<Shared, ServiceError> {
        let corpus = Corpus::open(data_dir, clock)?;
        let idempotency = IdempotencyStore::open(&data_dir.join("service"))?;
        Ok(Arc::new(AppState { corpus, gate: RwLock::new(()), idempotency }))
    }
}

fn json_response(status: StatusCode, body: Vec<u8>) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn parse_body<T: DeserializeOwned>(body: &[u8]) -> OpResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::invalid_input(format!("request body: {e}")))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError::new("internal", e.to_string()))
}

async fn read<T, F>(s: Shared, f: F) -> Response
where
    T: Serialize,
    F: FnOnce(&Corpus) -> OpResult<T> + Send + 'static,
{
    let r = blocking(move || {
        let _g = s.gate.read().expect("gate poisoned");
        f(&s.corpus).map(|v| structured(&v))
    })
    .await;
    match r.and_then(|x| x) {
        Ok(body) => json_response(StatusCode::OK, body),
        Err(e) => e.into_response(),
    }
}

/// Runs a mutation under the write gate, honouring `Idempotency-Key`.
/// Only successful responses are stored for replay.
async fn mutate<T, F>(s: Shared, headers: &HeaderMap, route: String, body: &[u8], f: F) -> Response
where
    T: Serialize,
    F: FnOnce(&Corpus) -> OpResult<(StatusCode, T)> + Send + 'static,
{
    let key = headers.get(IDEMPOTENCY_HEADER).and_then(|v| v.to_str().ok()).map(str::to_owned);
    let curator = headers.get(CURATOR_HEADER).and_then(|v| v.to_str().ok()).unwrap_or("");
    let mut material = format!("{route}\n{curator}\n").into_bytes();
    material.extend_from_slice(body);
    let fingerprint = sha256_hex(&material);

    let r = blocking(move || -> OpResult<(StatusCode, Vec<u8>, bool)> {
        let _g = s.gate.write().expect("gate poisoned");
        if let Some(key) = &key {
            match s.idempotency.lookup(&route, key, &fingerprint) {
                Lookup::Replay(prior) => {
                    let status = StatusCode::from_u16(prior.status).unwrap_or(StatusCode::OK);
                    return Ok((status, prior.body.into_bytes(), true));
                }
                Lookup::Mismatch => {
                    return Err(ApiError::new(
                        "idempotency_key_reused",
                        format!("key {key} was used for a different request"),
                    ))
                }
                Lookup::Miss => {}
            }
        }
        let (status, value) = f(&s.corpus)?;
        let body = structured(&value);
        if let Some(key) = key {
            s.idempotency
                .record(StoredResponse {
                    key,
                    route,
                    fingerprint,
                    status: status.as_u16(),
                    body: String::from_utf8(body.clone()).expect("canonical JSON is UTF-8"),
                })
                .map_err(|e| ApiError::new("io_error", e.to_string()))?;
        }
        Ok((status, body, false))
    })
    .await;
    match r.and_then(|x| x) {
        Ok((status, body, replayed)) => {
            let mut resp = json_response(status, body);
            if replayed {
                resp.headers_mut().insert(REPLAYED_HEADER, HeaderValue::from_static("true"));
            }
            resp
        }
        Err(e) => e.into_response(),
    }
}

async fn ingest(State(s): State<Shared>, headers: HeaderMap, body: Bytes) -> Response {
    mutate(s, &headers, "POST /documents".into(), &body.clone(), move |c| {
        let req = parse_body(&body)?;
        let before = c.patos.len();
        let doc = ops::ingest(c, req)?;
        let status = if c.patos.len() > before { StatusCode::CREATED } else { StatusCode::OK };
        Ok((status, doc))
    })
    .await
}

async fn document(State(s): State<Shared>, UrlPath(id): UrlPath<String>) -> Response {
    read(s, move |c| ops::document(c, &id)).await
}

async fn versions(State(s): State<Shared>, UrlPath(id): UrlPath<String>) -> Response {
    read(s, move |c| ops::versions(c, &id)).await
}

async fn audit(State(s): State<Shared>, UrlPath(id): UrlPath<String>) -> Response {
    read(s, move |c| ops::audit(c, &id)).await
}

async fn verify(State(s): State<Shared>, UrlPath(id): UrlPath<String>, headers: HeaderMap, body: Bytes) -> Response {
    let route = format!("POST /documents/{id}/verify");
    mutate(s, &headers, route, &body, move |c| Ok((StatusCode::OK, ops::verify(c, &id)?))).await
}

#[derive(Debug, Default, Deserialize)]
struct PackQuery {
    state: Option<PackState>,
}

async fn list_packs(State(s): State<Shared>, Query(q): Query<PackQuery>) -> Response {
    read(s, move |c| Ok(ops::packs(c, q.state))).await
}

async fn create_pack(State(s): State<Shared>, headers: HeaderMap, body: Bytes) -> Response {
    mutate(s, &headers, "POST /packs".into(), &body.clone(), move |c| {
        let input: PackInput = parse_body(&body)?;
        Ok((StatusCode::CREATED, ops::create_pack(c, input)?))
    })
    .await
}

async fn pack(State(s): State<Shared>, UrlPath(id): UrlPath<String>) -> Response {
    read(s, move |c| ops::pack(c, &id)).await
}

async fn submit(State(s): State<Shared>, UrlPath(id): UrlPath<String>, headers: HeaderMap, body: Bytes) -> Response {
    let route = format!("POST /packs/{id}/submit");
    mutate(s, &headers, route, &body, move |c| Ok((StatusCode::OK, ops::submit(c, &id)?))).await
}

async fn curate(State(s): State<Shared>, UrlPath(id): UrlPath<String>, headers: HeaderMap, body: Bytes) -> Response {
    let curator = headers.get(CURATOR_HEADER).and_then(|v| v.to_str().ok()).unwrap_or("").to_owned();
    let route = format!("POST /packs/{id}/curate");
    mutate(s, &headers, route, &body.clone(), move |c| {
        let req = parse_body(&body)?;
        Ok((StatusCode::OK, ops::curate(c, &id, &curator, req)?))
    })
    .await
}

async fn derive(State(s): State<Shared>, UrlPath(id): UrlPath<String>, headers: HeaderMap, body: Bytes) -> Response {
    let route = format!("POST /packs/{id}/derive");
    mutate(s, &headers, route, &body.clone(), move |c| {
        let input: PackInput = parse_body(&body)?;
        Ok((StatusCode::CREATED, ops::derive_pack(c, &id, input)?))
    })
    .await
}

async fn validate(State(s): State<Shared>, UrlPath(id): UrlPath<String>) -> Response {
    read(s, move |c| ops::validate(c, &id)).await
}

async fn link(State(s): State<Shared>, headers: HeaderMap, body: Bytes) -> Response {
    mutate(s, &headers, "POST /links".into(), &body.clone(), move |c| {
        let req = parse_body(&body)?;
        Ok((StatusCode::CREATED, ops::link(c, req)?))
    })
    .await
}

async fn entity(State(s): State<Shared>, UrlPath(id): UrlPath<String>) -> Response {
    read(s, move |c| ops::entity(c, &id)).await
}

#[derive(Debug, Default, Deserialize)]
struct ViewQuery {
    types: Option<String>,
}

async fn view(
    State(s): State<Shared>,
    UrlPath((id, view)): UrlPath<(String, String)>,
    Query(q): Query<ViewQuery>,
) -> Response {
    read(s, move |c| {
        let view = ops::parse_view(&view)?;
        let types = ops::parse_types(q.types.as_deref())?;
        ops::view(c, &id, view, types.as_ref())
    })
    .await
}

async fn graph(State(s): State<Shared>, UrlPath(id): UrlPath<String>) -> Response {
    read(s, move |c| ops::graph(c, &id)).await
}

async fn trace(State(s): State<Shared>, UrlPath((id, node)): UrlPath<(String, String)>) -> Response {
    read(s, move |c| ops::trace(c, &id, &node)).await
}

#[derive(Debug, Default, Deserialize)]
struct RefractQuery {
    views: Option<String>,
}

async fn refract_all(State(s): State<Shared>, Query(q): Query<RefractQuery>, headers: HeaderMap) -> Response {
    let route = format!("POST /refract-all?views={}", q.views.as_deref().unwrap_or(""));
    mutate(s, &headers, route, &[], move |c| {
        let views = match q.views.as_deref().filter(|v| !v.trim().is_empty()) {
            Some(v) => v.split(',').map(|x| ops::parse_view(x.trim())).collect::<OpResult<Vec<_>>>()?,
            None => ViewKind::ALL.to_vec(),
        };
        Ok((StatusCode::OK, ops::refract_all(c, &views, Execution::default())?))
    })
    .await
}

async fn metrics(State(s): State<Shared>) -> Response {
    read(s, ops::metrics).await
}

#[derive(Debug, Default, Deserialize)]
struct SearchQuery {
    #[serde(default)]
    q: String,
}

async fn search(State(s): State<Shared>, Query(q): Query<SearchQuery>) -> Response {
    read(s, move |c| ops::search(c, &q.q)).await
}

async fn health() -> Response {
    json_response(StatusCode::OK, structured(&serde_json::json!({ "status": "ok" })))
}

async fn no_route() -> Response {
    ApiError::new("no_route", "no such endpoint").into_response()
}

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/documents", post(ingest))
        .route("/documents/{id}", get(document))
        .route("/documents/{id}/versions", get(versions))
        .route("/documents/{id}/audit", get(audit))
        .route("/documents/{id}/verify", post(verify))
        .route("/packs", post(create_pack).get(list_packs))
        .route("/packs/{id}", get(pack))
        .route("/packs/{id}/submit", post(submit))
        .route("/packs/{id}/curate", post(curate))
        .route("/packs/{id}/derive", post(derive))
        .route("/packs/{id}/validate", get(validate))
        .route("/links", post(link))
        .route("/entities/{id}", get(entity))
        .route("/entities/{id}/views/{view}", get(view))
        .route("/graphs/{id}", get(graph))
        .route("/graphs/{id}/trace/{node}", get(trace))
        .route("/refract-all", post(refract_all))
        .route("/metrics", get(metrics))
        .route("/search", get(search))
        .fallback(no_route)
        .layer(DefaultBodyLimit::max(MAX_BODY))
        .with_state(state)
}

/// A running server. Dropping the handle triggers a graceful shutdown.
pub struct ServiceHandle {
    pub local_addr: SocketAddr,
    pub state: Shared,
    shutdown: oneshot::Sender<()>,
    task: JoinHandle<io::Result<()>>,
}

impl ServiceHandle {
    pub async fn shutdown(self) -> io::Result<()> {
        let _ = self.shutdown.send(());
        self.task.await.map_err(io::Error::other)?
    }

    /// Waits until the server stops on its own.
    pub async fn wait(self) -> io::Result<()> {
        let _keep = self.shutdown;
        self.task.await.map_err(io::Error::other)?
    }
}

/// Opens the corpus, applies the configured fixture and starts listening.
pub async fn serve(config: Config) -> Result<ServiceHandle, ServiceError> {
    config.validate()?;
    let addr = config.socket_addr()?;
    std::fs::create_dir_all(&config.data_dir)
        .map_err(|e| ServiceError::ConfigInvalid(format!("data_dir {}: {e}", config.data_dir.display())))?;
    let state = AppState::open(&config.data_dir, Clock::System)?;
    if let Some(path) = &config.fixture_path {
        let lector = &state.corpus.lector;
        let accepted = |id: &plp_core::lector::PackId| lector.get(id).is_ok_and(|p| p.is_accepted());
        state.corpus.ontology.load_file(path, &accepted).map_err(plp_core::Error::from)?;
    }
    let listener = TcpListener::bind(addr).await.map_err(|e| match e.kind() {
        io::ErrorKind::AddrInUse => ServiceError::AddressInUse(addr),
        _ => ServiceError::Io(e),
    })?;
    let local_addr = listener.local_addr()?;
    let (tx, rx) = oneshot::channel::<()>();
    let app = router(state.clone());
    let task = tokio::spawn(async move {
        axum::serve(listener, app)
            .with_graceful_shutdown(async move {
                let _ = rx.await;
            })
            .await
    });
    Ok(ServiceHandle { local_addr, state, shutdown: tx, task })
}
