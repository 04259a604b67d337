//! HTTP front end: routing, snapshot swapping and the response cache.
//!
//! Handlers never compute while holding a lock. A request clones the
//! current snapshot `Arc`, then looks up a per-key `OnceCell` in the LRU;
//! the first caller for a key runs the analysis on the blocking pool and
//! any concurrent caller for the same key awaits that result.

use std::net::SocketAddr;
use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{ConnectInfo, Path, RawQuery, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use lru::LruCache;
use serde::Serialize;
use tokio::sync::OnceCell;

use crate::analysis;
use crate::error::ApiError;
use crate::request::{cache_key, query_pairs, AnalysisRequest};
use crate::snapshot::{DataConfig, Snapshot};

type Cached = Arc<OnceCell<Result<Bytes, ApiError>>>;

pub struct AppState {
    config: DataConfig,
    snapshot: RwLock<Option<Arc<Snapshot>>>,
    cache: Mutex<LruCache<String, Cached>>,
    /// Serializes reloads so versions are handed out in order.
    reload: tokio::sync::Mutex<()>,
}

impl AppState {
    /// `capacity` caps the number of cached responses; `None` is unbounded.
    pub fn new(
        config: DataConfig,
        snapshot: Option<Snapshot>,
        capacity: Option<NonZeroUsize>,
    ) -> Arc<Self> {
        let cache = match capacity {
            Some(n) => LruCache::new(n),
            None => LruCache::unbounded(),
        };
        Arc::new(AppState {
            config,
            snapshot: RwLock::new(snapshot.map(Arc::new)),
            cache: Mutex::new(cache),
            reload: tokio::sync::Mutex::new(()),
        })
    }

    /// Loads the configured corpus as version 1.
    pub fn load(
        config: DataConfig,
        capacity: Option<NonZeroUsize>,
    ) -> Result<Arc<Self>, crate::snapshot::LoadError> {
        let snap = Snapshot::load(&config, 1)?;
        Ok(Self::new(config, Some(snap), capacity))
    }

    pub fn snapshot(&self) -> Option<Arc<Snapshot>> {
        self.snapshot.read().expect("snapshot lock").clone()
    }

    pub fn version(&self) -> Option<u64> {
        self.snapshot().map(|s| s.version)
    }

    pub fn cached_entries(&self) -> usize {
        self.cache.lock().expect("cache lock").len()
    }

    /// Builds a fresh snapshot from the configured files and swaps it in.
    /// On failure the current snapshot stays in place.
    pub async fn reload(self: &Arc<Self>) -> Result<u64, ApiError> {
        let _guard = self.reload.lock().await;
        let version = self.version().unwrap_or(0) + 1;
        let config = self.config.clone();
        let snap = tokio::task::spawn_blocking(move || Snapshot::load(&config, version))
            .await
            .map_err(|e| ApiError::internal(e.to_string()))?
            .map_err(|e| ApiError::internal(format!("reload failed: {e}")))?;
        *self.snapshot.write().expect("snapshot lock") = Some(Arc::new(snap));
        self.cache.lock().expect("cache lock").clear();
        tracing::info!(version, "corpus reloaded");
        Ok(version)
    }

    /// Response body of `request`, from the cache when possible.
    pub async fn answer(&self, request: AnalysisRequest) -> Result<Bytes, ApiError> {
        let snap = self.snapshot().ok_or_else(ApiError::not_loaded)?;
        let key = cache_key(&request, snap.version);
        let cell = {
            let mut cache = self.cache.lock().expect("cache lock");
            cache
                .get_or_insert(key, || Arc::new(OnceCell::new()))
                .clone()
        };
        cell.get_or_init(|| async move {
            tokio::task::spawn_blocking(move || analysis::respond(&request, &snap).map(Bytes::from))
                .await
                .unwrap_or_else(|e| Err(ApiError::internal(e.to_string())))
        })
        .await
        .clone()
    }
}

pub fn json_response(status: StatusCode, body: impl Into<Bytes>) -> Response {
    (
        status,
        [(header::CONTENT_TYPE, "application/json; charset=utf-8")],
        body.into(),
    )
        .into_response()
}

async fn run(
    state: &AppState,
    endpoint: &str,
    id: Option<&str>,
    query: Option<String>,
) -> Response {
    let pairs = query_pairs(query.as_deref());
    let result = match AnalysisRequest::parse(endpoint, id, &pairs) {
        Ok(request) => state.answer(request).await,
        Err(e) => Err(e),
    };
    match result {
        Ok(body) => json_response(StatusCode::OK, body),
        Err(e) => e.into_response(),
    }
}

async fn summary(State(s): State<Arc<AppState>>, RawQuery(q): RawQuery) -> Response {
    run(&s, "summary", None, q).await
}

async fn activity(State(s): State<Arc<AppState>>, RawQuery(q): RawQuery) -> Response {
    run(&s, "activity", None, q).await
}

async fn classes(State(s): State<Arc<AppState>>, RawQuery(q): RawQuery) -> Response {
    run(&s, "classes", None, q).await
}

async fn network(State(s): State<Arc<AppState>>, RawQuery(q): RawQuery) -> Response {
    run(&s, "network", None, q).await
}

async fn themes(State(s): State<Arc<AppState>>, RawQuery(q): RawQuery) -> Response {
    run(&s, "themes", None, q).await
}

async fn cloud(
    State(s): State<Arc<AppState>>,
    Path(id): Path<String>,
    RawQuery(q): RawQuery,
) -> Response {
    run(&s, "cloud", Some(&id), q).await
}

#[derive(Serialize)]
struct Reloaded {
    version: u64,
}

async fn reload(
    State(s): State<Arc<AppState>>,
    ConnectInfo(peer): ConnectInfo<SocketAddr>,
) -> Response {
    if !peer.ip().is_loopback() {
        return ApiError::forbidden("reload is only accepted from the local host").into_response();
    }
    match s.reload().await {
        Ok(version) => json_response(
            StatusCode::OK,
            serde_json::to_vec(&Reloaded { version }).expect("serializes"),
        ),
        Err(e) => e.into_response(),
    }
}

async fn not_found() -> Response {
    json_response(
        StatusCode::NOT_FOUND,
        &br#"{"error":{"code":"not_found","message":"no such endpoint"}}"#[..],
    )
}

async fn method_not_allowed() -> Response {
    json_response(
        StatusCode::METHOD_NOT_ALLOWED,
        &br#"{"error":{"code":"method_not_allowed","message":"method not allowed on this endpoint"}}"#[..],
    )
}

/// All API routes. `ui` is served under `/ui` when given.
pub fn router(state: Arc<AppState>, ui: Option<PathBuf>) -> Router {
    let mut app = Router::new()
        .route("/api/summary", get(summary))
        .route("/api/geo/activity", get(activity))
        .route("/api/geo/classes", get(classes))
        .route("/api/network", get(network))
        .route("/api/themes", get(themes))
        .route("/api/themes/:id/cloud", get(cloud))
        .route("/api/admin/reload", post(reload))
        .fallback(not_found)
        .method_not_allowed_fallback(method_not_allowed);
    if let Some(dir) = ui {
        app = app.nest_service("/ui", tower_http::services::ServeDir::new(dir));
    }
    app.with_state(state)
}

/// Serves until Ctrl-C.
pub async fn serve(
    state: Arc<AppState>,
    addr: SocketAddr,
    ui: Option<PathBuf>,
) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    let app = router(state, ui).into_make_service_with_connect_info::<SocketAddr>();
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
