#![allow(dead_code)]

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Body;
use axum::extract::connect_info::MockConnectInfo;
use axum::http::{Request, StatusCode};
use axum::Router;
use biblionet::fixtures::three_paper_corpus;
use biblionet_server::{router, AppState, DataConfig};
use http_body_util::BodyExt;
use tempfile::TempDir;
use tower::ServiceExt;

pub const LEXICONS: &str = concat!(
    r#"{"name": "boundaries", "terms": ["border", "boundary", "frontier"]}"#,
    "\n",
    r#"{"name": "risk", "terms": ["risk", "hazard", "flood"]}"#,
    "\n"
);

/// Temporary directory holding the three-paper corpus and two lexicons.
pub struct Fixture {
    pub dir: TempDir,
    pub config: DataConfig,
}

impl Fixture {
    pub fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let corpus = dir.path().join("corpus.jsonl");
        let lexicons = dir.path().join("lexicons.jsonl");
        std::fs::write(&corpus, three_paper_corpus().to_jsonl()).unwrap();
        std::fs::write(&lexicons, LEXICONS).unwrap();
        let mut config = DataConfig::new(&corpus);
        config.lexicons = Some(lexicons);
        config.seed = 7;
        Fixture { dir, config }
    }

    pub fn corpus_path(&self) -> PathBuf {
        self.config.corpus.clone()
    }

    pub fn state(&self) -> Arc<AppState> {
        AppState::load(self.config.clone(), None).unwrap()
    }
}

pub fn app(state: Arc<AppState>, peer: [u8; 4]) -> Router {
    router(state, None).layer(MockConnectInfo(SocketAddr::from((peer, 4000))))
}

pub async fn call(app: &Router, method: &str, uri: &str) -> (StatusCode, Vec<u8>) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .body(Body::empty())
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let ct = resp
        .headers()
        .get("content-type")
        .map(|v| v.to_str().unwrap().to_string());
    let bytes = resp
        .into_body()
        .collect()
        .await
        .unwrap()
        .to_bytes()
        .to_vec();
    assert_eq!(
        ct.as_deref(),
        Some("application/json; charset=utf-8"),
        "{uri}"
    );
    (status, bytes)
}

pub async fn get_json(app: &Router, uri: &str) -> (StatusCode, serde_json::Value) {
    let (status, body) = call(app, "GET", uri).await;
    (status, serde_json::from_slice(&body).unwrap())
}
