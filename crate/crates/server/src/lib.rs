//! HTTP/JSON facade over the argweave engine.
//!
//! Handlers do no computation of their own: every body comes from
//! [`argweave_core::api`], the same functions the CLI prints, so a response
//! and the matching CLI output are byte-identical for one corpus version.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use argweave_core::api::{self, ApiError, ErrorClass};
use argweave_core::corpus::{Argument, CorpusLoader, CorpusStore, Polarity};
use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use chrono::{DateTime, Utc};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use tower_http::services::ServeDir;

pub const DEFAULT_LISTEN: &str = "127.0.0.1:8080";

const EMBEDDED_UI: &str = include_str!("../ui/index.html");

/// Shared state behind every handler.
#[derive(Debug, Clone)]
pub struct AppState {
    pub store: Arc<CorpusStore>,
    /// File behind `/api/corpus/save` and `/api/corpus/load`. Both return
    /// `bad_request` when unset.
    pub corpus_path: Option<PathBuf>,
    pub loader: CorpusLoader,
    /// Built web UI assets. Without it `/ui/` serves a placeholder page.
    pub ui_dir: Option<PathBuf>,
}

impl AppState {
    pub fn new(store: Arc<CorpusStore>, loader: CorpusLoader) -> Self {
        Self {
            store,
            corpus_path: None,
            loader,
            ui_dir: None,
        }
    }

    pub fn with_corpus_path(mut self, path: PathBuf) -> Self {
        self.corpus_path = Some(path);
        self
    }

    pub fn with_ui_dir(mut self, dir: PathBuf) -> Self {
        self.ui_dir = Some(dir);
        self
    }
}

pub struct Error(ApiError);

impl<E: Into<ApiError>> From<E> for Error {
    fn from(e: E) -> Self {
        Error(e.into())
    }
}

pub fn status_for(e: &ApiError) -> StatusCode {
    match e.class() {
        ErrorClass::BadRequest => StatusCode::BAD_REQUEST,
        ErrorClass::NotFound => StatusCode::NOT_FOUND,
        ErrorClass::Conflict => StatusCode::CONFLICT,
        ErrorClass::Server => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

impl IntoResponse for Error {
    fn into_response(self) -> Response {
        if status_for(&self.0).is_server_error() {
            tracing::error!(code = %self.0.code, "{}", self.0.message);
        }
        (status_for(&self.0), json_headers(), self.0.to_json()).into_response()
    }
}

fn json_headers() -> [(header::HeaderName, &'static str); 1] {
    [(header::CONTENT_TYPE, "application/json")]
}

fn json(body: String) -> Response {
    (StatusCode::OK, json_headers(), body).into_response()
}

fn created(body: String) -> Response {
    (StatusCode::CREATED, json_headers(), body).into_response()
}

type Reply = Result<Response, Error>;

fn body<T: DeserializeOwned>(bytes: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(bytes)
        .map_err(|e| ApiError::bad_request(format!("malformed request body: {e}")))
}

async fn schemes(State(s): State<AppState>) -> Reply {
    Ok(json(api::schemes_json(&s.store.snapshot())))
}

async fn concept(State(s): State<AppState>, Path((name, id)): Path<(String, String)>) -> Reply {
    Ok(json(api::concept_json(&s.store.snapshot(), &name, &id)?))
}

async fn list_arguments(State(s): State<AppState>) -> Reply {
    Ok(json(api::arguments_json(&s.store.snapshot())))
}

async fn get_argument(State(s): State<AppState>, Path(id): Path<String>) -> Reply {
    Ok(json(api::argument_json(&s.store.snapshot(), &id)?))
}

async fn add_argument(State(s): State<AppState>, bytes: Bytes) -> Reply {
    let arg: Argument = body(&bytes)?;
    let id = arg.id.clone();
    let out = s.store.mutate(|c| {
        c.add_argument(arg)?;
        Ok(api::argument_json(c, &id))
    })?;
    Ok(created(out?))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChallengeBody {
    cq_id: String,
    raised_by: String,
    raised_at: Option<DateTime<Utc>>,
}

async fn challenge(State(s): State<AppState>, Path(id): Path<String>, bytes: Bytes) -> Reply {
    let req: ChallengeBody = body(&bytes)?;
    let at = req.raised_at.unwrap_or_else(Utc::now);
    let out = s.store.mutate(|c| {
        let ch = c.convey_cq(&id, &req.cq_id, &req.raised_by, at)?;
        Ok(api::challenge_json(c, &ch))
    })?;
    Ok(created(out))
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ResolveBody {
    note: Option<String>,
}

async fn resolve(State(s): State<AppState>, Path(id): Path<String>, bytes: Bytes) -> Reply {
    let req: ResolveBody = if bytes.is_empty() {
        ResolveBody::default()
    } else {
        body(&bytes)?
    };
    let out = s.store.mutate(|c| {
        let ch = c.resolve_cq(&id, req.note)?;
        Ok(api::challenge_json(c, &ch))
    })?;
    Ok(json(out))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TestimonyBody {
    source: String,
    statement: String,
    polarity: Polarity,
    asserted_at: Option<DateTime<Utc>>,
}

async fn testimony(State(s): State<AppState>, bytes: Bytes) -> Reply {
    let req: TestimonyBody = body(&bytes)?;
    let at = req.asserted_at.unwrap_or_else(Utc::now);
    let added = s
        .store
        .mutate(|c| c.assert_testimony(&req.source, &req.statement, req.polarity, at))?;
    let corpus = s.store.snapshot();
    let out = api::testimony_json(&corpus, &req.source, &req.statement, added)?;
    Ok(if added { created(out) } else { json(out) })
}

async fn credibility(State(s): State<AppState>, Path(id): Path<String>) -> Reply {
    Ok(json(api::credibility_json(&s.store.snapshot(), &id)?))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QueryBody {
    q: String,
    now: Option<DateTime<Utc>>,
}

async fn query(State(s): State<AppState>, bytes: Bytes) -> Reply {
    let req: QueryBody = body(&bytes)?;
    let now = req.now.unwrap_or_else(Utc::now);
    Ok(json(api::query_json(&s.store.snapshot(), &req.q, now)?))
}

async fn debate(State(s): State<AppState>, Path(id): Path<String>) -> Reply {
    Ok(json(api::debate_json(&s.store.snapshot(), &id)?))
}

fn corpus_path(s: &AppState) -> Result<&PathBuf, ApiError> {
    s.corpus_path
        .as_ref()
        .ok_or_else(|| ApiError::bad_request("the service was started without a corpus file"))
}

async fn save(State(s): State<AppState>) -> Reply {
    let path = corpus_path(&s)?.clone();
    let corpus = s.store.snapshot();
    let out = tokio::task::spawn_blocking(move || -> Result<String, ApiError> {
        corpus.save(&path)?;
        Ok(api::file_op_json("saved", &path, corpus.version()))
    })
    .await
    .map_err(|e| ApiError::new("internal", e.to_string()))??;
    Ok(json(out))
}

async fn load(State(s): State<AppState>) -> Reply {
    let path = corpus_path(&s)?.clone();
    let loader = s.loader.clone();
    let corpus = tokio::task::spawn_blocking(move || loader.load_path(&path))
        .await
        .map_err(|e| ApiError::new("internal", e.to_string()))??;
    s.store.replace(corpus);
    let current = s.store.snapshot();
    Ok(json(api::file_op_json(
        "loaded",
        corpus_path(&s)?,
        current.version(),
    )))
}

async fn embedded_ui() -> Response {
    (
        [(header::CONTENT_TYPE, "text/html; charset=utf-8")],
        EMBEDDED_UI,
    )
        .into_response()
}

async fn not_found() -> Error {
    Error(ApiError::new("unknown_endpoint", "no such endpoint"))
}

pub fn router(state: AppState) -> Router {
    let api = Router::new()
        .route("/schemes", get(schemes))
        .route("/taxonomies/{name}/concepts/{id}", get(concept))
        .route("/arguments", get(list_arguments).post(add_argument))
        .route("/arguments/{id}", get(get_argument))
        .route("/arguments/{id}/challenges", post(challenge))
        .route("/arguments/{id}/credibility", get(credibility))
        .route("/challenges/{id}/resolve", post(resolve))
        .route("/testimony", post(testimony))
        .route("/query", post(query))
        .route("/hypotheses/{id}/debate", get(debate))
        .route("/corpus/save", post(save))
        .route("/corpus/load", post(load))
        .fallback(not_found);
    let router = Router::new().nest("/api", api);
    let router = match &state.ui_dir {
        Some(dir) => router.nest_service(
            "/ui",
            ServeDir::new(dir).append_index_html_on_directories(true),
        ),
        None => router
            .route("/ui", get(embedded_ui))
            .route("/ui/", get(embedded_ui)),
    };
    router.with_state(state)
}

/// Serves until ctrl-c.
pub async fn serve(addr: SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
