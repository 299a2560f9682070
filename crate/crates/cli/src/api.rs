//! JSON over HTTP.
//!
//! The workspace is an immutable snapshot behind an [`ArcSwap`]; readers load
//! it without locking, writers serialize on a mutex, build the next document
//! and swap it in. Browse sessions live in memory only.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use arc_swap::ArcSwap;
use axum::extract::rejection::JsonRejection;
use axum::extract::{FromRequest, Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use nebfca::scaling::ScalePlan;
use nebfca::{init_session, BrowseSession, Error, Filters, Seed, SharingLink, ViewSpec, WorkspaceDocument};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::ops;

pub const API_VERSION: &str = "v0";

pub struct AppState {
    workspace: ArcSwap<WorkspaceDocument>,
    writer: tokio::sync::Mutex<()>,
    path: Option<PathBuf>,
    sessions: Mutex<HashMap<u64, Arc<Mutex<BrowseSession>>>>,
}

impl AppState {
    /// `path`, when given, receives every accepted mutation.
    pub fn new(doc: WorkspaceDocument, path: Option<PathBuf>) -> Arc<Self> {
        Arc::new(AppState {
            workspace: ArcSwap::from_pointee(doc),
            writer: tokio::sync::Mutex::new(()),
            path,
            sessions: Mutex::new(HashMap::new()),
        })
    }

    pub fn snapshot(&self) -> Arc<WorkspaceDocument> {
        self.workspace.load_full()
    }

    async fn mutate<T>(&self, f: impl FnOnce(&mut WorkspaceDocument) -> nebfca::Result<T>) -> Result<T, ApiError> {
        let _guard = self.writer.lock().await;
        let mut next = (*self.workspace.load_full()).clone();
        let out = f(&mut next)?;
        if let Some(path) = &self.path {
            next.save(path)?;
        }
        self.workspace.store(Arc::new(next));
        Ok(out)
    }

    fn session(&self, id: &str) -> Result<(u64, Arc<Mutex<BrowseSession>>), ApiError> {
        let found = id
            .parse::<u64>()
            .ok()
            .and_then(|n| self.sessions.lock().unwrap().get(&n).map(|s| (n, s.clone())));
        found.ok_or_else(|| ApiError::not_found("session", id))
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
    detail: Value,
}

impl ApiError {
    fn not_found(kind: &str, id: &str) -> Self {
        ApiError {
            status: StatusCode::NOT_FOUND,
            code: "not_found",
            message: format!("unknown {kind} `{id}`"),
            detail: json!({ "kind": kind, "id": id }),
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let (status, code, detail) = match &e {
            Error::Unknown { kind, name } => (StatusCode::BAD_REQUEST, "unknown", json!({ "kind": kind, "name": name })),
            Error::Parse(p) => (StatusCode::BAD_REQUEST, "parse", json!({ "offset": p.offset, "expected": p.expected })),
            Error::Type(_) => (StatusCode::BAD_REQUEST, "type", Value::Null),
            Error::Validation(report) => (
                StatusCode::BAD_REQUEST,
                "validation",
                json!({ "violations": report.violations }),
            ),
            Error::Cycle(path) => (StatusCode::BAD_REQUEST, "cycle", json!({ "path": path })),
            Error::Syntax { line, .. } => (StatusCode::BAD_REQUEST, "syntax", json!({ "line": line })),
            Error::Filter(_) => (StatusCode::BAD_REQUEST, "filter", Value::Null),
            Error::Io { .. } => (StatusCode::INTERNAL_SERVER_ERROR, "io", Value::Null),
            _ => (StatusCode::BAD_REQUEST, "invalid", Value::Null),
        };
        ApiError {
            status,
            code,
            message: e.to_string(),
            detail,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({
            "version": API_VERSION,
            "code": self.code,
            "message": self.message,
            "detail": self.detail,
        });
        (self.status, axum::Json(body)).into_response()
    }
}

/// A JSON body whose rejections use the error envelope.
pub struct Json<T>(pub T);

impl<S: Send + Sync, T> FromRequest<S> for Json<T>
where
    axum::Json<T>: FromRequest<S, Rejection = JsonRejection>,
{
    type Rejection = ApiError;

    async fn from_request(req: axum::extract::Request, state: &S) -> Result<Self, Self::Rejection> {
        match axum::Json::<T>::from_request(req, state).await {
            Ok(axum::Json(v)) => Ok(Json(v)),
            Err(r) => Err(ApiError {
                status: r.status(),
                code: "bad_request",
                message: r.body_text(),
                detail: Value::Null,
            }),
        }
    }
}

#[derive(Serialize)]
struct Envelope<T> {
    version: &'static str,
    #[serde(flatten)]
    body: T,
}

fn reply<T: Serialize>(body: T) -> axum::Json<Envelope<T>> {
    axum::Json(Envelope {
        version: API_VERSION,
        body,
    })
}

type ApiResult<T> = Result<axum::Json<Envelope<T>>, ApiError>;

fn require_context(doc: &WorkspaceDocument, id: &str) -> Result<(), ApiError> {
    if doc.contexts.contains_key(id) {
        Ok(())
    } else {
        Err(ApiError::not_found("context", id))
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/contexts", get(list_contexts))
        .route("/api/contexts/{id}", get(get_context))
        .route("/api/contexts/{id}/lattice", get(get_lattice))
        .route("/api/contexts/{id}/query", post(post_query))
        .route("/api/contexts/{id}/views", get(get_views).post(post_view))
        .route("/api/sessions", post(post_session))
        .route("/api/sessions/{id}/neighborhood", post(post_neighborhood))
        .route("/api/sessions/{id}/union", post(post_union))
        .route("/api/shared", post(post_shared))
        .with_state(state)
}

#[derive(Serialize)]
struct ContextEntry {
    id: String,
    objects: usize,
    sorts: usize,
    views: usize,
}

async fn list_contexts(State(state): State<Arc<AppState>>) -> ApiResult<Value> {
    let doc = state.snapshot();
    let contexts: Vec<ContextEntry> = doc
        .contexts
        .iter()
        .map(|(id, mv)| ContextEntry {
            id: id.clone(),
            objects: mv.objects().len(),
            sorts: mv.sorts().len(),
            views: doc.systems.get(id).map_or(0, Vec::len),
        })
        .collect();
    Ok(reply(json!({ "contexts": contexts })))
}

async fn get_context(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Value> {
    let doc = state.snapshot();
    require_context(&doc, &id)?;
    let scaled = doc.formal_context(&id)?;
    Ok(reply(json!({
        "id": id,
        "context": doc.context(&id)?,
        "plan": doc.plan_for(&id)?,
        "attributes": scaled.attributes(),
        "views": doc.views(&id)?,
    })))
}

#[derive(Deserialize)]
struct LatticeParams {
    #[serde(default)]
    extended: bool,
}

async fn get_lattice(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(params): Query<LatticeParams>,
) -> ApiResult<Value> {
    let doc = state.snapshot();
    require_context(&doc, &id)?;
    let lattice = ops::lattice(&doc, &id, params.extended)?;
    let mut body = serde_json::to_value(lattice).expect("lattice serializes");
    body["context"] = json!(id);
    body["extended"] = json!(params.extended);
    Ok(reply(body))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QueryBody {
    q: String,
    #[serde(default)]
    scope: Option<String>,
}

async fn post_query(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(body): Json<QueryBody>,
) -> ApiResult<Value> {
    let doc = state.snapshot();
    require_context(&doc, &id)?;
    let objects = ops::query(&doc, &id, &body.q, body.scope.as_deref())?;
    Ok(reply(json!({ "objects": objects })))
}

async fn get_views(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Value> {
    let doc = state.snapshot();
    require_context(&doc, &id)?;
    Ok(reply(json!({ "views": ops::views(&doc, &id)? })))
}

async fn post_view(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(spec): Json<ViewSpec>,
) -> Result<(StatusCode, axum::Json<Envelope<Value>>), ApiError> {
    require_context(&state.snapshot(), &id)?;
    let name = spec.name.clone();
    let view = state
        .mutate(|doc| {
            doc.add_view(&id, spec)?;
            let all = ops::views(doc, &id)?;
            Ok(all.into_iter().find(|v| v.name == name).expect("view just added"))
        })
        .await?;
    Ok((StatusCode::CREATED, reply(json!({ "view": view }))))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Facet {
    name: String,
    plan: ScalePlan,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SessionBody {
    context: String,
    #[serde(default)]
    facets: Option<Vec<Facet>>,
}

async fn post_session(
    State(state): State<Arc<AppState>>,
    Json(body): Json<SessionBody>,
) -> Result<(StatusCode, axum::Json<Envelope<Value>>), ApiError> {
    let doc = state.snapshot();
    let mv = doc
        .context(&body.context)
        .map_err(|_| ApiError::not_found("context", &body.context))?;
    let session = match body.facets {
        Some(facets) => {
            let facets: Vec<(String, ScalePlan)> = facets.into_iter().map(|f| (f.name, f.plan)).collect();
            init_session(mv, &facets)?
        }
        None => BrowseSession::new(doc.formal_context(&body.context)?),
    };
    let id = session.id();
    let out = json!({
        "session": id,
        "context": body.context,
        "objects": session.context().objects(),
        "attributes": session.context().attributes(),
        "analysis": session.analysis(),
    });
    state.sessions.lock().unwrap().insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, reply(out)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NeighborhoodBody {
    seed: Seed,
    #[serde(default)]
    filters: Filters,
}

async fn post_neighborhood(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(body): Json<NeighborhoodBody>,
) -> ApiResult<Value> {
    let (id, session) = state.session(&id)?;
    let mut session = session.lock().unwrap();
    let doc = session.browse(body.seed, &body.filters)?.to_document();
    let index = session.current_index().expect("browse sets the current entry");
    Ok(reply(json!({ "session": id, "index": index, "neighborhood": doc })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UnionBody {
    a: usize,
    b: usize,
}

async fn post_union(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(body): Json<UnionBody>,
) -> ApiResult<Value> {
    let (id, session) = state.session(&id)?;
    let session = session.lock().unwrap();
    let history = session.history();
    let pick = |i: usize| {
        history
            .get(i)
            .map(|(_, n)| n)
            .ok_or_else(|| ApiError::not_found("neighborhood", &i.to_string()))
    };
    let (a, b) = (pick(body.a)?, pick(body.b)?);
    let union = session.union_neighborhood(a, b)?;
    let (ea, eb): (Vec<_>, Vec<_>) = (a.reported_extents(), b.reported_extents());
    let shared = union
        .reported_extents()
        .into_iter()
        .filter(|e| ea.contains(e) && eb.contains(e))
        .count();
    let moved = union.reported.len() - shared;
    Ok(reply(json!({
        "session": id,
        "neighborhood": union.to_document(),
        "shared": shared,
        "moved": moved,
    })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SharedBody {
    #[serde(default)]
    spaces: Vec<String>,
    #[serde(default)]
    links: Option<Vec<SharingLink>>,
}

async fn post_shared(State(state): State<Arc<AppState>>, Json(body): Json<SharedBody>) -> ApiResult<Value> {
    let doc = state.snapshot();
    for s in &body.spaces {
        require_context(&doc, s)?;
    }
    let space = ops::shared(&doc, &body.spaces, body.links)?;
    Ok(reply(serde_json::to_value(ops::shared_summary(&space)).expect("matrix serializes")))
}
