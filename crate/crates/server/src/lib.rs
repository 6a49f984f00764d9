//! HTTP session service for the independence solitaire.
//!
//! Sessions live in memory. Each one serializes its own mutations behind a
//! mutex; reads clone the committed state. An optional JSON-lines log records
//! every mutation and can be replayed on startup.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::{json, Value};
use tep_core::solitaire::{apply_move, component, legal_moves, verify_independent, SolitaireMove};
use tep_core::tep::TepFamily;
use tep_core::{ConvexGeometry, Error, GroupSpec, Shape};
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

mod schema;

pub const DEFAULT_INDEPENDENCE_BUDGET: u64 = 1 << 24;
pub const DEFAULT_COMPONENT_LIMIT: u64 = 100_000;

#[derive(Clone, Debug)]
pub struct Session {
    pub id: String,
    pub group: GroupSpec,
    pub s: Shape,
    pub t: Shape,
    pub geometry: ConvexGeometry,
    pub family: Option<TepFamily>,
    pub initial: Shape,
    pub current: Shape,
    pub history: Vec<SolitaireMove>,
}

impl Session {
    pub fn state_json(&self) -> Value {
        json!({
            "id": self.id,
            "group": self.group,
            "s": members(&self.s),
            "t": members(&self.t),
            "support": members(&self.current),
            "history_len": self.history.len(),
            "has_family": self.family.is_some(),
        })
    }

    /// Everything needed to rebuild the session: a valid `POST /sessions` body.
    pub fn export_json(&self) -> Value {
        let mut v = json!({
            "group": self.group,
            "s": members(&self.s),
            "t": members(&self.t),
            "geometry": self.geometry.to_json(),
            "initial": members(&self.initial),
            "moves": self.history.iter().map(SolitaireMove::to_json).collect::<Vec<_>>(),
        });
        if let Some(f) = &self.family {
            v["family"] = f.to_json();
        }
        v
    }

    fn apply(&mut self, mv: &SolitaireMove) -> Result<(), ApiError> {
        let next = apply_move(&self.current, mv, &self.s, &self.t).map_err(|e| ApiError::conflict(clause(&e)))?;
        self.current = next;
        self.history.push(mv.clone());
        Ok(())
    }

    fn undo(&mut self) -> Result<(), ApiError> {
        let mv = self.history.pop().ok_or_else(|| ApiError::conflict("history is empty"))?;
        // the move is its own inverse on the support it produced
        self.current = apply_move(&self.current, &mv, &self.s, &self.t).expect("recorded move reverses");
        Ok(())
    }
}

fn members(s: &Shape) -> Value {
    json!(s.iter().map(|g| g.to_json()).collect::<Vec<_>>())
}

fn clause(e: &Error) -> String {
    match e {
        Error::Usage(m) => m.clone(),
        other => other.to_string(),
    }
}

/// Parses a `POST /sessions` body. `moves`, when present, are replayed in
/// order; the first illegal one rejects the whole request.
pub fn session_from_json(id: String, v: &Value) -> Result<Session, ApiError> {
    let bad = |e: Error| ApiError::bad_request(clause(&e));
    let group: GroupSpec = serde_json::from_value(v.get("group").cloned().unwrap_or(Value::Null))
        .map_err(|e| ApiError::bad_request(format!("bad group: {e}")))?;
    group.validate().map_err(bad)?;
    let shape = |name: &str| -> Result<Option<Shape>, ApiError> {
        match v.get(name) {
            None | Some(Value::Null) => Ok(None),
            Some(x) => parse_shape(group, x).map(Some).map_err(bad),
        }
    };
    let s = shape("s")?.ok_or_else(|| ApiError::bad_request("missing field \"s\""))?;
    if s.is_empty() {
        return Err(ApiError::bad_request("S must be nonempty"));
    }
    let geometry = match v.get("geometry") {
        None | Some(Value::Null) => ConvexGeometry::default_for(group),
        Some(g) => ConvexGeometry::from_json(group, g).map_err(bad)?,
    };
    let t = match shape("t")? {
        Some(t) => t,
        None => geometry.translated_lax_corners(&s).map_err(|e| ApiError::unprocessable(clause(&e)))?,
    };
    if !t.is_subset(&s) {
        return Err(ApiError::unprocessable("T must be a subset of S"));
    }
    let initial = shape("initial")?.ok_or_else(|| ApiError::bad_request("missing field \"initial\""))?;
    let family = match v.get("family") {
        None | Some(Value::Null) => None,
        Some(f) => {
            let fam = TepFamily::from_json(f).map_err(bad)?;
            if fam.shape.group != group {
                return Err(ApiError::bad_request("family lives in a different group"));
            }
            Some(fam)
        }
    };
    let mut session = Session { id, group, s, t, geometry, family, current: initial.clone(), initial, history: Vec::new() };
    if let Some(moves) = v.get("moves") {
        let arr = moves.as_array().ok_or_else(|| ApiError::bad_request("moves must be an array"))?;
        for (i, m) in arr.iter().enumerate() {
            let mv = SolitaireMove::from_json(group, m).map_err(bad)?;
            session.apply(&mv).map_err(|e| ApiError::conflict(format!("move {i}: {}", e.message)))?;
        }
    }
    Ok(session)
}

/// A bare member list or a `{group, members}` object in the same group.
fn parse_shape(group: GroupSpec, v: &Value) -> tep_core::Result<Shape> {
    if v.is_array() {
        return Shape::members_from_json(group, v);
    }
    let s = Shape::from_json(v)?;
    if s.group != group {
        return Err(Error::Usage(format!("shape in group {:?}, session in {group:?}", s.group)));
    }
    Ok(s)
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
    pub detail: Option<Value>,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> ApiError {
        ApiError { status, message: message.into(), detail: None }
    }
    fn bad_request(m: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::BAD_REQUEST, m)
    }
    fn unprocessable(m: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, m)
    }
    fn conflict(m: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::CONFLICT, m)
    }
    fn not_found(what: &str, id: &str) -> ApiError {
        ApiError::new(StatusCode::NOT_FOUND, format!("no {what} {id:?}"))
    }
    fn too_large(m: impl Into<String>, detail: Value) -> ApiError {
        ApiError { status: StatusCode::PAYLOAD_TOO_LARGE, message: m.into(), detail: Some(detail) }
    }
    fn internal(m: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, m)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({"error": self.message});
        if let Some(d) = self.detail {
            body["detail"] = d;
        }
        (self.status, Json(body)).into_response()
    }
}

type ApiResult = Result<Response, ApiError>;

#[derive(Clone, Debug)]
enum Job {
    Running,
    Done(Value),
    Failed(String),
}

impl Job {
    fn to_json(&self, id: &str) -> Value {
        match self {
            Job::Running => json!({"job": id, "status": "running"}),
            Job::Done(r) => json!({"job": id, "status": "done", "report": r}),
            Job::Failed(e) => json!({"job": id, "status": "failed", "error": e}),
        }
    }
}

#[derive(Default)]
pub struct Config {
    /// Append-only mutation log; replayed by [`AppState::open`].
    pub log_path: Option<PathBuf>,
    /// Allowed CORS origin; any origin when unset.
    pub allow_origin: Option<String>,
}

pub struct AppState {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    jobs: Mutex<HashMap<String, Job>>,
    log: Option<Mutex<File>>,
}

impl AppState {
    pub fn in_memory() -> Arc<AppState> {
        Arc::new(AppState { sessions: RwLock::default(), jobs: Mutex::default(), log: None })
    }

    /// Replays the log at `path` if it exists, then keeps appending to it.
    pub fn open(path: &Path) -> std::io::Result<Arc<AppState>> {
        let sessions = if path.exists() { replay_log(path)? } else { HashMap::new() };
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        let sessions = sessions.into_iter().map(|(k, s)| (k, Arc::new(Mutex::new(s)))).collect();
        Ok(Arc::new(AppState { sessions: RwLock::new(sessions), jobs: Mutex::default(), log: Some(Mutex::new(file)) }))
    }

    fn record(&self, rec: Value) -> Result<(), ApiError> {
        if let Some(log) = &self.log {
            let mut f = log.lock().unwrap();
            writeln!(f, "{rec}").and_then(|_| f.flush()).map_err(|e| ApiError::internal(format!("log write: {e}")))?;
        }
        Ok(())
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.sessions.read().unwrap().get(id).cloned().ok_or_else(|| ApiError::not_found("session", id))
    }

    fn snapshot(&self, id: &str) -> Result<Session, ApiError> {
        Ok(self.session(id)?.lock().unwrap().clone())
    }

    pub fn session_count(&self) -> usize {
        self.sessions.read().unwrap().len()
    }
}

fn replay_log(path: &Path) -> std::io::Result<HashMap<String, Session>> {
    let invalid = |m: String| std::io::Error::new(std::io::ErrorKind::InvalidData, m);
    let mut sessions: HashMap<String, Session> = HashMap::new();
    for (n, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: Value = serde_json::from_str(&line).map_err(|e| invalid(format!("line {}: {e}", n + 1)))?;
        let id = rec["id"].as_str().ok_or_else(|| invalid(format!("line {}: missing id", n + 1)))?.to_string();
        let fail = |e: ApiError| invalid(format!("line {}: {}", n + 1, e.message));
        match rec["op"].as_str() {
            Some("create") => {
                let s = session_from_json(id.clone(), &rec["body"]).map_err(fail)?;
                sessions.insert(id, s);
            }
            Some("move") => {
                let s = sessions.get_mut(&id).ok_or_else(|| invalid(format!("line {}: unknown session", n + 1)))?;
                let mv = SolitaireMove::from_json(s.group, &rec["move"]).map_err(|e| invalid(e.to_string()))?;
                s.apply(&mv).map_err(fail)?;
            }
            Some("undo") => {
                let s = sessions.get_mut(&id).ok_or_else(|| invalid(format!("line {}: unknown session", n + 1)))?;
                s.undo().map_err(fail)?;
            }
            Some("delete") => {
                sessions.remove(&id);
            }
            _ => return Err(invalid(format!("line {}: unknown op", n + 1))),
        }
    }
    Ok(sessions)
}

pub fn router(state: Arc<AppState>, allow_origin: Option<&str>) -> Router {
    let origin = match allow_origin.and_then(|o| HeaderValue::from_str(o).ok()) {
        Some(o) => AllowOrigin::exact(o),
        None => AllowOrigin::any(),
    };
    let cors = CorsLayer::new().allow_origin(origin).allow_methods(Any).allow_headers(Any);
    Router::new()
        .route("/schema", get(|| async { Json(schema::schema()) }))
        .route("/sessions", post(create_session))
        .route("/sessions/:id", get(get_session).delete(delete_session))
        .route("/sessions/:id/moves", get(list_moves).post(post_move))
        .route("/sessions/:id/undo", post(undo))
        .route("/sessions/:id/history", get(history))
        .route("/sessions/:id/independence", get(independence))
        .route("/sessions/:id/component", get(component_sync))
        .route("/sessions/:id/component/jobs", post(component_job))
        .route("/jobs/:id", get(job_status))
        .layer(cors)
        .with_state(state)
}

pub async fn serve(addr: SocketAddr, config: Config) -> std::io::Result<()> {
    let state = match &config.log_path {
        Some(p) => AppState::open(p)?,
        None => AppState::in_memory(),
    };
    let app = router(state, config.allow_origin.as_deref());
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app).await
}

fn parse_body(body: &Bytes) -> Result<Value, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed JSON: {e}")))
}

fn ok(v: Value) -> ApiResult {
    Ok(Json(v).into_response())
}

async fn create_session(State(app): State<Arc<AppState>>, body: Bytes) -> ApiResult {
    let v = parse_body(&body)?;
    let id = uuid::Uuid::new_v4().simple().to_string();
    let session = session_from_json(id.clone(), &v)?;
    // log the normalized body so recovery does not depend on defaults
    app.record(json!({"op": "create", "id": id, "body": session.export_json()}))?;
    let state = session.state_json();
    app.sessions.write().unwrap().insert(id.clone(), Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(json!({"id": id, "state": state}))).into_response())
}

async fn get_session(State(app): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult {
    ok(app.snapshot(&id)?.state_json())
}

async fn delete_session(State(app): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult {
    let s = app.session(&id)?;
    let _guard = s.lock().unwrap();
    app.record(json!({"op": "delete", "id": id}))?;
    app.sessions.write().unwrap().remove(&id);
    Ok(StatusCode::NO_CONTENT.into_response())
}

async fn list_moves(State(app): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult {
    let s = app.snapshot(&id)?;
    let moves: Vec<Value> = legal_moves(&s.current, &s.s, &s.t)
        .iter()
        .map(|m| json!({"move": m.to_json(), "leaving": m.a.to_json(), "entering": m.b.to_json()}))
        .collect();
    ok(json!({"moves": moves}))
}

async fn post_move(State(app): State<Arc<AppState>>, UrlPath(id): UrlPath<String>, body: Bytes) -> ApiResult {
    let v = parse_body(&body)?;
    let session = app.session(&id)?;
    let mut s = session.lock().unwrap();
    let mv_json = v.get("move").unwrap_or(&v);
    let mv = SolitaireMove::from_json(s.group, mv_json).map_err(|e| ApiError::bad_request(clause(&e)))?;
    let before = (s.current.clone(), s.history.len());
    s.apply(&mv)?;
    if let Err(e) = app.record(json!({"op": "move", "id": id, "move": mv.to_json()})) {
        s.current = before.0;
        s.history.truncate(before.1);
        return Err(e);
    }
    ok(s.state_json())
}

async fn undo(State(app): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult {
    let session = app.session(&id)?;
    let mut s = session.lock().unwrap();
    if s.history.is_empty() {
        return Err(ApiError::conflict("history is empty"));
    }
    app.record(json!({"op": "undo", "id": id}))?;
    s.undo()?;
    ok(s.state_json())
}

async fn history(State(app): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult {
    ok(app.snapshot(&id)?.export_json())
}

fn positive(q: &HashMap<String, String>, name: &str, default: u64) -> Result<u64, ApiError> {
    match q.get(name) {
        None => Ok(default),
        Some(x) => match x.parse::<u64>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(ApiError::bad_request(format!("{name} must be a positive integer"))),
        },
    }
}

async fn independence(
    State(app): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<HashMap<String, String>>,
) -> ApiResult {
    let budget = positive(&q, "budget", DEFAULT_INDEPENDENCE_BUDGET)?;
    let s = app.snapshot(&id)?;
    let Some(family) = s.family.clone() else {
        return Err(ApiError::conflict("no family attached to this session"));
    };
    let support = s.current.clone();
    let result = tokio::task::spawn_blocking(move || verify_independent(&support, &family, &s.geometry, budget))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?;
    match result {
        Ok(b) => ok(json!({"independent": b, "support_size": s.current.len()})),
        Err(Error::Resource { what, .. }) => Err(ApiError::too_large(
            format!("budget exceeded: {what}"),
            json!({"budget": budget, "support_size": s.current.len(), "alphabet": s.family.unwrap().alphabet.size}),
        )),
        Err(e) => Err(ApiError::unprocessable(clause(&e))),
    }
}

async fn component_sync(
    State(app): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<HashMap<String, String>>,
) -> ApiResult {
    let limit = positive(&q, "limit", DEFAULT_COMPONENT_LIMIT)?;
    let s = app.snapshot(&id)?;
    let rep = tokio::task::spawn_blocking(move || component(&s.current, &s.s, &s.t, limit, false))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?;
    if !rep.exhausted {
        return Err(ApiError::too_large(format!("component has more than {limit} supports"), rep.to_json()));
    }
    ok(json!({"size": rep.size, "exhausted": true}))
}

async fn component_job(
    State(app): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<HashMap<String, String>>,
) -> ApiResult {
    let limit = positive(&q, "limit", DEFAULT_COMPONENT_LIMIT)?;
    let s = app.snapshot(&id)?;
    let job = uuid::Uuid::new_v4().simple().to_string();
    app.jobs.lock().unwrap().insert(job.clone(), Job::Running);
    let (app2, job2) = (app.clone(), job.clone());
    tokio::spawn(async move {
        let res = tokio::task::spawn_blocking(move || component(&s.current, &s.s, &s.t, limit, false)).await;
        let out = match res {
            Ok(rep) => Job::Done(rep.to_json()),
            Err(e) => Job::Failed(e.to_string()),
        };
        app2.jobs.lock().unwrap().insert(job2, out);
    });
    Ok((StatusCode::ACCEPTED, Json(json!({"job": job, "status": "running"}))).into_response())
}

async fn job_status(State(app): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult {
    let jobs = app.jobs.lock().unwrap();
    let job = jobs.get(&id).ok_or_else(|| ApiError::not_found("job", &id))?;
    ok(job.to_json(&id))
}
