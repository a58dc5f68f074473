//! JSON API for human baseline sessions.
//!
//! | Method | Path | Body | Reply |
//! |---|---|---|---|
//! | POST | `/sessions` | [`CreateSession`] | 201 [`SessionCreated`] |
//! | GET | `/sessions/{id}` | | [`SessionState`] |
//! | GET | `/sessions/{id}/next` | | [`TrialPayload`] or 409 `session_complete` |
//! | GET | `/sessions/{id}/trials/{i}` | | [`TrialPayload`] of a served trial |
//! | POST | `/sessions/{id}/responses` | [`SubmitResponse`] | 201 [`HumanResponse`] |
//! | GET | `/sessions/{id}/trials/{i}/image.png` | | PNG of a served trial |
//! | GET | `/export.csv` | | per-trial CSV |
//! | GET | `/export/participants.json` | | [`ParticipantSummary`] list |
//!
//! Errors are `{"error": code, "message": text}` with codes
//! `unknown_session`, `bad_request`, `unsupported_family`,
//! `session_complete`, `unknown_trial`, `duplicate_response`,
//! `invalid_key`, `no_pending_trial` and `internal`.

pub mod store;

use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};
use store::Store;
use vsearch_core::human::{
    create_session, export_human_results, HumanResponse, ParticipantSummary, Session, SessionError, SessionEvent,
    TrialPayload, PRACTICE_TRIALS,
};
use vsearch_core::{encode_png, render_scene, Family};

pub struct AppState {
    pub store: Store,
    /// Seed for stimulus generation when a request does not supply one.
    pub master_seed: u64,
}

pub type Shared = Arc<AppState>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CreateSession {
    /// `circle-sizes`, `two-among-five` or `light-priors` (the
    /// `CircleSizes` spelling is accepted too).
    pub family: String,
    pub participant_id: String,
    #[serde(default)]
    pub master_seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionCreated {
    pub session_id: String,
    pub participant_id: String,
    pub family: String,
    pub practice_trials: usize,
    pub total_trials: usize,
    /// Response key to cell label, e.g. `"Q": "Cell (1,1)"`.
    pub key_map: Vec<(String, String)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionState {
    pub session_id: String,
    pub family: String,
    pub served: usize,
    pub answered: usize,
    pub total_trials: usize,
    /// Earliest served trial without a response; resume here after a reload.
    pub first_unanswered: Option<usize>,
    pub complete: bool,
    /// Shown to the participant once every trial is answered.
    pub completion_code: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubmitResponse {
    /// Omitted when the key press came during fixation or mask; the
    /// response then goes to the earliest served, unanswered trial.
    #[serde(default)]
    pub trial_index: Option<usize>,
    pub key: String,
    /// Measured by the client from stimulus onset.
    pub rt_ms: f64,
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: &'static str,
    message: String,
}

pub struct ApiError(StatusCode, &'static str, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(ErrorBody { error: self.1, message: self.2 })).into_response()
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let (status, code) = match &e {
            SessionError::SessionComplete => (StatusCode::CONFLICT, "session_complete"),
            SessionError::DuplicateResponse(_) => (StatusCode::CONFLICT, "duplicate_response"),
            SessionError::UnknownTrial(_) => (StatusCode::BAD_REQUEST, "unknown_trial"),
            SessionError::InvalidKey(_) => (StatusCode::UNPROCESSABLE_ENTITY, "invalid_key"),
            SessionError::UnsupportedFamily(_) => (StatusCode::BAD_REQUEST, "unsupported_family"),
            SessionError::PoolTooSmall { .. } | SessionError::Stimulus(_) | SessionError::Log(_) => {
                (StatusCode::INTERNAL_SERVER_ERROR, "internal")
            }
        };
        ApiError(status, code, e.to_string())
    }
}

fn internal(e: impl std::fmt::Display) -> ApiError {
    ApiError(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string())
}

fn unknown(id: &str) -> ApiError {
    ApiError(StatusCode::NOT_FOUND, "unknown_session", format!("no session {id}"))
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

/// Eight upper-case characters derived from the session id.
pub fn completion_code(session_id: &str) -> String {
    let hash = vsearch_core::content_hash(format!("complete:{session_id}").as_bytes());
    hash[..8].to_ascii_uppercase()
}

fn parse_family(s: &str) -> Option<Family> {
    Family::from_slug(s).or_else(|| serde_json::from_value(serde_json::Value::String(s.to_string())).ok())
}

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(state_of))
        .route("/sessions/{id}/next", get(next))
        .route("/sessions/{id}/responses", post(respond))
        .route("/sessions/{id}/trials/{index}", get(served_trial))
        .route("/sessions/{id}/trials/{index}/image.png", get(image))
        .route("/export.csv", get(export_csv))
        .route("/export/participants.json", get(export_participants))
        .with_state(state)
}

async fn create(State(app): State<Shared>, Json(req): Json<CreateSession>) -> Result<(StatusCode, Json<SessionCreated>), ApiError> {
    let family = parse_family(&req.family)
        .ok_or_else(|| ApiError(StatusCode::BAD_REQUEST, "bad_request", format!("unknown family {:?}", req.family)))?;
    if req.participant_id.trim().is_empty() {
        return Err(ApiError(StatusCode::BAD_REQUEST, "bad_request", "participant_id is empty".into()));
    }
    let seed = req.master_seed.unwrap_or(app.master_seed);
    let participant = req.participant_id.clone();
    let schedule = tokio::task::spawn_blocking(move || create_session(family, &participant, seed))
        .await
        .map_err(internal)??;
    let id = uuid::Uuid::new_v4().simple().to_string();
    let total = schedule.trials.len();
    app.store.insert(Session::new(&id, schedule)).map_err(internal)?;
    tracing::info!(session = %id, family = family.slug(), "session created");
    let key_map = ["Q", "P", "A", "L"]
        .into_iter()
        .map(|k| {
            let cell = vsearch_core::human::ResponseKey::parse(k).expect("fixed keys").cell();
            (k.to_string(), cell.to_string())
        })
        .collect();
    Ok((
        StatusCode::CREATED,
        Json(SessionCreated {
            session_id: id,
            participant_id: req.participant_id,
            family: family.slug().to_string(),
            practice_trials: PRACTICE_TRIALS,
            total_trials: total,
            key_map,
        }),
    ))
}

async fn state_of(State(app): State<Shared>, Path(id): Path<String>) -> Result<Json<SessionState>, ApiError> {
    let slot = app.store.get(&id).ok_or_else(|| unknown(&id))?;
    let slot = slot.lock().expect("session lock");
    let s = &slot.session;
    Ok(Json(SessionState {
        session_id: s.id.clone(),
        family: s.schedule.family.slug().to_string(),
        served: s.served(),
        answered: s.responses().count(),
        total_trials: s.schedule.trials.len(),
        first_unanswered: s.first_unanswered(),
        complete: s.is_complete(),
        completion_code: s.is_complete().then(|| completion_code(&s.id)),
    }))
}

async fn next(State(app): State<Shared>, Path(id): Path<String>) -> Result<Json<TrialPayload>, ApiError> {
    let slot = app.store.get(&id).ok_or_else(|| unknown(&id))?;
    let mut slot = slot.lock().expect("session lock");
    let payload = slot.session.next_trial()?;
    slot.append(&SessionEvent::Served { trial_index: payload.trial_index }).map_err(internal)?;
    Ok(Json(payload))
}

async fn served_trial(
    State(app): State<Shared>,
    Path((id, index)): Path<(String, usize)>,
) -> Result<Json<TrialPayload>, ApiError> {
    let slot = app.store.get(&id).ok_or_else(|| unknown(&id))?;
    let slot = slot.lock().expect("session lock");
    Ok(Json(slot.session.served_trial(index)?))
}

async fn respond(
    State(app): State<Shared>,
    Path(id): Path<String>,
    Json(req): Json<SubmitResponse>,
) -> Result<(StatusCode, Json<HumanResponse>), ApiError> {
    if !req.rt_ms.is_finite() || req.rt_ms < 0.0 {
        return Err(ApiError(StatusCode::BAD_REQUEST, "bad_request", "rt_ms must be a non-negative number".into()));
    }
    let slot = app.store.get(&id).ok_or_else(|| unknown(&id))?;
    let mut slot = slot.lock().expect("session lock");
    let index = match req.trial_index {
        Some(i) => i,
        None => slot
            .session
            .first_unanswered()
            .ok_or_else(|| ApiError(StatusCode::CONFLICT, "no_pending_trial", "no served trial awaits a response".into()))?,
    };
    let response = slot.session.record_response(index, &req.key, req.rt_ms, now_ms())?;
    slot.append(&SessionEvent::Responded { response: response.clone() }).map_err(internal)?;
    Ok((StatusCode::CREATED, Json(response)))
}

async fn image(State(app): State<Shared>, Path((id, index)): Path<(String, usize)>) -> Result<Response, ApiError> {
    let slot = app.store.get(&id).ok_or_else(|| unknown(&id))?;
    let scene = {
        let slot = slot.lock().expect("session lock");
        if index >= slot.session.served() {
            return Err(SessionError::UnknownTrial(index).into());
        }
        slot.session.schedule.trials[index].scene.clone()
    };
    let png = tokio::task::spawn_blocking(move || encode_png(&render_scene(&scene))).await.map_err(internal)?;
    Ok(([(header::CONTENT_TYPE, "image/png"), (header::CACHE_CONTROL, "no-store")], png).into_response())
}

fn export(app: &AppState) -> vsearch_core::human::HumanExport {
    let sessions: Vec<Session> = app.store.all().iter().map(|s| s.lock().expect("session lock").session.clone()).collect();
    let refs: Vec<&Session> = sessions.iter().collect();
    export_human_results(&refs)
}

async fn export_csv(State(app): State<Shared>) -> Response {
    ([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], export(&app).csv).into_response()
}

async fn export_participants(State(app): State<Shared>) -> Json<Vec<ParticipantSummary>> {
    Json(export(&app).participants)
}

/// Adds permissive CORS and, if given, a static directory at `/` for a
/// browser front end.
pub fn app(state: Shared, static_dir: Option<&std::path::Path>) -> Router {
    let mut router = router(state).layer(tower_http::cors::CorsLayer::permissive());
    if let Some(dir) = static_dir {
        router = router.fallback_service(tower_http::services::ServeDir::new(dir));
    }
    router
}

pub async fn serve(listener: tokio::net::TcpListener, router: Router) -> std::io::Result<()> {
    axum::serve(listener, router).await
}
