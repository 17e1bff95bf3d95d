use std::sync::{Arc, Mutex, MutexGuard};
use std::time::Instant;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{FromRequestParts, Query, State};
use axum::http::header::{AUTHORIZATION, CONTENT_TYPE};
use axum::http::request::Parts;
use axum::http::StatusCode;
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::Utc;
use serde::Deserialize;
use taxotrace_core::analysis::build_report;
use taxotrace_core::annotation::{AnnotationRecord, Association, Confidence, Requirement, Treatment};
use taxotrace_core::recommender::{FeedbackAction, FeedbackEvent, HistoryStore, Suggestion};
use taxotrace_core::taxonomy::search_taxonomy;
use taxotrace_core::wire::{
    AnnotationAck, AnnotationRequest, CreateSession, DecisionRequest, DecisionResponse, Health, ReportResponse,
    SearchResponse, SessionInfo, SuggestionCard, Task, TaskResponse,
};

use crate::error::ApiError;
use crate::state::{AppState, OpenTask, SessionState};

type AppResult<T> = Result<Json<T>, ApiError>;

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/v1/health", get(health))
        .route("/v1/session", post(create_session))
        .route("/v1/task", get(get_task))
        .route("/v1/decision", post(post_decision))
        .route("/v1/annotation", post(post_annotation))
        .route("/v1/search", get(search))
        .route("/v1/report", get(report))
        .route("/v1/export", get(export))
        .with_state(state)
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().expect("lock poisoned")
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    payload.map(|Json(v)| v).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "bad_request", e.body_text()))
}

fn query<T>(q: Result<Query<T>, QueryRejection>) -> Result<T, ApiError> {
    q.map(|Query(v)| v).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "bad_request", e.body_text()))
}

/// A session resolved from `Authorization: Bearer <token>`.
pub struct Authed(Arc<Mutex<SessionState>>);

impl FromRequestParts<Arc<AppState>> for Authed {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &Arc<AppState>) -> Result<Self, Self::Rejection> {
        let token = parts
            .headers
            .get(AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "))
            .ok_or_else(ApiError::unauthorized)?;
        state.session(token.trim()).map(Authed).ok_or_else(ApiError::unauthorized)
    }
}

async fn health(State(st): State<Arc<AppState>>) -> Json<Health> {
    Json(Health { status: "ok".into(), taxonomy_objects: st.taxonomy.len(), requirements: st.requirements.len() })
}

async fn create_session(
    State(st): State<Arc<AppState>>,
    payload: Result<Json<CreateSession>, JsonRejection>,
) -> AppResult<SessionInfo> {
    let req = body(payload)?;
    let participant = req.participant.trim().to_string();
    if participant.is_empty() {
        return Err(ApiError::invalid("invalid_participant", "participant id is empty"));
    }
    let _registration = lock(&st.registration);

    let existing = st
        .sessions
        .read()
        .expect("session table poisoned")
        .values()
        .find(|s| lock(s).participant == participant)
        .cloned();
    if let Some(existing) = existing {
        let s = lock(&existing);
        if req.treatment.is_some_and(|t| t != s.treatment) {
            return Err(ApiError::conflict(
                "treatment_fixed",
                format!("participant `{participant}` is in {}", s.treatment),
            ));
        }
        return Ok(Json(session_info(&s, st.requirements.len())));
    }

    let (treatment, completed) = {
        let mut store = lock(&st.annotations);
        let treatment = match (store.session(&participant), req.treatment) {
            (Some(s), Some(t)) if s.treatment != t => {
                return Err(ApiError::conflict(
                    "treatment_fixed",
                    format!("participant `{participant}` is in {}", s.treatment),
                ));
            }
            (Some(s), _) => s.treatment,
            (None, Some(t)) => t,
            (None, None) => {
                let count = |t: Treatment| store.sessions().filter(|s| s.treatment == t).count();
                if count(Treatment::Ccr) <= count(Treatment::Search) {
                    Treatment::Ccr
                } else {
                    Treatment::Search
                }
            }
        };
        let session = store.register(&participant, treatment, Utc::now())?;
        (treatment, session.completed.clone())
    };
    let next = st.requirements.iter().position(|r| !completed.contains(&r.id)).unwrap_or(st.requirements.len());
    let state =
        SessionState { token: uuid::Uuid::new_v4().simple().to_string(), participant, treatment, next, open: None };
    let info = session_info(&state, st.requirements.len());
    tracing::info!(participant = %state.participant, treatment = %treatment, "session created");
    st.sessions.write().expect("session table poisoned").insert(state.token.clone(), Arc::new(Mutex::new(state)));
    Ok(Json(info))
}

fn session_info(s: &SessionState, total: usize) -> SessionInfo {
    SessionInfo {
        token: s.token.clone(),
        participant: s.participant.clone(),
        treatment: s.treatment,
        total_tasks: total,
        completed: s.next,
    }
}

/// Current suggestions minus the pairs already decided in this task.
fn open_cards(st: &AppState, req: &Requirement, history: &HistoryStore, open: &OpenTask) -> Vec<SuggestionCard> {
    st.recommender
        .suggest(req, history)
        .into_iter()
        .filter(|s| !open.decided.contains(&(s.stem().to_string(), s.object_code.clone())))
        .map(|suggestion| card(st, suggestion))
        .collect()
}

fn card(st: &AppState, suggestion: Suggestion) -> SuggestionCard {
    let (label, description) =
        st.taxonomy.get(&suggestion.object_code).map(|o| (o.label.clone(), o.description.clone())).unwrap_or_default();
    SuggestionCard { suggestion, label, description }
}

async fn get_task(State(st): State<Arc<AppState>>, Authed(session): Authed) -> AppResult<TaskResponse> {
    let mut s = lock(&session);
    let Some(req) = st.requirements.get(s.next) else {
        return Ok(Json(TaskResponse::Complete { completed: s.next }));
    };
    if s.open.as_ref().is_none_or(|o| o.requirement_id != req.id) {
        s.open = Some(OpenTask {
            requirement_id: req.id.clone(),
            opened_at: Utc::now(),
            clock: Instant::now(),
            decided: Default::default(),
            accepted: Vec::new(),
        });
    }
    let open = s.open.as_ref().expect("task opened above");
    let (nouns, suggestions) = match s.treatment {
        Treatment::Ccr => {
            let history = st.history.read().expect("history poisoned");
            (st.recommender.nouns(&req.text), Some(open_cards(&st, req, &history.store, open)))
        }
        Treatment::Search => (Vec::new(), None),
    };
    Ok(Json(TaskResponse::Open(Box::new(Task {
        index: s.next,
        total: st.requirements.len(),
        treatment: s.treatment,
        requirement: req.clone(),
        nouns,
        suggestions,
        accepted: open.accepted.clone(),
    }))))
}

fn open_task<'a>(s: &'a mut SessionState, requirement_id: &str) -> Result<&'a mut OpenTask, ApiError> {
    let open = s
        .open
        .as_mut()
        .ok_or_else(|| ApiError::conflict("no_open_task", "no task is open; call GET /v1/task first"))?;
    if open.requirement_id != requirement_id {
        return Err(ApiError::conflict(
            "requirement_mismatch",
            format!("open task is `{}`, not `{requirement_id}`", open.requirement_id),
        ));
    }
    Ok(open)
}

async fn post_decision(
    State(st): State<Arc<AppState>>,
    Authed(session): Authed,
    payload: Result<Json<DecisionRequest>, JsonRejection>,
) -> AppResult<DecisionResponse> {
    let d = body(payload)?;
    let mut guard = lock(&session);
    let s = &mut *guard;
    if s.treatment != Treatment::Ccr {
        return Err(ApiError::conflict("wrong_treatment", "decisions are only available in the ccr arm"));
    }
    let participant = s.participant.clone();
    let open = open_task(s, &d.requirement_id)?;
    let req =
        st.requirements.iter().find(|r| r.id == d.requirement_id).expect("open task refers to a known requirement");

    let mut history = st.history.write().expect("history poisoned");
    let matching: Vec<Suggestion> = open_cards(&st, req, &history.store, open)
        .into_iter()
        .map(|c| c.suggestion)
        .filter(|s| s.stem() == d.stem && s.object_code == d.object_code)
        .collect();
    if matching.is_empty() {
        return Err(ApiError::new(
            StatusCode::NOT_FOUND,
            "unknown_suggestion",
            format!("({}, {}) is not an open suggestion", d.stem, d.object_code),
        ));
    }
    // keep the log monotonic even if the wall clock steps back
    let timestamp = history.last.map_or_else(Utc::now, |last| last.max(Utc::now()));
    let event = FeedbackEvent {
        timestamp,
        participant,
        requirement_id: d.requirement_id.clone(),
        stem: d.stem.clone(),
        object_code: d.object_code.clone(),
        action: d.action,
    };
    {
        let h = &mut *history;
        h.store.record_feedback(&event, h.sink.as_mut())?;
        h.last = Some(timestamp);
    }
    open.decided.insert((d.stem.clone(), d.object_code.clone()));
    if d.action == FeedbackAction::Accept {
        for m in &matching {
            let assoc = Association {
                stem: d.stem.clone(),
                position: req.term_position(m.occurrence.start),
                code: d.object_code.clone(),
            };
            if !open.accepted.contains(&assoc) {
                open.accepted.push(assoc);
            }
        }
    }
    let suggestions = open_cards(&st, req, &history.store, open);
    Ok(Json(DecisionResponse { suggestions, accepted: open.accepted.clone() }))
}

async fn post_annotation(
    State(st): State<Arc<AppState>>,
    Authed(session): Authed,
    payload: Result<Json<AnnotationRequest>, JsonRejection>,
) -> AppResult<AnnotationAck> {
    let a = body(payload)?;
    let mut guard = lock(&session);
    let s = &mut *guard;
    let (participant, treatment) = (s.participant.clone(), s.treatment);
    let open = open_task(s, &a.requirement_id)?;
    let associations = a.associations.unwrap_or_else(|| open.accepted.clone());
    if let Some(unknown) = associations.iter().find(|x| st.taxonomy.get(&x.code).is_none()) {
        return Err(ApiError::invalid("unknown_object", format!("unknown taxonomy object `{}`", unknown.code)));
    }
    let duration_seconds = a.duration_override_s.unwrap_or_else(|| open.clock.elapsed().as_secs_f64());
    let record = AnnotationRecord {
        participant,
        treatment,
        requirement_id: a.requirement_id.clone(),
        duration_seconds,
        conf_correct: Confidence::new(a.conf_correct)?,
        conf_complete: Confidence::new(a.conf_complete)?,
        associations,
    };
    lock(&st.annotations).append_record(record)?;
    s.open = None;
    s.next += 1;
    Ok(Json(AnnotationAck {
        requirement_id: a.requirement_id,
        duration_seconds,
        completed: s.next,
        remaining: st.requirements.len().saturating_sub(s.next),
    }))
}

#[derive(Debug, Deserialize)]
struct SearchParams {
    q: String,
    limit: Option<usize>,
}

async fn search(
    State(st): State<Arc<AppState>>,
    Authed(_): Authed,
    params: Result<Query<SearchParams>, QueryRejection>,
) -> AppResult<SearchResponse> {
    let p = query(params)?;
    let hits =
        search_taxonomy(&st.taxonomy, st.recommender.analyzer(), &p.q, p.limit.unwrap_or(st.config.search_limit))?;
    Ok(Json(SearchResponse { query: p.q, hits }))
}

async fn report(State(st): State<Arc<AppState>>) -> AppResult<ReportResponse> {
    let records = lock(&st.annotations).records().to_vec();
    let report = build_report(&records, st.judgments.as_deref(), Some(&st.requirements), &st.config.report)?;
    Ok(Json(report))
}

#[derive(Debug, Deserialize)]
struct ExportParams {
    treatment: Option<String>,
}

async fn export(
    State(st): State<Arc<AppState>>,
    params: Result<Query<ExportParams>, QueryRejection>,
) -> Result<impl IntoResponse, ApiError> {
    let p = query(params)?;
    let filter = p
        .treatment
        .map(|t| t.parse::<Treatment>())
        .transpose()
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "bad_request", e.to_string()))?;
    let csv = lock(&st.annotations).export_dataset(filter)?;
    Ok(([(CONTENT_TYPE, "text/csv; charset=utf-8")], csv))
}
