//! HTTP front end of the session service.
//!
//! All sessions live in one [`Service`] behind a mutex, so moves are
//! serialized per session. Each session has a broadcast channel; every view
//! produced by a move is pushed to its live sockets.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::{Arc, Mutex};

use axum::extract::rejection::JsonRejection;
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use tokio::sync::broadcast;

use clwork::service::{
    parse_request, prove_request, CreateSession, ErrorKind, Event, MoveRequest, ParseRequest, ProveRequest, Service,
    ServiceError, SessionView,
};

use crate::CliError;

/// Views buffered per live channel; slower sockets skip to the latest.
const CHANNEL_DEPTH: usize = 64;

struct Inner {
    service: Service,
    channels: HashMap<String, broadcast::Sender<SessionView>>,
    log: Option<File>,
    /// Events already written to `log`.
    logged: usize,
}

impl Inner {
    fn persist(&mut self) -> Result<(), ServiceError> {
        let events = self.service.events();
        if let Some(file) = self.log.as_mut() {
            for e in &events[self.logged..] {
                let line = serde_json::to_string(e).expect("events serialize");
                writeln!(file, "{line}").map_err(|e| ServiceError::BadRequest(format!("event log: {e}")))?;
            }
            file.flush().map_err(|e| ServiceError::BadRequest(format!("event log: {e}")))?;
        }
        self.logged = events.len();
        Ok(())
    }

    fn channel(&mut self, id: &str) -> broadcast::Sender<SessionView> {
        self.channels.entry(id.to_string()).or_insert_with(|| broadcast::channel(CHANNEL_DEPTH).0).clone()
    }

    fn post(&mut self, id: &str, req: &MoveRequest) -> Result<SessionView, ServiceError> {
        let view = self.service.post_move(id, req)?;
        self.persist()?;
        let _ = self.channel(id).send(view.clone());
        Ok(view)
    }
}

#[derive(Clone)]
pub struct AppState(Arc<Mutex<Inner>>);

impl AppState {
    /// A fresh store, or one replayed from `event_log` (one JSON event per
    /// line) which then receives every new event.
    pub fn new(event_log: Option<&Path>) -> Result<AppState, CliError> {
        let mut service = Service::new();
        let mut log = None;
        if let Some(path) = event_log {
            if path.exists() {
                let file =
                    File::open(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
                let mut events: Vec<Event> = Vec::new();
                for (i, line) in BufReader::new(file).lines().enumerate() {
                    let line = line.map_err(|e| CliError::Usage(e.to_string()))?;
                    if line.trim().is_empty() {
                        continue;
                    }
                    let e = serde_json::from_str(&line)
                        .map_err(|e| CliError::Engine(format!("event log line {}: {e}", i + 1)))?;
                    events.push(e);
                }
                service = Service::replay(&events).map_err(|e| CliError::Engine(format!("event log replay: {e}")))?;
            }
            let file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))?;
            log = Some(file);
        }
        let logged = service.events().len();
        Ok(AppState(Arc::new(Mutex::new(Inner { service, channels: HashMap::new(), log, logged }))))
    }

    fn with<T>(&self, f: impl FnOnce(&mut Inner) -> T) -> T {
        let mut inner = self.0.lock().unwrap_or_else(|p| p.into_inner());
        f(&mut inner)
    }
}

struct ApiError(ServiceError);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match self.0.kind() {
            ErrorKind::BadRequest => StatusCode::BAD_REQUEST,
            ErrorKind::NotFound => StatusCode::NOT_FOUND,
            ErrorKind::Conflict => StatusCode::CONFLICT,
            ErrorKind::Unprocessable => StatusCode::UNPROCESSABLE_ENTITY,
        };
        (status, Json(self.0.response())).into_response()
    }
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> ApiError {
        ApiError(e)
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> ApiError {
        ApiError(ServiceError::BadRequest(e.body_text()))
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/moves", post(post_move))
        .route("/sessions/{id}/live", get(live))
        .route("/parse", post(parse_formula))
        .route("/prove", post(prove_formula))
        .with_state(state)
}

async fn create_session(
    State(state): State<AppState>,
    body: Result<Json<CreateSession>, JsonRejection>,
) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    let Json(req) = body?;
    let view = state.with(|inner| {
        let view = inner.service.create_session(req)?;
        inner.persist()?;
        inner.channel(&view.id);
        Ok::<_, ServiceError>(view)
    })?;
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_session(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<SessionView> {
    Ok(Json(state.with(|inner| inner.service.get_state(&id))?))
}

async fn post_move(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    body: Result<Json<MoveRequest>, JsonRejection>,
) -> ApiResult<SessionView> {
    let Json(req) = body?;
    Ok(Json(state.with(|inner| inner.post(&id, &req))?))
}

async fn parse_formula(body: Result<Json<ParseRequest>, JsonRejection>) -> ApiResult<clwork::service::ParseResponse> {
    let Json(req) = body?;
    Ok(Json(parse_request(&req)?))
}

async fn prove_formula(body: Result<Json<ProveRequest>, JsonRejection>) -> ApiResult<clwork::service::ProveResponse> {
    let Json(req) = body?;
    // Proof search is CPU-bound; keep it off the async workers.
    let r = tokio::task::spawn_blocking(move || prove_request(&req))
        .await
        .map_err(|e| ServiceError::BadRequest(format!("prover task failed: {e}")))?;
    Ok(Json(r?))
}

async fn live(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    ws: WebSocketUpgrade,
) -> Result<Response, ApiError> {
    let (view, rx) = state.with(|inner| {
        let view = inner.service.get_state(&id)?;
        Ok::<_, ServiceError>((view, inner.channel(&id).subscribe()))
    })?;
    Ok(ws.on_upgrade(move |socket| live_socket(socket, state, id, view, rx)))
}

fn text(value: &impl serde::Serialize) -> Message {
    Message::Text(serde_json::to_string(value).expect("wire messages serialize").into())
}

/// Sends the current view, then every view broadcast for the session.
/// Incoming text frames are move requests; errors go back to the sender
/// only.
async fn live_socket(
    mut socket: WebSocket,
    state: AppState,
    id: String,
    view: SessionView,
    mut rx: broadcast::Receiver<SessionView>,
) {
    if socket.send(text(&view)).await.is_err() {
        return;
    }
    loop {
        tokio::select! {
            pushed = rx.recv() => match pushed {
                Ok(v) => {
                    if socket.send(text(&v)).await.is_err() {
                        return;
                    }
                }
                Err(broadcast::error::RecvError::Lagged(_)) => {
                    let Ok(v) = state.with(|inner| inner.service.get_state(&id)) else { return };
                    if socket.send(text(&v)).await.is_err() {
                        return;
                    }
                }
                Err(broadcast::error::RecvError::Closed) => return,
            },
            incoming = socket.recv() => {
                let msg = match incoming {
                    Some(Ok(Message::Text(t))) => t,
                    Some(Ok(Message::Close(_))) | None | Some(Err(_)) => return,
                    Some(Ok(_)) => continue,
                };
                let result = serde_json::from_str::<MoveRequest>(&msg)
                    .map_err(|e| ServiceError::BadRequest(e.to_string()))
                    .and_then(|req| state.with(|inner| inner.post(&id, &req)));
                if let Err(e) = result {
                    if socket.send(text(&e.response())).await.is_err() {
                        return;
                    }
                }
            }
        }
    }
}

/// Serves until the process is stopped.
pub fn serve_blocking(host: &str, port: u16, event_log: Option<&Path>) -> Result<(), CliError> {
    let state = AppState::new(event_log)?;
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::Engine(format!("runtime: {e}")))?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind((host, port))
            .await
            .map_err(|e| CliError::Usage(format!("cannot bind {host}:{port}: {e}")))?;
        eprintln!("listening on http://{}", listener.local_addr().map_err(|e| CliError::Engine(e.to_string()))?);
        axum::serve(listener, router(state)).await.map_err(|e| CliError::Engine(format!("server: {e}")))
    })
}
