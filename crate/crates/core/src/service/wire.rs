//! Message schemas. Every message carries `version`; field names are
//! camelCase.

use serde::{Deserialize, Serialize};

use crate::formula::{Dialect, ParseError};
use crate::game::{Player, Run, Valuation};
use crate::proof::{Proof, ProveError};
use crate::semantics::{Interpretation, SemanticsError};
use crate::strategy::ExtractError;

pub const WIRE_VERSION: &str = "clwork/1";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpponentKind {
    /// The machine plays the strategy extracted from a proof.
    #[default]
    Extracted,
    /// Both sides are played by the caller.
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CreateSession {
    pub version: String,
    pub formula: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interpretation: Option<Interpretation>,
    #[serde(default)]
    pub valuation: Valuation,
    #[serde(default)]
    pub opponent: OpponentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dialect: Option<Dialect>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub universe: Option<u32>,
}

impl CreateSession {
    pub fn new(formula: &str) -> CreateSession {
        CreateSession {
            version: WIRE_VERSION.into(),
            formula: formula.into(),
            interpretation: None,
            valuation: Valuation::default(),
            opponent: OpponentKind::Extracted,
            dialect: None,
            universe: None,
        }
    }
}

/// A move as `B:<move>`, `T:<move>` or a bare environment move, or a
/// request to adjudicate the run as it stands.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MoveRequest {
    pub version: String,
    #[serde(default, rename = "move", skip_serializing_if = "Option::is_none")]
    pub mv: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub finish: bool,
}

impl MoveRequest {
    pub fn play(mv: &str) -> MoveRequest {
        MoveRequest { version: WIRE_VERSION.into(), mv: Some(mv.into()), finish: false }
    }

    pub fn finish() -> MoveRequest {
        MoveRequest { version: WIRE_VERSION.into(), mv: None, finish: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Open,
    Finished,
    /// Someone made an illegal move; `blame` names them.
    Aborted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionView {
    pub version: String,
    pub id: String,
    pub formula: String,
    pub dialect: Dialect,
    pub valuation: Valuation,
    pub run: Run,
    /// Current position as a partially played formula.
    pub snapshot: String,
    /// Positions after each move of the legal part of the run.
    pub history: Vec<String>,
    pub legal_moves: Vec<String>,
    pub status: Status,
    /// Set once the session is finished or aborted.
    pub winner: Option<Player>,
    pub blame: Option<Player>,
    /// Who would win if the run ended now.
    pub leading: Option<Player>,
    /// Whether an extracted strategy plays the machine.
    pub machine: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseRequest {
    pub version: String,
    pub formula: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ParseResponse {
    pub version: String,
    pub formula: String,
    pub pretty: String,
    pub dialect: Dialect,
    pub free_vars: Vec<String>,
    pub elementarization: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProveRequest {
    pub version: String,
    pub formula: String,
    #[serde(default)]
    pub dialect: Option<Dialect>,
    /// Goal limit of the search.
    #[serde(default)]
    pub budget: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProveResponse {
    pub version: String,
    pub formula: String,
    pub dialect: Dialect,
    /// `proved`, `not_provable` or `unknown`.
    pub verdict: String,
    pub proof: Option<Proof>,
    /// The proof as numbered rows with their justifications.
    pub table: Vec<String>,
}

/// Log entry of an event-sourced session store.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Created { session: String, request: CreateSession },
    Moved { session: String, request: MoveRequest },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    BadRequest,
    NotFound,
    Conflict,
    Unprocessable,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ServiceError {
    #[error("unsupported message version {0:?}, expected {WIRE_VERSION:?}")]
    Version(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Prove(#[from] ProveError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error("no {dialect:?} proof {}", if *.unknown { "found within the budget" } else { "exists" })]
    Unprovable { dialect: Dialect, unknown: bool },
    #[error("{0}")]
    BadRequest(String),
    #[error("no session {0}")]
    NotFound(String),
    #[error("session {0} is closed")]
    Closed(String),
}

impl ServiceError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            ServiceError::NotFound(_) => ErrorKind::NotFound,
            ServiceError::Closed(_) => ErrorKind::Conflict,
            ServiceError::Unprovable { .. } | ServiceError::Extract(_) | ServiceError::Prove(_) => {
                ErrorKind::Unprocessable
            }
            _ => ErrorKind::BadRequest,
        }
    }

    pub fn response(&self) -> ErrorResponse {
        ErrorResponse { version: WIRE_VERSION.into(), error: self.kind(), message: self.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErrorResponse {
    pub version: String,
    pub error: ErrorKind,
    pub message: String,
}

pub(super) fn check_version(v: &str) -> Result<(), ServiceError> {
    if v == WIRE_VERSION {
        Ok(())
    } else {
        Err(ServiceError::Version(v.to_string()))
    }
}
