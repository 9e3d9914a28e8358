//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export takes and returns JSON text in the service wire format, so
//! the page needs no server. Errors come back as an error record rather
//! than a thrown exception.

use wasm_bindgen::prelude::*;

use clwork::service::{
    parse_request, prove_request, CreateSession, MoveRequest, ParseRequest, ProveRequest, Service, ServiceError,
    WIRE_VERSION,
};

fn reply<T: serde::Serialize>(r: Result<T, ServiceError>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v),
        Err(e) => serde_json::to_string(&e.response()),
    }
    .expect("wire messages serialize")
}

fn request<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, ServiceError> {
    serde_json::from_str(text).map_err(|e| ServiceError::BadRequest(e.to_string()))
}

/// Canonical form, dialect and elementarization of a formula.
#[wasm_bindgen(js_name = parseFormula)]
pub fn parse_formula(formula: &str) -> String {
    reply(parse_request(&ParseRequest { version: WIRE_VERSION.into(), formula: formula.into() }))
}

/// Proof search in the smallest dialect containing the formula.
#[wasm_bindgen(js_name = proveFormula)]
pub fn prove_formula(formula: &str) -> String {
    reply(prove_request(&ProveRequest {
        version: WIRE_VERSION.into(),
        formula: formula.into(),
        dialect: None,
        budget: None,
    }))
}

/// In-page sessions against extracted strategies.
#[wasm_bindgen]
#[derive(Default)]
pub struct Playground {
    service: Service,
}

#[wasm_bindgen]
impl Playground {
    #[wasm_bindgen(constructor)]
    pub fn new() -> Playground {
        Playground::default()
    }

    /// Takes a session-creation record and returns the session view.
    pub fn create(&mut self, request_json: &str) -> String {
        reply(request::<CreateSession>(request_json).and_then(|r| self.service.create_session(r)))
    }

    /// Takes a move record and returns the updated view.
    pub fn post(&mut self, session: &str, move_json: &str) -> String {
        reply(request::<MoveRequest>(move_json).and_then(|r| self.service.post_move(session, &r)))
    }
}
