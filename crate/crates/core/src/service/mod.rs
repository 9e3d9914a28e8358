//! Sessions in which a person plays the environment, plus the stateless
//! parse and prove requests, all as versioned JSON messages.
//!
//! Sessions are event-sourced: the creation request and the moves posted
//! by the person determine every state, because the machine's replies are
//! recomputed deterministically on replay.

mod wire;

use std::collections::BTreeMap;

use crate::formula::{elementarize, parse, pretty, Budget, Dialect, Formula};
use crate::game::{Game, LabeledMove, Player, Run, Valuation};
use crate::proof::{prove, Proof, Verdict};
use crate::semantics::{interpret, trace, Bounds, Interpretation};
use crate::strategy::{extract, Agent};

pub use wire::{
    CreateSession, ErrorKind, ErrorResponse, Event, MoveRequest, OpponentKind, ParseRequest, ParseResponse,
    ProveRequest, ProveResponse, ServiceError, SessionView, Status, WIRE_VERSION,
};

/// Limit on machine moves made in reply to one posted move.
const REPLY_LIMIT: usize = 1_000;

pub struct Session {
    id: String,
    formula: Formula,
    star: Interpretation,
    bounds: Bounds,
    valuation: Valuation,
    dialect: Dialect,
    proof: Option<Proof>,
    agent: Option<Box<dyn Agent>>,
    game: Game,
    run: Vec<LabeledMove>,
    status: Status,
    blame: Option<Player>,
    winner: Option<Player>,
}

impl Session {
    fn open(id: String, request: CreateSession) -> Result<Session, ServiceError> {
        wire::check_version(&request.version)?;
        let formula = parse(&request.formula)?;
        let star = request.interpretation.clone().unwrap_or_default();
        let bounds = Bounds::universe(request.universe.unwrap_or(Bounds::default().universe));
        let valuation = request.valuation.clone();
        let game = interpret(&formula, &star, &bounds)?.at(&valuation);
        let dialect = request.dialect.unwrap_or_else(|| Dialect::of(&formula));
        let (proof, agent) = match request.opponent {
            OpponentKind::None => (None, None),
            OpponentKind::Extracted => {
                let budget = Budget::default();
                match prove(&formula, dialect, &budget)? {
                    Verdict::Proved(p) => {
                        let mut a = extract(&p)?;
                        a.begin(&valuation);
                        (Some(p), Some(Box::new(a) as Box<dyn Agent>))
                    }
                    Verdict::NotProvable => return Err(ServiceError::Unprovable { dialect, unknown: false }),
                    Verdict::Unknown => return Err(ServiceError::Unprovable { dialect, unknown: true }),
                }
            }
        };
        let mut s = Session {
            id,
            formula,
            star,
            bounds,
            valuation,
            dialect,
            proof,
            agent,
            game,
            run: Vec::new(),
            status: Status::Open,
            blame: None,
            winner: None,
        };
        s.reply();
        Ok(s)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn proof(&self) -> Option<&Proof> {
        self.proof.as_ref()
    }

    fn position(&self) -> Game {
        self.game.prefix(&self.run).expect("open sessions hold legal runs")
    }

    /// Appends `m`, closing the session if it is illegal; `false` then.
    fn append(&mut self, m: LabeledMove) -> bool {
        let legal = self.status == Status::Open && self.position().after(&m).is_some();
        self.run.push(m.clone());
        if !legal {
            self.status = Status::Aborted;
            self.blame = Some(m.player);
            self.winner = Some(m.player.flip());
        }
        legal
    }

    /// Lets the machine make every move it wants to make now.
    fn reply(&mut self) {
        let mut made = 0;
        loop {
            let Some(agent) = self.agent.as_mut() else { return };
            let out = agent.poll();
            if out.is_empty() || made > REPLY_LIMIT {
                break;
            }
            made += out.len();
            for mv in out {
                if !self.append(LabeledMove::machine(mv)) {
                    return;
                }
            }
        }
        self.settle();
    }

    /// Finishes the session when no player has a legal move left.
    fn settle(&mut self) {
        if self.status != Status::Open {
            return;
        }
        let g = self.position();
        if g.moves(Player::Machine).is_empty() && g.moves(Player::Environment).is_empty() {
            self.finish();
        }
    }

    fn finish(&mut self) {
        self.status = Status::Finished;
        self.winner = Some(self.position().winner());
    }

    fn post(&mut self, req: &MoveRequest) -> Result<(), ServiceError> {
        wire::check_version(&req.version)?;
        if self.status != Status::Open {
            return Err(ServiceError::Closed(self.id.clone()));
        }
        if req.finish {
            self.finish();
            return Ok(());
        }
        let text = req.mv.as_deref().ok_or_else(|| ServiceError::BadRequest("a move or finish is required".into()))?;
        let m = if text.contains(':') {
            text.parse::<LabeledMove>().map_err(|e| ServiceError::BadRequest(e.to_string()))?
        } else {
            LabeledMove::env(text)
        };
        if m.player == Player::Machine && self.agent.is_some() {
            return Err(ServiceError::BadRequest("the machine's moves are made by the extracted strategy".into()));
        }
        if !self.append(m.clone()) {
            return Ok(());
        }
        if let Some(agent) = self.agent.as_mut() {
            agent.observe(&m.mv);
        }
        self.reply();
        self.settle();
        Ok(())
    }

    /// Moves the person may make now, labeled.
    pub fn legal_moves(&self) -> Vec<String> {
        if self.status != Status::Open {
            return Vec::new();
        }
        let g = self.position();
        let mut players = vec![Player::Environment];
        if self.agent.is_none() {
            players.push(Player::Machine);
        }
        players
            .into_iter()
            .flat_map(|p| g.moves(p).into_iter().map(move |mv| LabeledMove::new(p, mv).to_string()))
            .collect()
    }

    pub fn view(&self) -> SessionView {
        let legal_len = match self.status {
            Status::Aborted => self.run.len() - 1,
            _ => self.run.len(),
        };
        let chain = trace(&self.formula, &self.star, &self.bounds, &self.valuation, &self.run[..legal_len])
            .expect("the legal prefix traces");
        let history: Vec<String> = chain.iter().map(|s| s.position.to_string()).collect();
        let leading = chain.last().map(|s| s.game.winner());
        SessionView {
            version: WIRE_VERSION.into(),
            id: self.id.clone(),
            formula: self.formula.to_string(),
            dialect: self.dialect,
            valuation: self.valuation.clone(),
            run: Run(self.run.clone()),
            snapshot: history.last().cloned().unwrap_or_default(),
            history,
            legal_moves: self.legal_moves(),
            status: self.status,
            winner: self.winner,
            blame: self.blame,
            leading,
            machine: self.agent.is_some(),
        }
    }
}

/// The in-memory session store and request handlers.
#[derive(Default)]
pub struct Service {
    sessions: BTreeMap<String, Session>,
    next: u64,
    events: Vec<Event>,
}

impl Service {
    pub fn new() -> Service {
        Service::default()
    }

    /// Rebuilds a store from its event log.
    pub fn replay(events: &[Event]) -> Result<Service, ServiceError> {
        let mut s = Service::new();
        for ev in events {
            match ev {
                Event::Created { session, request } => {
                    s.insert(session.clone(), request.clone())?;
                }
                Event::Moved { session, request } => {
                    s.post_move(session, request)?;
                }
            }
        }
        Ok(s)
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    fn insert(&mut self, id: String, request: CreateSession) -> Result<SessionView, ServiceError> {
        let session = Session::open(id.clone(), request.clone())?;
        if let Some(n) = id.strip_prefix('s').and_then(|n| n.parse::<u64>().ok()) {
            self.next = self.next.max(n);
        }
        let view = session.view();
        self.sessions.insert(id.clone(), session);
        self.events.push(Event::Created { session: id, request });
        Ok(view)
    }

    pub fn create_session(&mut self, request: CreateSession) -> Result<SessionView, ServiceError> {
        let id = format!("s{}", self.next + 1);
        self.insert(id, request)
    }

    pub fn post_move(&mut self, id: &str, request: &MoveRequest) -> Result<SessionView, ServiceError> {
        let s = self.sessions.get_mut(id).ok_or_else(|| ServiceError::NotFound(id.to_string()))?;
        s.post(request)?;
        let view = s.view();
        self.events.push(Event::Moved { session: id.to_string(), request: request.clone() });
        Ok(view)
    }

    pub fn get_state(&self, id: &str) -> Result<SessionView, ServiceError> {
        self.session(id).map(Session::view)
    }

    pub fn session(&self, id: &str) -> Result<&Session, ServiceError> {
        self.sessions.get(id).ok_or_else(|| ServiceError::NotFound(id.to_string()))
    }

    pub fn session_ids(&self) -> impl Iterator<Item = &str> {
        self.sessions.keys().map(String::as_str)
    }
}

pub fn parse_request(req: &ParseRequest) -> Result<ParseResponse, ServiceError> {
    wire::check_version(&req.version)?;
    let f = parse(&req.formula)?;
    Ok(ParseResponse {
        version: WIRE_VERSION.into(),
        formula: f.to_string(),
        pretty: pretty(&f),
        dialect: Dialect::of(&f),
        free_vars: f.free_vars().into_iter().collect(),
        elementarization: elementarize(&f).to_string(),
    })
}

pub fn prove_request(req: &ProveRequest) -> Result<ProveResponse, ServiceError> {
    wire::check_version(&req.version)?;
    let f = parse(&req.formula)?;
    let dialect = req.dialect.unwrap_or_else(|| Dialect::of(&f));
    let mut budget = Budget::default();
    if let Some(goals) = req.budget {
        budget.max_goals = goals;
    }
    let verdict = prove(&f, dialect, &budget)?;
    let (name, proof) = match verdict {
        Verdict::Proved(p) => ("proved", Some(p)),
        Verdict::NotProvable => ("not_provable", None),
        Verdict::Unknown => ("unknown", None),
    };
    let table =
        proof.as_ref().map(|p| p.table().into_iter().map(|(l, r)| format!("{l} {r}")).collect()).unwrap_or_default();
    Ok(ProveResponse {
        version: WIRE_VERSION.into(),
        formula: f.to_string(),
        dialect,
        verdict: name.into(),
        proof,
        table,
    })
}
