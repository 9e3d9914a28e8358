//! Strategies read off checked proofs.
//!
//! The agent walks the proof from the theorem towards the axioms while the
//! game is played. Its current node formula always describes the current
//! position: a choice connective that has been resolved is replaced by the
//! chosen component, a resolved choice quantifier by its body at a variable
//! bound to the chosen constant, and a general atom linked by Rule (C) by an
//! elementary letter whose two games are kept identical by mirroring.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use serde::Serialize;

use crate::formula::{BinOp, Formula, OccurrenceKind, OccurrencePath, Term};
use crate::game::{Player, Valuation};
use crate::proof::{check_proof, complete_cover, Cover, Pick, Proof, ProofError, Step};

use super::Agent;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExtractError {
    #[error("proof does not check ({} errors)", .0.len())]
    Invalid(Vec<ProofError>),
    #[error("proof relies on an assumed stability certificate")]
    Conditional,
}

/// One line of an agent's debugging log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub player: Player,
    #[serde(rename = "move")]
    pub mv: String,
    /// Proof node current when the move was made or observed.
    pub node: usize,
    /// Index of the copycat link the move belongs to.
    pub link: Option<usize>,
}

/// Two atom addresses whose subgames are mirrored.
#[derive(Clone, Debug)]
struct Link {
    positive: String,
    negative: String,
    /// False when the two atoms are known to be different instances.
    active: bool,
}

#[derive(Debug)]
struct Compiled {
    proof: Proof,
    /// Node id to index in `proof.nodes`.
    index: HashMap<usize, usize>,
    /// Full covers of Rule (A) nodes.
    covers: HashMap<usize, Vec<Cover>>,
}

/// The strategy of a checked proof. Cloning shares the proof.
#[derive(Clone, Debug)]
pub struct ProofAgent {
    compiled: Arc<Compiled>,
    node: usize,
    bindings: Valuation,
    links: Vec<Link>,
    /// Environment moves not consumed as choices, in arrival order.
    history: Vec<String>,
    outbox: VecDeque<String>,
    log: Vec<TraceEntry>,
}

/// The agent of `proof`, which must check without assumptions.
pub fn extract(proof: &Proof) -> Result<ProofAgent, ExtractError> {
    let checked = check_proof(proof).map_err(ExtractError::Invalid)?;
    if checked.conditional {
        return Err(ExtractError::Conditional);
    }
    let index: HashMap<usize, usize> = proof.nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect();
    let mut covers = HashMap::new();
    for n in &proof.nodes {
        if let Step::A { cover, .. } = &n.step {
            let premises: Vec<(usize, &Formula)> =
                n.premises.iter().map(|id| (*id, &proof.nodes[index[id]].formula)).collect();
            let full = complete_cover(&n.formula, cover, &premises).expect("checked proof has complete covers");
            covers.insert(n.id, full);
        }
    }
    let root = proof.nodes.last().expect("checked proof is nonempty").id;
    let mut agent = ProofAgent {
        compiled: Arc::new(Compiled { proof: proof.clone(), index, covers }),
        node: root,
        bindings: Valuation::default(),
        links: Vec::new(),
        history: Vec::new(),
        outbox: VecDeque::new(),
        log: Vec::new(),
    };
    agent.begin(&Valuation::default());
    Ok(agent)
}

/// Move prefix of the occurrence at `path`: `1.`/`2.` per parallel
/// connective crossed, nothing for negations and blind quantifiers.
pub(crate) fn address(f: &Formula, path: &OccurrencePath) -> String {
    let mut out = String::new();
    let mut cur = f;
    for &step in &path.0 {
        if matches!(cur, Formula::Bin(BinOp::PAnd | BinOp::POr | BinOp::Implies, ..)) {
            out.push_str(if step == 1 { "1." } else { "2." });
        }
        cur = cur.at(&OccurrencePath(vec![step])).expect("occurrence path resolves");
    }
    out
}

/// Choice payload constant: a decimal numeral without leading zeros.
fn constant(s: &str) -> Option<u32> {
    if s.is_empty() || s.starts_with('0') || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

impl ProofAgent {
    pub fn proof(&self) -> &Proof {
        &self.compiled.proof
    }

    /// Id of the proof node the agent currently stands at.
    pub fn node(&self) -> usize {
        self.node
    }

    pub fn log(&self) -> &[TraceEntry] {
        &self.log
    }

    fn current(&self) -> &crate::proof::ProofNode {
        &self.compiled.proof.nodes[self.compiled.index[&self.node]]
    }

    fn value(&self, t: &Term) -> u32 {
        match t {
            Term::Const(c) => *c,
            Term::Var(v) => self.bindings.get(v),
        }
    }

    /// Runtime value of an atom argument; `None` for variables bound by a
    /// blind quantifier, whose values the machine never learns.
    fn known(&self, f: &Formula, path: &OccurrencePath, t: &Term) -> Option<u32> {
        if let Term::Var(v) = t {
            if f.binders_above(path).iter().any(|(_, q, x)| q.is_blind() && x == v) {
                return None;
            }
        }
        Some(self.value(t))
    }

    fn emit(&mut self, mv: String, link: Option<usize>) {
        self.log.push(TraceEntry { player: Player::Machine, mv: mv.clone(), node: self.node, link });
        self.outbox.push_back(mv);
    }

    /// Follows single-premise nodes until a Rule (A) node.
    fn advance(&mut self) {
        loop {
            let n = self.current().clone();
            let h = &n.formula;
            match &n.step {
                Step::A { .. } => return,
                Step::B1 { path, branch } => {
                    self.emit(format!("{}{branch}", address(h, path)), None);
                }
                Step::B2 { path, term } => {
                    let v = self.value(term);
                    self.emit(format!("{}{v}", address(h, path)), None);
                }
                Step::C { positive, negative, .. } => {
                    let (Some(Formula::Atom(p)), Some(Formula::Atom(q))) = (h.at(positive), h.at(negative)) else {
                        unreachable!("checked Rule (C) sites are atoms");
                    };
                    let active = p.args.iter().zip(&q.args).all(|(s, t)| {
                        match (self.known(h, positive, s), self.known(h, negative, t)) {
                            (Some(a), Some(b)) => a == b,
                            _ => true,
                        }
                    });
                    let link = Link { positive: address(h, positive), negative: address(h, negative), active };
                    self.links.push(link);
                    if active {
                        let id = self.links.len() - 1;
                        for mv in self.history.clone() {
                            if let Some(out) = self.mirror(id, &mv) {
                                self.emit(out, Some(id));
                            }
                        }
                    }
                }
            }
            self.node = n.premises[0];
        }
    }

    fn mirror(&self, id: usize, mv: &str) -> Option<String> {
        let l = &self.links[id];
        if !l.active {
            return None;
        }
        if let Some(rest) = mv.strip_prefix(l.positive.as_str()) {
            return Some(format!("{}{rest}", l.negative));
        }
        mv.strip_prefix(l.negative.as_str()).map(|rest| format!("{}{rest}", l.positive))
    }

    /// The cover entry an environment choice move selects, with the
    /// binding it introduces.
    fn dispatch(&self, mv: &str) -> Option<(usize, Option<(String, u32)>)> {
        let n = self.current();
        let cover = self.compiled.covers.get(&n.id)?;
        for occ in n.formula.surface_occurrences().into_iter().filter(|o| o.is_environment_choice()) {
            let Some(payload) = mv.strip_prefix(address(&n.formula, &occ.path).as_str()) else { continue };
            if payload.contains('.') {
                continue;
            }
            match occ.kind {
                OccurrenceKind::CAnd | OccurrenceKind::COr => {
                    let branch = match payload {
                        "1" => 1,
                        "2" => 2,
                        _ => return None,
                    };
                    let c = cover.iter().find(|c| c.path == occ.path && c.pick == Pick::Branch(branch))?;
                    return Some((c.premise, None));
                }
                OccurrenceKind::ChoiceAll | OccurrenceKind::ChoiceEx => {
                    let value = constant(payload)?;
                    let c = cover.iter().find(|c| c.path == occ.path)?;
                    let Pick::Fresh(y) = &c.pick else { return None };
                    return Some((c.premise, Some((y.clone(), value))));
                }
                OccurrenceKind::General(_) => unreachable!("atoms are not choice points"),
            }
        }
        None
    }
}

impl Agent for ProofAgent {
    fn begin(&mut self, e: &Valuation) {
        self.node = self.compiled.proof.nodes.last().expect("nonempty").id;
        self.bindings = e.clone();
        self.links.clear();
        self.history.clear();
        self.outbox.clear();
        self.log.clear();
        self.advance();
    }

    fn observe(&mut self, mv: &str) {
        let link = (0..self.links.len()).find_map(|id| self.mirror(id, mv).map(|out| (id, out)));
        self.log.push(TraceEntry {
            player: Player::Environment,
            mv: mv.to_string(),
            node: self.node,
            link: link.as_ref().map(|(id, _)| *id),
        });
        if let Some((id, out)) = link {
            self.emit(out, Some(id));
            return;
        }
        match self.dispatch(mv) {
            Some((premise, binding)) => {
                if let Some((y, c)) = binding {
                    self.bindings = self.bindings.with(&y, c);
                }
                self.node = premise;
                self.advance();
            }
            None => self.history.push(mv.to_string()),
        }
    }

    fn poll(&mut self) -> Vec<String> {
        self.outbox.drain(..).collect()
    }

    fn clone_box(&self) -> Box<dyn Agent> {
        Box::new(self.clone())
    }
}
