//! Interactive machine strategies: agents, extraction from proofs, copycat,
//! the modus-ponens combinator, exhaustive verification and match play.
//!
//! An agent sees the valuation and the environment's moves, and decides its
//! own moves when polled. It never sees the interpretation, so one agent
//! object is a uniform strategy for every interpretation it is played under.

mod compose;
mod extract;
mod play;
mod saved;
mod verify;

use std::collections::VecDeque;

use crate::game::{LabeledMove, Valuation};
use crate::semantics::PositionalStrategy;

pub use compose::{compose_mp, Composite};
pub use extract::{extract, ExtractError, ProofAgent, TraceEntry};
pub(crate) use play::adjudication;
pub use play::{play_match, Driver, EnvSchedule, Match, Opponent, ScheduleParseError};
pub use saved::{AgentFileError, AgentSpec};
pub use verify::{verify_agent, verify_games, Loss, LossKind, Report, Schedule, VerifyError, VerifyOptions};

/// A deterministic poll-driven strategy.
pub trait Agent: Send {
    /// Called once before play with the valuation of the game.
    fn begin(&mut self, _e: &Valuation) {}

    /// An environment move, as it appears in the run.
    fn observe(&mut self, mv: &str);

    /// Machine moves to make now, in order; empty means wait.
    fn poll(&mut self) -> Vec<String>;

    fn clone_box(&self) -> Box<dyn Agent>;
}

impl Clone for Box<dyn Agent> {
    fn clone(&self) -> Self {
        self.clone_box()
    }
}

/// Never moves.
#[derive(Clone, Debug, Default)]
pub struct Idle;

impl Agent for Idle {
    fn observe(&mut self, _mv: &str) {}

    fn poll(&mut self) -> Vec<String> {
        Vec::new()
    }

    fn clone_box(&self) -> Box<dyn Agent> {
        Box::new(self.clone())
    }
}

/// Makes a fixed list of moves on the first poll, then waits.
#[derive(Clone, Debug, Default)]
pub struct Fixed {
    pending: Vec<String>,
}

impl Fixed {
    pub fn new(moves: &[&str]) -> Fixed {
        Fixed { pending: moves.iter().map(|m| m.to_string()).collect() }
    }
}

impl Agent for Fixed {
    fn observe(&mut self, _mv: &str) {}

    fn poll(&mut self) -> Vec<String> {
        std::mem::take(&mut self.pending)
    }

    fn clone_box(&self) -> Box<dyn Agent> {
        Box::new(self.clone())
    }
}

/// Mirrors every environment move made under one prefix to the other
/// prefix of each pair, keeping the two subruns identical.
#[derive(Clone, Debug)]
pub struct Copycat {
    pairs: Vec<(String, String)>,
    outbox: VecDeque<String>,
}

impl Copycat {
    /// Prefixes are move prefixes such as `1.` and `2.`.
    pub fn new(pairs: &[(&str, &str)]) -> Copycat {
        Copycat { pairs: pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(), outbox: VecDeque::new() }
    }
}

impl Agent for Copycat {
    fn observe(&mut self, mv: &str) {
        for (a, b) in &self.pairs {
            if let Some(rest) = mv.strip_prefix(a.as_str()) {
                self.outbox.push_back(format!("{b}{rest}"));
                return;
            }
            if let Some(rest) = mv.strip_prefix(b.as_str()) {
                self.outbox.push_back(format!("{a}{rest}"));
                return;
            }
        }
    }

    fn poll(&mut self) -> Vec<String> {
        self.outbox.drain(..).collect()
    }

    fn clone_box(&self) -> Box<dyn Agent> {
        Box::new(self.clone())
    }
}

/// Replies of a solved finite game, tracking the run itself.
#[derive(Clone, Debug)]
pub struct Solver {
    strategy: PositionalStrategy,
    run: Vec<LabeledMove>,
}

impl Solver {
    pub fn new(strategy: PositionalStrategy) -> Solver {
        Solver { strategy, run: Vec::new() }
    }
}

impl Agent for Solver {
    fn observe(&mut self, mv: &str) {
        self.run.push(LabeledMove::env(mv));
    }

    fn poll(&mut self) -> Vec<String> {
        match self.strategy.reply(&self.run) {
            Some(m) => {
                self.run.push(m.clone());
                vec![m.mv]
            }
            None => Vec::new(),
        }
    }

    fn clone_box(&self) -> Box<dyn Agent> {
        Box::new(self.clone())
    }
}
