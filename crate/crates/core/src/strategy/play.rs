//! Driving an agent through one play.
//!
//! Play proceeds in rounds. In each round the machine first reads every
//! environment move made so far, polls for new moves if it has none queued,
//! and makes at most one move; then the environment makes any number of
//! moves. The hard-play machine simulator uses the same round structure, so
//! both produce identical transcripts.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::game::{Game, LabeledMove, Outcome, Player, Run, Valuation};
use crate::semantics::Adjudication;

use super::Agent;

/// Environment moves by round, in order within a round.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EnvSchedule(pub BTreeMap<usize, Vec<String>>);

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("schedule line {line}: {message}")]
pub struct ScheduleParseError {
    pub line: usize,
    pub message: String,
}

impl EnvSchedule {
    pub fn at(&self, round: usize) -> &[String] {
        self.0.get(&round).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Last round with a move, if any.
    pub fn last_round(&self) -> Option<usize> {
        self.0.iter().rev().find(|(_, v)| !v.is_empty()).map(|(k, _)| *k)
    }

    pub fn push(&mut self, round: usize, mv: impl Into<String>) {
        self.0.entry(round).or_default().push(mv.into());
    }
}

/// Lines `round: move move ...`; blank lines and `#` comments are skipped.
/// Repeated rounds accumulate.
impl FromStr for EnvSchedule {
    type Err = ScheduleParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = EnvSchedule::default();
        for (i, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: &str| ScheduleParseError { line: i + 1, message: message.into() };
            let (round, moves) = line.split_once(':').ok_or_else(|| err("expected `round: moves`"))?;
            let round: usize = round.trim().parse().map_err(|_| err("round is not a number"))?;
            let entry = out.0.entry(round).or_default();
            for mv in moves.split_whitespace() {
                entry.push(mv.strip_prefix("B:").unwrap_or(mv).to_string());
            }
        }
        Ok(out)
    }
}

impl fmt::Display for EnvSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (round, moves) in &self.0 {
            writeln!(f, "{round}: {}", moves.join(" "))?;
        }
        Ok(())
    }
}

/// Who plays the environment.
pub enum Opponent<'a> {
    Schedule(&'a EnvSchedule),
    /// An agent that observes the machine's moves and makes environment
    /// moves; it moves every round after the machine.
    Agent(&'a mut dyn Agent),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Match {
    pub run: Run,
    /// Rounds played.
    pub rounds: usize,
    /// Fuel ran out before both sides fell silent; such a run is not
    /// adjudicated.
    pub timed_out: bool,
    pub adjudication: Option<Adjudication>,
}

pub(crate) fn adjudication(game: &Game, run: &[LabeledMove]) -> Adjudication {
    let o = Outcome::of(game, run);
    Adjudication { legal: o.legal(), blame: o.offender, winner: o.winner }
}

/// An agent with its queue of moves not yet made, fed from a growing run.
#[derive(Clone)]
pub struct Driver {
    pub(crate) agent: Box<dyn Agent>,
    pub(crate) pending: VecDeque<String>,
    /// Run entries already shown to the agent.
    pub(crate) cursor: usize,
}

impl Driver {
    pub(crate) fn new(agent: Box<dyn Agent>, e: &Valuation) -> Driver {
        let mut agent = agent;
        agent.begin(e);
        Driver { agent, pending: VecDeque::new(), cursor: 0 }
    }

    /// Reads new environment moves and returns the machine's move for this
    /// round, if any.
    pub(crate) fn turn(&mut self, run: &[LabeledMove]) -> Option<String> {
        for m in &run[self.cursor..] {
            if m.player == Player::Environment {
                self.agent.observe(&m.mv);
            }
        }
        self.cursor = run.len();
        if self.pending.is_empty() {
            self.pending.extend(self.agent.poll());
        }
        self.pending.pop_front()
    }

    pub fn pending(&self) -> impl Iterator<Item = &str> {
        self.pending.iter().map(String::as_str)
    }
}

/// Plays `machine` from valuation `e` for at most `fuel` rounds and
/// adjudicates the transcript on `game`.
pub fn play_match(machine: &dyn Agent, opponent: Opponent<'_>, game: &Game, e: &Valuation, fuel: usize) -> Match {
    let mut driver = Driver::new(machine.clone_box(), e);
    let mut run: Vec<LabeledMove> = Vec::new();
    let mut opponent = opponent;
    if let Opponent::Agent(a) = &mut opponent {
        a.begin(e);
    }
    let mut env_cursor = 0;
    for round in 0..fuel {
        let before = run.len();
        if let Some(mv) = driver.turn(&run) {
            run.push(LabeledMove::machine(mv));
        }
        let scheduled_later = match &mut opponent {
            Opponent::Schedule(s) => {
                run.extend(s.at(round).iter().map(|mv| LabeledMove::env(mv.clone())));
                s.last_round().is_some_and(|last| last > round)
            }
            Opponent::Agent(a) => {
                for m in &run[env_cursor..] {
                    if m.player == Player::Machine {
                        a.observe(&m.mv);
                    }
                }
                env_cursor = run.len();
                run.extend(a.poll().into_iter().map(LabeledMove::env));
                false
            }
        };
        let quiet = run.len() == before && driver.pending.is_empty() && !scheduled_later;
        if quiet {
            let adj = adjudication(game, &run);
            return Match { run: Run(run), rounds: round + 1, timed_out: false, adjudication: Some(adj) };
        }
    }
    Match { run: Run(run), rounds: fuel, timed_out: true, adjudication: None }
}
