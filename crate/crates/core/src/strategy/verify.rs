//! Exhaustive play of an agent against every environment behavior.
//!
//! One agent object faces a whole family of interpretations at once: the
//! environment may make any move legal in at least one member, members in
//! which the move is illegal drop out as won by the machine, and the machine
//! must stay legal and win in every member still standing.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::formula::Formula;
use crate::game::{CeilingExceeded, Game, LabeledMove, Player, Run, Valuation};
use crate::semantics::{interpret, Bounds, Interpretation, SemanticsError};

use super::Agent;

/// When the environment may move relative to the machine.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// Only after the machine has made every move it wants to make.
    #[default]
    Reactive,
    /// Also between any two machine moves; the machine makes one move at
    /// a time from the list its last poll returned.
    Interleaved,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyOptions {
    pub schedule: Schedule,
    /// Positions explored per valuation before giving up.
    pub ceiling: usize,
    /// Losses kept in the report; further losses are only counted.
    pub max_losses: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { schedule: Schedule::Reactive, ceiling: 1_000_000, max_losses: 16 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// The machine made a move illegal in some member.
    Illegal,
    /// The run ended with the environment winning some member.
    Lost,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Loss {
    pub valuation: Valuation,
    /// Family members in which the machine failed.
    pub members: Vec<usize>,
    pub run: Run,
    pub kind: LossKind,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub valuations: usize,
    /// Completed runs adjudicated.
    pub leaves: usize,
    pub positions: usize,
    pub total_losses: usize,
    pub losses: Vec<Loss>,
}

impl Report {
    pub fn wins(&self) -> bool {
        self.total_losses == 0
    }

    fn merge(&mut self, other: Report, cap: usize) {
        self.valuations += other.valuations;
        self.leaves += other.leaves;
        self.positions += other.positions;
        self.total_losses += other.total_losses;
        for l in other.losses {
            if self.losses.len() < cap {
                self.losses.push(l);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Ceiling(#[from] CeilingExceeded),
}

/// Plays `agent` on `f` against every environment under every member of
/// `family` and every valuation of the free variables of `f`.
pub fn verify_agent(
    agent: &dyn Agent,
    f: &Formula,
    family: &[Interpretation],
    bounds: &Bounds,
    opts: &VerifyOptions,
) -> Result<Report, VerifyError> {
    let fns = family.iter().map(|star| interpret(f, star, bounds)).collect::<Result<Vec<_>, _>>()?;
    let mut report = Report::default();
    for e in Valuation::all(&f.free_vars(), bounds.universe) {
        let games: Vec<Game> = fns.iter().map(|g| g.at(&e)).collect();
        let r = verify_games(agent, &e, &games, opts)?;
        report.merge(r, opts.max_losses);
    }
    Ok(report)
}

/// Plays `agent`, started with valuation `e`, against every environment on
/// the games of one family at once.
pub fn verify_games(
    agent: &dyn Agent,
    e: &Valuation,
    games: &[Game],
    opts: &VerifyOptions,
) -> Result<Report, VerifyError> {
    let mut a = agent.clone_box();
    a.begin(e);
    let mut x = Explorer { e, opts, report: Report { valuations: 1, ..Report::default() } };
    let live: Vec<Option<Game>> = games.iter().cloned().map(Some).collect();
    x.explore(a, VecDeque::new(), live, &mut Vec::new())?;
    Ok(x.report)
}

struct Explorer<'a> {
    e: &'a Valuation,
    opts: &'a VerifyOptions,
    report: Report,
}

impl Explorer<'_> {
    fn lose(&mut self, members: Vec<usize>, run: &[LabeledMove], kind: LossKind) {
        self.report.total_losses += 1;
        if self.report.losses.len() < self.opts.max_losses {
            let loss = Loss { valuation: self.e.clone(), members, run: Run(run.to_vec()), kind };
            self.report.losses.push(loss);
        }
    }

    /// Applies a machine move to every live member; `false` after a loss.
    fn machine_move(&mut self, games: &mut [Option<Game>], run: &mut Vec<LabeledMove>, mv: String) -> bool {
        let m = LabeledMove::machine(mv);
        run.push(m.clone());
        let mut illegal = Vec::new();
        for (i, slot) in games.iter_mut().enumerate() {
            if let Some(g) = slot {
                match g.after(&m) {
                    Some(next) => *g = next,
                    None => illegal.push(i),
                }
            }
        }
        if illegal.is_empty() {
            return true;
        }
        self.lose(illegal, run, LossKind::Illegal);
        false
    }

    /// The machine is waiting: the run may end here.
    fn leaf(&mut self, games: &[Option<Game>], run: &[LabeledMove]) {
        self.report.leaves += 1;
        let lost: Vec<usize> = games
            .iter()
            .enumerate()
            .filter(|(_, g)| g.as_ref().is_some_and(|g| g.winner() == Player::Environment))
            .map(|(i, _)| i)
            .collect();
        if !lost.is_empty() {
            self.lose(lost, run, LossKind::Lost);
        }
    }

    fn explore(
        &mut self,
        mut agent: Box<dyn Agent>,
        mut pending: VecDeque<String>,
        mut games: Vec<Option<Game>>,
        run: &mut Vec<LabeledMove>,
    ) -> Result<(), CeilingExceeded> {
        self.report.positions += 1;
        if self.report.positions > self.opts.ceiling {
            return Err(CeilingExceeded { ceiling: self.opts.ceiling });
        }
        let depth = run.len();
        match self.opts.schedule {
            Schedule::Reactive => {
                loop {
                    let out = agent.poll();
                    if out.is_empty() {
                        break;
                    }
                    for mv in out {
                        if !self.machine_move(&mut games, run, mv) {
                            run.truncate(depth);
                            return Ok(());
                        }
                    }
                }
                self.leaf(&games, run);
            }
            Schedule::Interleaved => {
                if pending.is_empty() {
                    pending.extend(agent.poll());
                }
                match pending.front().cloned() {
                    None => self.leaf(&games, run),
                    Some(mv) => {
                        let mut next = games.clone();
                        let mut rest = pending.clone();
                        rest.pop_front();
                        if self.machine_move(&mut next, run, mv) {
                            self.explore(agent.clone(), rest, next, run)?;
                        }
                        run.truncate(depth);
                    }
                }
            }
        }
        let here = run.len();
        let moves: BTreeSet<String> = games.iter().flatten().flat_map(|g| g.moves(Player::Environment)).collect();
        for mv in moves {
            let m = LabeledMove::env(mv.clone());
            let next: Vec<Option<Game>> = games.iter().map(|g| g.as_ref().and_then(|g| g.after(&m))).collect();
            let mut a = agent.clone();
            a.observe(&mv);
            run.push(m);
            self.explore(a, pending.clone(), next, run)?;
            run.truncate(here);
        }
        run.truncate(depth);
        Ok(())
    }
}
