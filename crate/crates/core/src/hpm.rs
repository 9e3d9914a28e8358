//! Hard-play machine simulator.
//!
//! A machine runs in clock cycles. In each cycle it makes one transition;
//! entering a move state appends the buffer to the run tape as a machine
//! move and clears it; then the environment's moves for that cycle are
//! appended. The run tape is read-only for the machine, so it only grows.
//!
//! Two kinds of machines exist: small transition tables over a work tape,
//! and hosted agents, whose internal state stands in for the work tape.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::formula::Formula;
use crate::game::{CeilingExceeded, Game, LabeledMove, Player, Run, Valuation};
use crate::semantics::{interpret, Bounds, Interpretation};
use crate::strategy::{adjudication, Agent, Driver, EnvSchedule, VerifyError};

pub const BLANK: char = '_';
pub const ANY: char = '*';

/// One row of a transition table. `ANY` in a read field matches every
/// symbol; rows with fewer wildcards take precedence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub state: String,
    pub work: char,
    pub run: char,
    pub valuation: char,
    pub next: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub write: Option<char>,
    /// -1, 0 or 1.
    #[serde(default)]
    pub work_move: i8,
    /// 0 or 1: the run and valuation heads never move left.
    #[serde(default)]
    pub run_move: u8,
    #[serde(default)]
    pub valuation_move: u8,
    /// Symbol appended to the move buffer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emit: Option<char>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableProgram {
    pub start: String,
    pub move_states: BTreeSet<String>,
    pub transitions: Vec<Transition>,
}

const FORMAT: &str = "clwork-hpm/1";

#[derive(Serialize, Deserialize)]
struct ProgramFile {
    format: String,
    #[serde(flatten)]
    program: TableProgram,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TableError {
    #[error("two rows read the same symbols in state {state}")]
    Ambiguous { state: String },
    #[error("row for state {state}: {what}")]
    BadRow { state: String, what: String },
    #[error("malformed machine file: {0}")]
    Syntax(String),
}

impl TableProgram {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ProgramFile { format: FORMAT.into(), program: self.clone() }).expect("serializes")
    }

    pub fn from_json(text: &str) -> Result<TableProgram, TableError> {
        let file: ProgramFile = serde_json::from_str(text).map_err(|e| TableError::Syntax(e.to_string()))?;
        if file.format != FORMAT {
            return Err(TableError::Syntax(format!("unsupported format tag {:?}", file.format)));
        }
        Ok(file.program)
    }

    fn validate(&self) -> Result<(), TableError> {
        let mut seen = BTreeSet::new();
        for t in &self.transitions {
            let bad = |what: &str| Err(TableError::BadRow { state: t.state.clone(), what: what.into() });
            if !(-1..=1).contains(&t.work_move) {
                return bad("work_move must be -1, 0 or 1");
            }
            if t.run_move > 1 || t.valuation_move > 1 {
                return bad("read-only heads move by 0 or 1");
            }
            if !seen.insert((&t.state, t.work, t.run, t.valuation)) {
                return Err(TableError::Ambiguous { state: t.state.clone() });
            }
        }
        Ok(())
    }

    fn lookup(&self, state: &str, w: char, r: char, v: char) -> Option<&Transition> {
        let fits = |want: char, got: char| want == ANY || want == got;
        self.transitions
            .iter()
            .filter(|t| t.state == state && fits(t.work, w) && fits(t.run, r) && fits(t.valuation, v))
            .min_by_key(|t| [t.work, t.run, t.valuation].iter().filter(|&&c| c == ANY).count())
    }

    /// Emits `mv` once, one symbol per cycle, then idles.
    pub fn emit_once(mv: &str) -> TableProgram {
        let mut transitions = Vec::new();
        let chars: Vec<char> = mv.chars().collect();
        for (i, c) in chars.iter().enumerate() {
            let next = if i + 1 == chars.len() { "move".to_string() } else { format!("e{}", i + 1) };
            transitions.push(row(&format!("e{i}"), &next, Some(*c)));
        }
        transitions.push(row("move", "halt", None));
        transitions.push(row("halt", "halt", None));
        TableProgram { start: "e0".into(), move_states: ["move".to_string()].into(), transitions }
    }

    /// Scans the run tape until an environment move appears, then emits
    /// `mv` once.
    pub fn answer_first(mv: &str) -> TableProgram {
        let mut p = TableProgram::emit_once(mv);
        p.start = "scan".into();
        let wait = Transition { run: BLANK, ..row("scan", "scan", None) };
        let found = Transition { run: 'B', ..row("scan", "e0", None) };
        let skip = Transition { run_move: 1, ..row("scan", "scan", None) };
        p.transitions.extend([wait, found, skip]);
        p
    }
}

fn row(state: &str, next: &str, emit: Option<char>) -> Transition {
    Transition {
        state: state.into(),
        work: ANY,
        run: ANY,
        valuation: ANY,
        next: next.into(),
        write: None,
        work_move: 0,
        run_move: 0,
        valuation_move: 0,
        emit,
    }
}

#[derive(Clone)]
enum Program {
    Table(Arc<TableProgram>),
    Hosted(Box<dyn Agent>),
}

/// A machine: a transition table or a hosted agent.
#[derive(Clone)]
pub struct HPMachine {
    program: Program,
}

/// Contents of the work tape.
#[derive(Clone)]
pub enum Work {
    Tape {
        cells: Vec<char>,
        head: usize,
    },
    /// The hosted agent's state, with its queued moves.
    Agent(Driver),
}

impl fmt::Debug for Work {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Work::Tape { cells, head } => write!(f, "Tape({:?}, head {head})", cells.iter().collect::<String>()),
            Work::Agent(d) => write!(f, "Agent(pending {:?})", d.pending),
        }
    }
}

/// Everything about a machine at a cycle boundary except the valuation,
/// which is read lazily.
#[derive(Clone, Debug)]
pub struct Configuration {
    pub state: String,
    pub work: Work,
    pub run: Vec<LabeledMove>,
    pub run_cursor: usize,
    pub valuation_cursor: usize,
    pub buffer: String,
}

/// Run tape text: each move as its label letter, the move, and `;`.
pub fn run_tape(run: &[LabeledMove]) -> String {
    run.iter().map(|m| format!("{}{};", m.player.letter(), m.mv)).collect()
}

/// Valuation tape text: `x=c;` per variable in name order.
pub fn valuation_tape(e: &Valuation) -> String {
    e.0.iter().map(|(x, c)| format!("{x}={c};")).collect()
}

const HOSTED_START: &str = "start";
const HOSTED_WAIT: &str = "wait";
const HOSTED_MOVE: &str = "move";

impl HPMachine {
    pub fn table(program: TableProgram) -> Result<HPMachine, TableError> {
        program.validate()?;
        Ok(HPMachine { program: Program::Table(Arc::new(program)) })
    }

    pub fn is_move_state(&self, state: &str) -> bool {
        match &self.program {
            Program::Table(p) => p.move_states.contains(state),
            Program::Hosted(_) => state == HOSTED_MOVE,
        }
    }

    pub fn start(&self, e: &Valuation) -> Configuration {
        let (state, work) = match &self.program {
            Program::Table(p) => (p.start.clone(), Work::Tape { cells: Vec::new(), head: 0 }),
            Program::Hosted(a) => (HOSTED_START.to_string(), Work::Agent(Driver::new(a.clone(), e))),
        };
        Configuration { state, work, run: Vec::new(), run_cursor: 0, valuation_cursor: 0, buffer: String::new() }
    }

    /// One clock cycle: a transition, the buffer flush if a move state is
    /// entered, then the environment moves `injected` in order.
    pub fn step(&self, c: &Configuration, e: &Valuation, injected: &[String]) -> Configuration {
        let mut next = c.clone();
        match (&self.program, &mut next.work) {
            (Program::Table(p), Work::Tape { cells, head }) => {
                let w = cells.get(*head).copied().unwrap_or(BLANK);
                let r = run_tape(&c.run).chars().nth(c.run_cursor).unwrap_or(BLANK);
                let v = valuation_tape(e).chars().nth(c.valuation_cursor).unwrap_or(BLANK);
                // A missing row leaves the configuration unchanged.
                if let Some(t) = p.lookup(&c.state, w, r, v) {
                    if let Some(s) = t.write {
                        if *head >= cells.len() {
                            cells.resize(*head + 1, BLANK);
                        }
                        cells[*head] = s;
                    }
                    *head = head.saturating_add_signed(t.work_move as isize);
                    next.run_cursor += t.run_move as usize;
                    next.valuation_cursor += t.valuation_move as usize;
                    if let Some(s) = t.emit {
                        next.buffer.push(s);
                    }
                    next.state = t.next.clone();
                }
            }
            (Program::Hosted(_), Work::Agent(driver)) => match driver.turn(&c.run) {
                Some(mv) => {
                    next.buffer = mv;
                    next.state = HOSTED_MOVE.into();
                }
                None => next.state = HOSTED_WAIT.into(),
            },
            _ => unreachable!("configurations come from their own machine"),
        }
        if let Work::Agent(d) = &next.work {
            next.run_cursor = d.cursor;
        }
        if self.is_move_state(&next.state) {
            let mv = std::mem::take(&mut next.buffer);
            next.run.push(LabeledMove::machine(mv));
        }
        next.run.extend(injected.iter().map(|m| LabeledMove::env(m.clone())));
        next
    }
}

/// A machine whose transitions consult `agent`.
pub fn host(agent: &dyn Agent) -> HPMachine {
    HPMachine { program: Program::Hosted(agent.clone_box()) }
}

/// Cycle-stamped view of a configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfigSnapshot {
    pub cycle: usize,
    pub state: String,
    pub work: String,
    pub run: Run,
    pub run_cursor: usize,
    pub buffer: String,
}

impl ConfigSnapshot {
    fn of(cycle: usize, c: &Configuration) -> ConfigSnapshot {
        ConfigSnapshot {
            cycle,
            state: c.state.clone(),
            work: format!("{:?}", c.work),
            run: Run(c.run.clone()),
            run_cursor: c.run_cursor,
            buffer: c.buffer.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Branch {
    /// The run spelled after the last cycle.
    pub run: Run,
    /// Configuration after each cycle, starting with the initial one.
    pub log: Vec<ConfigSnapshot>,
}

/// The computation branch of `m` on `e` under `schedule`, for `fuel` cycles.
pub fn run_branch(m: &HPMachine, e: &Valuation, schedule: &EnvSchedule, fuel: usize) -> Branch {
    let mut c = m.start(e);
    let mut log = vec![ConfigSnapshot::of(0, &c)];
    for cycle in 0..fuel {
        c = m.step(&c, e, schedule.at(cycle));
        log.push(ConfigSnapshot::of(cycle + 1, &c));
    }
    Branch { run: Run(c.run), log }
}

/// Limits of the exhaustive schedule search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WinsOptions {
    /// Cycles at whose boundaries the environment may move.
    pub cycles: usize,
    /// Most environment moves injected at one boundary.
    pub burst: usize,
    /// Cycles run after the last injection before adjudication.
    pub settle: usize,
    /// Configurations explored per valuation.
    pub ceiling: usize,
}

impl Default for WinsOptions {
    fn default() -> Self {
        WinsOptions { cycles: 6, burst: 1, settle: 12, ceiling: 1_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub valuation: Valuation,
    pub schedule: EnvSchedule,
    pub run: Run,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WinsReport {
    pub wins: bool,
    /// Schedules played to the end.
    pub branches: usize,
    pub counterexample: Option<Counterexample>,
}

/// Whether `m` wins `f` under `star`: for every valuation and every
/// schedule of legal environment bursts within `opts`, the spelled run is
/// legal and won by the machine. Schedules containing an illegal
/// environment move are won by the machine and are not enumerated.
pub fn wins(
    m: &HPMachine,
    f: &Formula,
    star: &Interpretation,
    bounds: &Bounds,
    opts: &WinsOptions,
) -> Result<WinsReport, VerifyError> {
    let g = interpret(f, star, bounds)?;
    let mut report = WinsReport { wins: true, branches: 0, counterexample: None };
    for e in Valuation::all(&f.free_vars(), bounds.universe) {
        let game = g.at(&e);
        let mut s = SchedSearch { m, e: &e, game: &game, opts, visited: 0, report: &mut report };
        s.cycle(m.start(&e), 0, &mut EnvSchedule::default())?;
        if !report.wins {
            break;
        }
    }
    Ok(report)
}

struct SchedSearch<'a> {
    m: &'a HPMachine,
    e: &'a Valuation,
    game: &'a Game,
    opts: &'a WinsOptions,
    visited: usize,
    report: &'a mut WinsReport,
}

impl SchedSearch<'_> {
    /// Every burst of at most `left` legal environment moves at `at`.
    fn bursts(&self, at: &Game, left: usize, prefix: &mut Vec<String>, out: &mut Vec<Vec<String>>) {
        out.push(prefix.clone());
        if left == 0 {
            return;
        }
        for mv in at.moves(Player::Environment) {
            let next = at.after(&LabeledMove::env(mv.clone())).expect("listed move is legal");
            prefix.push(mv);
            self.bursts(&next, left - 1, prefix, out);
            prefix.pop();
        }
    }

    fn cycle(&mut self, c: Configuration, k: usize, sched: &mut EnvSchedule) -> Result<(), CeilingExceeded> {
        if !self.report.wins {
            return Ok(());
        }
        self.visited += 1;
        if self.visited > self.opts.ceiling {
            return Err(CeilingExceeded { ceiling: self.opts.ceiling });
        }
        if k == self.opts.cycles {
            self.finish(c, sched);
            return Ok(());
        }
        let after = self.m.step(&c, self.e, &[]);
        let Some(at) = self.game.prefix(&after.run) else {
            // The machine moved illegally.
            self.finish(after, sched);
            return Ok(());
        };
        let mut all = Vec::new();
        self.bursts(&at, self.opts.burst, &mut Vec::new(), &mut all);
        for burst in all {
            let mut next = after.clone();
            next.run.extend(burst.iter().map(|m| LabeledMove::env(m.clone())));
            if !burst.is_empty() {
                sched.0.insert(k, burst);
            }
            self.cycle(next, k + 1, sched)?;
            sched.0.remove(&k);
        }
        Ok(())
    }

    fn finish(&mut self, mut c: Configuration, sched: &EnvSchedule) {
        for _ in 0..self.opts.settle {
            c = self.m.step(&c, self.e, &[]);
        }
        self.report.branches += 1;
        let adj = adjudication(self.game, &c.run);
        if adj.winner != Player::Machine {
            self.report.wins = false;
            self.report.counterexample =
                Some(Counterexample { valuation: self.e.clone(), schedule: sched.clone(), run: Run(c.run) });
        }
    }
}
