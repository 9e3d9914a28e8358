//! Formula-level bring-down of a run. Choice moves collapse the chosen
//! component or substitute the chosen constant; parallel and blind structure
//! persists. Moves inside general atoms and recurrences are recorded as
//! annotations.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::formula::{BinOp, Formula, Quant, Term};
use crate::game::{first_illegal, Game, LabeledMove, Player, Run, Valuation};

use super::{interpret, Bounds, Interpretation, SemanticsError};

/// A position of a formula game as a partially played formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Position {
    /// Not yet entered by any move.
    Formula(Formula),
    Not(Box<Position>),
    /// `/\`, `\/` or `->`.
    Bin(BinOp, Box<Position>, Box<Position>),
    /// `all` or `ex`; the body shares every move.
    Blind(Quant, String, Box<Position>),
    /// `pall` or `pex` expanded into its instances.
    Parallel(Quant, Vec<Position>),
    /// A general atom or recurrence with the moves made inside it.
    Played(Formula, Run),
}

fn chooser(op: BinOp) -> Option<Player> {
    match op {
        BinOp::CAnd => Some(Player::Environment),
        BinOp::COr => Some(Player::Machine),
        _ => None,
    }
}

fn index(s: &str, n: usize) -> Option<usize> {
    let i: usize = s.parse().ok()?;
    (!s.starts_with('0') && (1..=n).contains(&i)).then_some(i - 1)
}

impl Position {
    /// Formula-level prefixation, assuming the game accepted `m`.
    fn step(&self, m: &LabeledMove, universe: u32) -> Option<Position> {
        match self {
            Position::Formula(f) => match f {
                Formula::Bin(op, a, b) if chooser(*op).is_some() => {
                    if chooser(*op) != Some(m.player) {
                        return None;
                    }
                    let picked = [a, b][index(&m.mv, 2)?];
                    Some(Position::Formula((**picked).clone()))
                }
                Formula::Quant(q, x, body) if q.is_choice() => {
                    let owner = if *q == Quant::ChoiceAll { Player::Environment } else { Player::Machine };
                    if owner != m.player {
                        return None;
                    }
                    let c = index(&m.mv, universe as usize)? as u32 + 1;
                    body.substitute(x, &Term::Const(c)).ok().map(Position::Formula)
                }
                _ => Position::open(f, universe)?.step(m, universe),
            },
            Position::Not(p) => Some(Position::Not(Box::new(p.step(&m.flipped(), universe)?))),
            Position::Bin(op, a, b) => {
                let (head, rest) = m.mv.split_once('.')?;
                let inner = LabeledMove::new(m.player, rest);
                match index(head, 2)? {
                    0 if *op == BinOp::Implies => {
                        let a = a.step(&inner.flipped(), universe)?;
                        Some(Position::Bin(*op, Box::new(a), b.clone()))
                    }
                    0 => Some(Position::Bin(*op, Box::new(a.step(&inner, universe)?), b.clone())),
                    _ => Some(Position::Bin(*op, a.clone(), Box::new(b.step(&inner, universe)?))),
                }
            }
            Position::Blind(q, x, p) => Some(Position::Blind(*q, x.clone(), Box::new(p.step(m, universe)?))),
            Position::Parallel(q, ps) => {
                let (head, rest) = m.mv.split_once('.')?;
                let i = index(head, ps.len())?;
                let mut ps = ps.clone();
                ps[i] = ps[i].step(&LabeledMove::new(m.player, rest), universe)?;
                Some(Position::Parallel(*q, ps))
            }
            Position::Played(f, run) => {
                let mut run = run.clone();
                run.push(m.clone());
                Some(Position::Played(f.clone(), run))
            }
        }
    }

    /// Structural form of an unentered non-choice formula.
    fn open(f: &Formula, universe: u32) -> Option<Position> {
        let leaf = |g: &Formula| Box::new(Position::Formula(g.clone()));
        Some(match f {
            Formula::Not(a) => Position::Not(leaf(a)),
            Formula::Bin(op, a, b) => Position::Bin(*op, leaf(a), leaf(b)),
            Formula::Quant(q, x, body) if q.is_blind() => Position::Blind(*q, x.clone(), leaf(body)),
            Formula::Quant(q, x, body) => Position::Parallel(
                *q,
                (1..=universe)
                    .map(|c| body.substitute(x, &Term::Const(c)).map(Position::Formula))
                    .collect::<Result<_, _>>()
                    .ok()?,
            ),
            Formula::Atom(_) | Formula::Rec(..) => Position::Played(f.clone(), Run::default()),
            Formula::Top | Formula::Bottom => return None,
        })
    }

    /// The position as a formula when no annotation is needed; parallel
    /// quantifier instances become a right-nested chain.
    pub fn to_formula(&self) -> Option<Formula> {
        Some(match self {
            Position::Formula(f) => f.clone(),
            Position::Not(p) => Formula::Not(Box::new(p.to_formula()?)),
            Position::Bin(op, a, b) => Formula::Bin(*op, Box::new(a.to_formula()?), Box::new(b.to_formula()?)),
            Position::Blind(q, x, p) => Formula::Quant(*q, x.clone(), Box::new(p.to_formula()?)),
            Position::Parallel(q, ps) => {
                let op = if *q == Quant::ParAll { BinOp::PAnd } else { BinOp::POr };
                let mut parts = ps.iter().rev().map(|p| p.to_formula());
                let last = parts.next()??;
                parts.try_fold(last, |acc, p| Some(Formula::Bin(op, Box::new(p?), Box::new(acc))))?
            }
            Position::Played(f, run) if run.is_empty() => f.clone(),
            Position::Played(..) => return None,
        })
    }

    fn is_compound(&self) -> bool {
        match self {
            Position::Formula(f) => matches!(f, Formula::Bin(..) | Formula::Quant(..)),
            Position::Bin(..) | Position::Blind(..) | Position::Parallel(..) => true,
            Position::Not(_) | Position::Played(..) => false,
        }
    }
}

fn op_text(op: BinOp) -> &'static str {
    match op {
        BinOp::PAnd => "/\\",
        BinOp::POr => "\\/",
        BinOp::Implies => "->",
        BinOp::CAnd => "&",
        BinOp::COr => "|",
    }
}

fn quant_text(q: Quant) -> &'static str {
    match q {
        Quant::BlindAll => "all",
        Quant::BlindEx => "ex",
        Quant::ChoiceAll => "!",
        Quant::ChoiceEx => "?",
        Quant::ParAll => "pall",
        Quant::ParEx => "pex",
    }
}

/// Formula text; an annotated atom prints as `P<T:1 B:2>`.
impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(g) = self.to_formula() {
            return write!(f, "{g}");
        }
        let wrap = |p: &Position| if p.is_compound() { format!("({p})") } else { p.to_string() };
        match self {
            Position::Formula(g) => write!(f, "{g}"),
            Position::Not(p) => write!(f, "~{}", wrap(p)),
            Position::Bin(op, a, b) => write!(f, "{} {} {}", wrap(a), op_text(*op), wrap(b)),
            Position::Blind(q, x, p) => write!(f, "{} {x}. {}", quant_text(*q), wrap(p)),
            Position::Parallel(q, ps) => {
                let op = if *q == Quant::ParAll { " /\\ " } else { " \\/ " };
                let parts: Vec<String> = ps.iter().map(wrap).collect();
                f.write_str(&parts.join(op))
            }
            Position::Played(g, run) => {
                let g = if matches!(g, Formula::Atom(_)) { g.to_string() } else { format!("({g})") };
                write!(f, "{g}<{run}>")
            }
        }
    }
}

/// One element of a bring-down trace.
#[derive(Clone, Debug)]
pub struct Snapshot {
    /// The move leading here; `None` for the initial position.
    pub mv: Option<LabeledMove>,
    pub position: Position,
    /// The game `<moves so far>e[f*]`.
    pub game: Game,
}

impl Serialize for Snapshot {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Snapshot", 3)?;
        st.serialize_field("move", &self.mv)?;
        st.serialize_field("position", &self.position.to_string())?;
        st.serialize_field("winner", &self.game.winner())?;
        st.end()
    }
}

/// Snapshots after each prefix of a legal run, starting with the empty one.
pub fn trace(
    f: &Formula,
    star: &Interpretation,
    bounds: &Bounds,
    e: &Valuation,
    run: &[LabeledMove],
) -> Result<Vec<Snapshot>, SemanticsError> {
    let game = interpret(f, star, bounds)?.at(e);
    if let Some((index, blame)) = first_illegal(&game, run) {
        return Err(SemanticsError::Illegal { index, blame });
    }
    let mut out = vec![Snapshot { mv: None, position: Position::Formula(f.clone()), game }];
    for m in run {
        let last = out.last().expect("nonempty");
        let position = last.position.step(m, bounds.universe).expect("formula positions follow every legal move");
        let game = last.game.after(m).expect("legal run");
        out.push(Snapshot { mv: Some(m.clone()), position, game });
    }
    Ok(out)
}
