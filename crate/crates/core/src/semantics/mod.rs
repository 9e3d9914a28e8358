//! Interpretations, formula-to-game compilation, adjudication with
//! bring-down traces, a finite-game solver and uniform refutation.

mod interp;
pub mod library;
mod solve;
mod trace;
mod uniform;

use serde::{Deserialize, Serialize};

use crate::formula::Formula;
use crate::game::{first_illegal, CeilingExceeded, GameFn, LabeledMove, Player, Valuation};

pub use interp::{Builtin, Case, Interpretation, Predicate, Template};
pub use solve::{winnable, PositionalStrategy, Solution};
pub use trace::{trace, Position, Snapshot};
pub use uniform::{find_uniform_countermodel, uniformly_winnable, UniformRefutation};

/// Size limits for games built from formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    /// Constants range over `1..=universe`.
    pub universe: u32,
    /// Branch or copy limit of every recurrence operator.
    pub branches: usize,
}

impl Default for Bounds {
    fn default() -> Bounds {
        Bounds { universe: 3, branches: 2 }
    }
}

impl Bounds {
    pub fn universe(universe: u32) -> Bounds {
        Bounds { universe, ..Bounds::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SemanticsError {
    #[error("no interpretation for {symbol}")]
    Uninterpreted { symbol: String },
    #[error("interpretation of {symbol} does not fit arity {arity}")]
    Arity { symbol: String, arity: usize },
    #[error("condition (i): game for {symbol} depends on variable {var} outside its arguments")]
    Dependence { symbol: String, var: String },
    #[error("condition (ii): game for {symbol} is not unistructural in blind variable {var}")]
    NotUnistructural { symbol: String, var: String },
    #[error("template for {symbol} mentions general letter {inner}")]
    NestedGeneral { symbol: String, inner: String },
    #[error("run is illegal at move {index}, made by {blame}")]
    Illegal { index: usize, blame: Player },
    #[error("bad interpretation file: {0}")]
    File(String),
    #[error(transparent)]
    Ceiling(#[from] CeilingExceeded),
}

/// `f*` as a game depending on the free variables of `f`.
pub fn interpret(f: &Formula, star: &Interpretation, bounds: &Bounds) -> Result<GameFn, SemanticsError> {
    star.check(f, bounds)?;
    let (f, star, b) = (f.clone(), star.clone(), *bounds);
    Ok(GameFn::new(f.free_vars(), move |e| interp::build(&f, &star, &b, e)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Adjudication {
    pub legal: bool,
    /// Player whose move first made the run illegal.
    pub blame: Option<Player>,
    /// `Wn` on a legal run, otherwise the player not blamed.
    pub winner: Player,
}

pub fn adjudicate(
    f: &Formula,
    star: &Interpretation,
    bounds: &Bounds,
    e: &Valuation,
    run: &[LabeledMove],
) -> Result<Adjudication, SemanticsError> {
    let game = interpret(f, star, bounds)?.at(e);
    Ok(match first_illegal(&game, run) {
        Some((_, p)) => Adjudication { legal: false, blame: Some(p), winner: p.flip() },
        None => Adjudication { legal: true, blame: None, winner: game.win(run).expect("legal run") },
    })
}

#[cfg(test)]
mod tests;
