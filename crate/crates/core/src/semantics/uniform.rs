//! Uniform winnability over a family of interpretations.
//!
//! A uniform strategy sees the run but not the interpretation, so it wins a
//! family exactly when backward induction succeeds on the tuple of instance
//! games played along a common run.

use std::collections::HashMap;

use serde::Serialize;

use crate::formula::Formula;
use crate::game::{CeilingExceeded, Game, LabeledMove, Player, Valuation};

use super::{interpret, Bounds, Interpretation, SemanticsError};

struct TupleSolver {
    memo: HashMap<Vec<LabeledMove>, bool>,
    visited: usize,
    ceiling: usize,
}

impl TupleSolver {
    /// Moves of `p` legal in every member.
    fn common_moves(games: &[Game], p: Player) -> Vec<(LabeledMove, Vec<Game>)> {
        let Some(first) = games.first() else { return Vec::new() };
        first
            .moves(p)
            .into_iter()
            .filter_map(|mv| {
                let m = LabeledMove::new(p, mv);
                let next: Option<Vec<Game>> = games.iter().map(|g| g.after(&m)).collect();
                next.map(|n| (m, n))
            })
            .collect()
    }

    fn win(&mut self, run: &mut Vec<LabeledMove>, games: &[Game]) -> Result<bool, CeilingExceeded> {
        if let Some(&w) = self.memo.get(run.as_slice()) {
            return Ok(w);
        }
        self.visited += 1;
        if self.visited > self.ceiling {
            return Err(CeilingExceeded { ceiling: self.ceiling });
        }
        let mut won = false;
        for (m, next) in Self::common_moves(games, Player::Machine) {
            run.push(m);
            won = self.win(run, &next)?;
            run.pop();
            if won {
                break;
            }
        }
        if !won && games.iter().all(|g| g.winner() == Player::Machine) {
            won = true;
            for (m, next) in Self::common_moves(games, Player::Environment) {
                run.push(m);
                let w = self.win(run, &next)?;
                run.pop();
                if !w {
                    won = false;
                    break;
                }
            }
        }
        self.memo.insert(run.clone(), won);
        Ok(won)
    }
}

/// Whether one strategy wins every game in `games` along common runs.
pub fn uniformly_winnable(games: &[Game], ceiling: usize) -> Result<bool, CeilingExceeded> {
    let mut s = TupleSolver { memo: HashMap::new(), visited: 0, ceiling };
    s.win(&mut Vec::new(), games)
}

/// A valuation and a subfamily no single strategy wins.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniformRefutation {
    pub valuation: Valuation,
    /// Indices into the supplied family; no member can be dropped.
    pub members: Vec<usize>,
}

/// Searches every valuation of the free variables of `f` for one under which
/// the family has no uniform winning strategy, then shrinks the family
/// greedily to a subfamily that still refutes. `None` certifies uniform
/// winnability of the supplied family only.
pub fn find_uniform_countermodel(
    f: &Formula,
    family: &[Interpretation],
    bounds: &Bounds,
    ceiling: usize,
) -> Result<Option<UniformRefutation>, SemanticsError> {
    let fns = family.iter().map(|star| interpret(f, star, bounds)).collect::<Result<Vec<_>, _>>()?;
    for e in Valuation::all(&f.free_vars(), bounds.universe) {
        let games: Vec<Game> = fns.iter().map(|g| g.at(&e)).collect();
        if uniformly_winnable(&games, ceiling)? {
            continue;
        }
        let mut members: Vec<usize> = (0..games.len()).collect();
        let mut i = 0;
        while i < members.len() {
            let trial: Vec<usize> = members.iter().copied().filter(|&m| m != members[i]).collect();
            let sub: Vec<Game> = trial.iter().map(|&m| games[m].clone()).collect();
            if !trial.is_empty() && !uniformly_winnable(&sub, ceiling)? {
                members = trial;
            } else {
                i += 1;
            }
        }
        return Ok(Some(UniformRefutation { valuation: e, members }));
    }
    Ok(None)
}
