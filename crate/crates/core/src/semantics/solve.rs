//! Backward induction for finite static games.
//!
//! A position is winnable when the machine has a move to a winnable position,
//! or the machine wins the position as it stands and every environment move
//! leads to a winnable position.

use std::collections::HashMap;

use crate::game::{CeilingExceeded, Game, LabeledMove, Player};

struct Solver {
    memo: HashMap<Vec<LabeledMove>, Option<LabeledMove>>,
    wins: HashMap<Vec<LabeledMove>, bool>,
    visited: usize,
    ceiling: usize,
}

impl Solver {
    fn new(ceiling: usize) -> Solver {
        Solver { memo: HashMap::new(), wins: HashMap::new(), visited: 0, ceiling }
    }

    fn win(&mut self, run: &mut Vec<LabeledMove>, g: &Game) -> Result<bool, CeilingExceeded> {
        if let Some(&w) = self.wins.get(run.as_slice()) {
            return Ok(w);
        }
        self.visited += 1;
        if self.visited > self.ceiling {
            return Err(CeilingExceeded { ceiling: self.ceiling });
        }
        let mut result = None;
        for mv in g.moves(Player::Machine) {
            let m = LabeledMove::machine(mv);
            let next = g.after(&m).expect("listed move is legal");
            run.push(m.clone());
            let w = self.win(run, &next)?;
            run.pop();
            if w {
                result = Some(Some(m));
                break;
            }
        }
        if result.is_none() && g.winner() == Player::Machine {
            let mut all = true;
            for mv in g.moves(Player::Environment) {
                let m = LabeledMove::env(mv);
                let next = g.after(&m).expect("listed move is legal");
                run.push(m);
                let w = self.win(run, &next)?;
                run.pop();
                if !w {
                    all = false;
                    break;
                }
            }
            if all {
                result = Some(None);
            }
        }
        let won = result.is_some();
        if let Some(choice) = result {
            self.memo.insert(run.clone(), choice);
        }
        self.wins.insert(run.clone(), won);
        Ok(won)
    }
}

/// Machine replies computed by backward induction, keyed by position.
#[derive(Clone, Debug)]
pub struct PositionalStrategy {
    root: Game,
    table: HashMap<Vec<LabeledMove>, Option<LabeledMove>>,
    ceiling: usize,
}

impl PositionalStrategy {
    /// The machine's move at `run`; `None` means wait. Positions outside the
    /// table are solved on demand; unwinnable or illegal positions wait.
    pub fn reply(&mut self, run: &[LabeledMove]) -> Option<LabeledMove> {
        if let Some(choice) = self.table.get(run) {
            return choice.clone();
        }
        let g = self.root.prefix(run)?;
        let mut solver = Solver::new(self.ceiling);
        let mut key = run.to_vec();
        match solver.win(&mut key, &g) {
            Ok(true) => {
                self.table.extend(solver.memo);
                self.table.get(run).cloned().flatten()
            }
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub winnable: bool,
    /// Present when `winnable`.
    pub strategy: Option<PositionalStrategy>,
    /// Positions examined.
    pub visited: usize,
}

/// Decides whether the machine can win `g` from its current position,
/// examining at most `ceiling` positions.
pub fn winnable(g: &Game, ceiling: usize) -> Result<Solution, CeilingExceeded> {
    let mut solver = Solver::new(ceiling);
    let won = solver.win(&mut Vec::new(), g)?;
    let strategy = won.then(|| PositionalStrategy { root: g.clone(), table: solver.memo, ceiling });
    Ok(Solution { winnable: won, strategy, visited: solver.visited })
}
