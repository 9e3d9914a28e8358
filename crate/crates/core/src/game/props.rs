//! Legality, delays, extensional equality and the static and unistructural
//! property checks. All checks are exhaustive over bounded runs.

use std::collections::{BTreeSet, HashMap};

use super::{Game, GameFn, LabeledMove, Player, Run, Valuation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("enumeration exceeds the ceiling of {ceiling} runs")]
pub struct CeilingExceeded {
    pub ceiling: usize,
}

/// Adjudication of an arbitrary finite run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Outcome {
    /// Label of the last move of the shortest illegal prefix, if any.
    pub offender: Option<Player>,
    /// `Wn` on a legal run; the non-offender on an illegal one.
    pub winner: Player,
}

impl Outcome {
    pub fn of(g: &Game, run: &[LabeledMove]) -> Outcome {
        match first_illegal(g, run) {
            Some((_, p)) => Outcome { offender: Some(p), winner: p.flip() },
            None => Outcome { offender: None, winner: g.win(run).expect("legal") },
        }
    }

    pub fn legal(&self) -> bool {
        self.offender.is_none()
    }
}

/// Index and label of the first move that makes `run` illegal.
pub fn first_illegal(g: &Game, run: &[LabeledMove]) -> Option<(usize, Player)> {
    let mut cur = g.clone();
    for (i, m) in run.iter().enumerate() {
        match cur.after(m) {
            Some(next) => cur = next,
            None => return Some((i, m.player)),
        }
    }
    None
}

/// `run` is `p`-legal: legal, or first made illegal by the other player.
pub fn x_legal(run: &[LabeledMove], g: &Game, p: Player) -> bool {
    first_illegal(g, run).is_none_or(|(_, offender)| offender != p)
}

/// For each `p`-move of `run`, the number of other moves preceding it.
fn precedence(run: &[LabeledMove], p: Player) -> Vec<usize> {
    let mut others = 0;
    let mut out = Vec::new();
    for m in run {
        if m.player == p {
            out.push(others);
        } else {
            others += 1;
        }
    }
    out
}

fn subsequence(run: &[LabeledMove], p: Player) -> Vec<&LabeledMove> {
    run.iter().filter(|m| m.player == p).collect()
}

/// `upsilon` is a `p`-delay of `gamma`: same moves per player, and no
/// `p`-move of `gamma` moves earlier relative to the other player's moves.
pub fn is_delay(upsilon: &[LabeledMove], gamma: &[LabeledMove], p: Player) -> bool {
    for q in [Player::Machine, Player::Environment] {
        if subsequence(upsilon, q) != subsequence(gamma, q) {
            return false;
        }
    }
    precedence(upsilon, p).iter().zip(precedence(gamma, p)).all(|(u, g)| *u >= g)
}

/// Every `p`-delay of `gamma`, including `gamma` itself.
pub fn p_delays(gamma: &[LabeledMove], p: Player) -> Vec<Vec<LabeledMove>> {
    let mine: Vec<LabeledMove> = gamma.iter().filter(|m| m.player == p).cloned().collect();
    let theirs: Vec<LabeledMove> = gamma.iter().filter(|m| m.player != p).cloned().collect();
    let floor = precedence(gamma, p);
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(gamma.len());
    fn go(
        i: usize,
        j: usize,
        mine: &[LabeledMove],
        theirs: &[LabeledMove],
        floor: &[usize],
        cur: &mut Vec<LabeledMove>,
        out: &mut Vec<Vec<LabeledMove>>,
    ) {
        if i == mine.len() && j == theirs.len() {
            out.push(cur.clone());
            return;
        }
        if i < mine.len() && j >= floor[i] {
            cur.push(mine[i].clone());
            go(i + 1, j, mine, theirs, floor, cur, out);
            cur.pop();
        }
        if j < theirs.len() {
            cur.push(theirs[j].clone());
            go(i, j + 1, mine, theirs, floor, cur, out);
            cur.pop();
        }
    }
    go(0, 0, &mine, &theirs, &floor, &mut cur, &mut out);
    out
}

/// Legal positions of length at most `depth`, in depth-first order.
pub fn legal_runs(g: &Game, depth: usize) -> Vec<Run> {
    enumerate_positions(g, depth).into_iter().map(|(r, _)| r).collect()
}

/// Legal positions of length at most `depth` with their prefixed games.
pub fn enumerate_positions(g: &Game, depth: usize) -> Vec<(Run, Game)> {
    let mut out = Vec::new();
    let mut stack = vec![(Run::default(), g.clone())];
    while let Some((run, game)) = stack.pop() {
        if run.len() < depth {
            for m in game.labeled_moves().into_iter().rev() {
                if let Some(next) = game.after(&m) {
                    let mut r = run.clone();
                    r.push(m);
                    stack.push((r, next));
                }
            }
        }
        out.push((run, game));
    }
    out
}

fn move_set(g: &Game) -> BTreeSet<LabeledMove> {
    g.labeled_moves().into_iter().collect()
}

/// Extensional equality of legal runs and winners up to `depth` moves.
pub fn same_game(a: &Game, b: &Game, depth: usize) -> bool {
    if a.winner() != b.winner() {
        return false;
    }
    compare(a, b, depth, &|x, y| x.winner() == y.winner())
}

/// Equality of legal runs up to `depth` moves, ignoring winners.
pub fn same_structure(a: &Game, b: &Game, depth: usize) -> bool {
    compare(a, b, depth, &|_, _| true)
}

fn compare(a: &Game, b: &Game, depth: usize, same: &dyn Fn(&Game, &Game) -> bool) -> bool {
    if depth == 0 {
        return true;
    }
    let ms = move_set(a);
    if ms != move_set(b) {
        return false;
    }
    ms.iter().all(|m| match (a.after(m), b.after(m)) {
        (Some(x), Some(y)) => same(&x, &y) && compare(&x, &y, depth - 1, same),
        _ => false,
    })
}

/// A pair of runs witnessing that a game is not static.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StaticViolation {
    pub player: Player,
    pub gamma: Run,
    pub delay: Run,
    /// 1: `p`-legality lost; 2: `p`-won status lost.
    pub clause: u8,
}

/// Searches all runs over the game's alphabet of length at most `max_len`
/// and all their delays for a violation of either static clause.
pub fn static_violation(g: &Game, max_len: usize, ceiling: usize) -> Result<Option<StaticViolation>, CeilingExceeded> {
    let alphabet: Vec<LabeledMove> = g.alphabet(max_len).into_iter().collect();
    let mut total = 0usize;
    let mut layer = 1usize;
    for _ in 0..=max_len {
        total = total.saturating_add(layer);
        layer = layer.saturating_mul(alphabet.len());
    }
    if total > ceiling {
        return Err(CeilingExceeded { ceiling });
    }
    let mut outcomes: HashMap<Vec<LabeledMove>, Outcome> = HashMap::with_capacity(total);
    let mut stack: Vec<(Vec<LabeledMove>, Option<Game>, Option<Player>)> = vec![(Vec::new(), Some(g.clone()), None)];
    while let Some((run, game, offender)) = stack.pop() {
        let winner = match (&game, offender) {
            (Some(cur), None) => cur.winner(),
            (_, Some(p)) => p.flip(),
            (None, None) => unreachable!("illegal run has an offender"),
        };
        if run.len() < max_len {
            for m in &alphabet {
                let mut next = run.clone();
                next.push(m.clone());
                let (ng, no) = match (&game, offender) {
                    (Some(cur), None) => match cur.after(m) {
                        Some(x) => (Some(x), None),
                        None => (None, Some(m.player)),
                    },
                    _ => (None, offender),
                };
                stack.push((next, ng, no));
            }
        }
        outcomes.insert(run, Outcome { offender, winner });
    }
    let mut runs: Vec<&Vec<LabeledMove>> = outcomes.keys().collect();
    runs.sort();
    for gamma in runs {
        let og = outcomes[gamma];
        for p in [Player::Machine, Player::Environment] {
            let p_legal = og.offender != Some(p);
            let p_won = og.winner == p;
            if !p_legal && !p_won {
                continue;
            }
            for delay in p_delays(gamma, p) {
                let od = outcomes[&delay];
                let clause = if p_legal && od.offender == Some(p) {
                    1
                } else if p_won && od.winner != p {
                    2
                } else {
                    continue;
                };
                return Ok(Some(StaticViolation { player: p, gamma: Run(gamma.clone()), delay: Run(delay), clause }));
            }
        }
    }
    Ok(None)
}

/// Both static clauses hold for runs of length at most `max_len`.
pub fn is_static(g: &Game, max_len: usize, ceiling: usize) -> Result<bool, CeilingExceeded> {
    static_violation(g, max_len, ceiling).map(|v| v.is_none())
}

/// All instances of `f` that differ only in `x` have the same legal runs up
/// to `depth` moves.
pub fn is_unistructural(f: &GameFn, x: &str, universe: u32, depth: usize) -> bool {
    if !f.vars.contains(x) {
        return true;
    }
    let mut others = f.vars.clone();
    others.remove(x);
    Valuation::all(&others, universe).iter().all(|e| {
        let base = f.at(&e.with(x, 1));
        (2..=universe).all(|c| same_structure(&base, &f.at(&e.with(x, c)), depth))
    })
}
