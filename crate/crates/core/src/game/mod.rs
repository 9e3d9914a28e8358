//! Constant games as immutable values.
//!
//! A game is determined by three things at its current position: the moves
//! each player may make, the game that results from a move (prefixation), and
//! the winner of the empty run. Runs of a game are folded through
//! [`Game::after`], so `Wn⟨Φ⟩A⟨⟩ = WnA⟨Φ⟩` holds by construction.

mod branching;
mod explicit;
mod props;
mod run;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

pub use explicit::{ExplicitError, ExplicitGame, ExplicitRecord};
pub use props::{
    enumerate_positions, first_illegal, is_delay, is_static, is_unistructural, legal_runs, p_delays, same_game,
    same_structure, static_violation, x_legal, CeilingExceeded, Outcome, StaticViolation,
};
pub use run::{LabeledMove, Player, Run, RunParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Conj,
    Disj,
}

impl Sense {
    pub fn dual(self) -> Sense {
        match self {
            Sense::Conj => Sense::Disj,
            Sense::Disj => Sense::Conj,
        }
    }

    /// The player who makes the choice in a choice game of this sense.
    pub fn chooser(self) -> Player {
        match self {
            Sense::Conj => Player::Environment,
            Sense::Disj => Player::Machine,
        }
    }

    fn combine(self, mut winners: impl Iterator<Item = Player>) -> Player {
        match self {
            Sense::Conj if winners.all(|w| w == Player::Machine) => Player::Machine,
            Sense::Conj => Player::Environment,
            Sense::Disj if winners.any(|w| w == Player::Machine) => Player::Machine,
            Sense::Disj => Player::Environment,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Node {
    Elementary(Player),
    Explicit(Arc<ExplicitGame>, Vec<LabeledMove>),
    Neg(Game),
    /// Components addressed by `i.` prefixes, `i` counted from 1.
    Par(Sense, Vec<Game>),
    /// Unresolved choice; the chooser's move is the bare index.
    Choice(Sense, Vec<Game>),
    /// Instances sharing one run; structure must coincide.
    Blind(Sense, Vec<Game>),
    Branching(branching::Branching),
}

/// A constant game at some position. Cloning is cheap.
#[derive(Clone, Debug)]
pub struct Game(pub(crate) Arc<Node>);

impl Game {
    fn node(n: Node) -> Game {
        Game(Arc::new(n))
    }

    /// The elementary game won by `winner`.
    pub fn elementary(winner: Player) -> Game {
        Game::node(Node::Elementary(winner))
    }

    pub fn top() -> Game {
        Game::elementary(Player::Machine)
    }

    pub fn bottom() -> Game {
        Game::elementary(Player::Environment)
    }

    pub fn explicit(table: Arc<ExplicitGame>) -> Game {
        Game::node(Node::Explicit(table, Vec::new()))
    }

    pub fn neg(a: &Game) -> Game {
        Game::node(Node::Neg(a.clone()))
    }

    pub fn pand(a: &Game, b: &Game) -> Game {
        Game::node(Node::Par(Sense::Conj, vec![a.clone(), b.clone()]))
    }

    pub fn por(a: &Game, b: &Game) -> Game {
        Game::node(Node::Par(Sense::Disj, vec![a.clone(), b.clone()]))
    }

    pub fn implies(a: &Game, b: &Game) -> Game {
        Game::por(&Game::neg(a), b)
    }

    pub fn cand(a: &Game, b: &Game) -> Game {
        Game::node(Node::Choice(Sense::Conj, vec![a.clone(), b.clone()]))
    }

    pub fn cor(a: &Game, b: &Game) -> Game {
        Game::node(Node::Choice(Sense::Disj, vec![a.clone(), b.clone()]))
    }

    /// Choice over instances `A(1), ..., A(U)`; the chooser names a constant.
    pub fn choice(sense: Sense, instances: Vec<Game>) -> Game {
        Game::node(Node::Choice(sense, instances))
    }

    /// Parallel combination of instances addressed by `c.` prefixes.
    pub fn parallel(sense: Sense, instances: Vec<Game>) -> Game {
        Game::node(Node::Par(sense, instances))
    }

    /// Blind quantification over instances with a common structure.
    pub fn blind(sense: Sense, instances: Vec<Game>) -> Game {
        Game::node(Node::Blind(sense, instances))
    }

    /// `n`-fold parallel conjunction `A /\ (A /\ ...)`.
    pub fn pr_rec(a: &Game, n: usize) -> Game {
        assert!(n >= 1, "at least one copy");
        (1..n).fold(a.clone(), |acc, _| Game::pand(a, &acc))
    }

    /// `n`-fold parallel disjunction.
    pub fn pr_corec(a: &Game, n: usize) -> Game {
        assert!(n >= 1, "at least one copy");
        (1..n).fold(a.clone(), |acc, _| Game::por(a, &acc))
    }

    /// Branching recurrence limited to `n` branches; the environment splits.
    pub fn br_rec(a: &Game, n: usize) -> Game {
        Game::node(Node::Branching(branching::Branching::new(a, n, Sense::Conj)))
    }

    /// Branching corecurrence limited to `n` branches; the machine splits.
    pub fn br_corec(a: &Game, n: usize) -> Game {
        Game::node(Node::Branching(branching::Branching::new(a, n, Sense::Disj)))
    }

    /// Winner of the empty run from the current position.
    pub fn winner(&self) -> Player {
        match &*self.0 {
            Node::Elementary(p) => *p,
            Node::Explicit(t, at) => t.winner(at).expect("explicit position is legal"),
            Node::Neg(a) => a.winner().flip(),
            Node::Par(s, xs) | Node::Blind(s, xs) => s.combine(xs.iter().map(|x| x.winner())),
            Node::Choice(Sense::Conj, _) => Player::Machine,
            Node::Choice(Sense::Disj, _) => Player::Environment,
            Node::Branching(b) => b.winner(),
        }
    }

    /// `⟨m⟩A`, or `None` when `m` is illegal here.
    pub fn after(&self, m: &LabeledMove) -> Option<Game> {
        match &*self.0 {
            Node::Elementary(_) => None,
            Node::Explicit(t, at) => {
                let mut next = at.clone();
                next.push(m.clone());
                t.winner(&next).map(|_| Game::node(Node::Explicit(t.clone(), next)))
            }
            Node::Neg(a) => a.after(&m.flipped()).map(|g| Game::node(Node::Neg(g))),
            Node::Par(s, xs) => {
                let (i, rest) = split_index(&m.mv, xs.len())?;
                let child = xs[i].after(&LabeledMove::new(m.player, rest))?;
                let mut ys = xs.clone();
                ys[i] = child;
                Some(Game::node(Node::Par(*s, ys)))
            }
            Node::Choice(s, xs) => {
                if m.player != s.chooser() {
                    return None;
                }
                let i = parse_index(&m.mv, xs.len())?;
                Some(xs[i].clone())
            }
            Node::Blind(s, xs) => {
                let ys: Option<Vec<Game>> = xs.iter().map(|x| x.after(m)).collect();
                Some(Game::node(Node::Blind(*s, ys?)))
            }
            Node::Branching(b) => b.after(m).map(|b| Game::node(Node::Branching(b))),
        }
    }

    /// Legal moves of `p` at the current position.
    pub fn moves(&self, p: Player) -> Vec<String> {
        match &*self.0 {
            Node::Elementary(_) => Vec::new(),
            Node::Explicit(t, at) => t.moves(at, p),
            Node::Neg(a) => a.moves(p.flip()),
            Node::Par(_, xs) => xs
                .iter()
                .enumerate()
                .flat_map(|(i, x)| x.moves(p).into_iter().map(move |m| format!("{}.{m}", i + 1)))
                .collect(),
            Node::Choice(s, xs) if s.chooser() == p => (1..=xs.len()).map(|i| i.to_string()).collect(),
            Node::Choice(..) => Vec::new(),
            Node::Blind(_, xs) => {
                let first = xs.first().map(|x| x.moves(p)).unwrap_or_default();
                first
                    .into_iter()
                    .filter(|m| xs.iter().all(|x| x.after(&LabeledMove::new(p, m.clone())).is_some()))
                    .collect()
            }
            Node::Branching(b) => b.moves(p),
        }
    }

    pub fn labeled_moves(&self) -> Vec<LabeledMove> {
        [Player::Machine, Player::Environment]
            .into_iter()
            .flat_map(|p| self.moves(p).into_iter().map(move |m| LabeledMove::new(p, m)))
            .collect()
    }

    /// `⟨Φ⟩A`, or `None` when `Φ` is not a legal position.
    pub fn prefix(&self, run: &[LabeledMove]) -> Option<Game> {
        run.iter().try_fold(self.clone(), |g, m| g.after(m))
    }

    pub fn is_legal(&self, run: &[LabeledMove]) -> bool {
        self.prefix(run).is_some()
    }

    /// `WnA⟨Γ⟩` for a legal run.
    pub fn win(&self, run: &[LabeledMove]) -> Option<Player> {
        self.prefix(run).map(|g| g.winner())
    }

    /// Sound upper bound on the length of any legal run from here.
    pub fn depth_bound(&self) -> usize {
        match &*self.0 {
            Node::Elementary(_) => 0,
            Node::Explicit(t, at) => t.depth_from(at),
            Node::Neg(a) => a.depth_bound(),
            Node::Par(_, xs) => xs.iter().map(|x| x.depth_bound()).sum(),
            Node::Choice(_, xs) => 1 + xs.iter().map(|x| x.depth_bound()).max().unwrap_or(0),
            Node::Blind(_, xs) => xs.iter().map(|x| x.depth_bound()).max().unwrap_or(0),
            Node::Branching(b) => b.depth_bound(),
        }
    }

    /// Every move occurring in a legal run of length at most `depth`.
    pub fn alphabet(&self, depth: usize) -> BTreeSet<LabeledMove> {
        let mut out = BTreeSet::new();
        let mut stack = vec![(self.clone(), 0usize)];
        while let Some((g, d)) = stack.pop() {
            if d >= depth {
                continue;
            }
            for m in g.labeled_moves() {
                if let Some(next) = g.after(&m) {
                    stack.push((next, d + 1));
                }
                out.insert(m);
            }
        }
        out
    }
}

/// Splits `"i.rest"` with `1 <= i <= n` into a zero-based index and `rest`.
fn split_index(mv: &str, n: usize) -> Option<(usize, &str)> {
    let (head, rest) = mv.split_once('.')?;
    Some((parse_index(head, n)?, rest))
}

fn parse_index(s: &str, n: usize) -> Option<usize> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) || s.starts_with('0') {
        return None;
    }
    let i: usize = s.parse().ok()?;
    (1..=n).contains(&i).then_some(i - 1)
}

/// Assignment of constants to variables; unmentioned variables are 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct Valuation(pub BTreeMap<String, u32>);

impl Valuation {
    pub fn get(&self, x: &str) -> u32 {
        self.0.get(x).copied().unwrap_or(1)
    }

    pub fn with(&self, x: &str, c: u32) -> Valuation {
        let mut v = self.clone();
        v.0.insert(x.to_string(), c);
        v
    }

    /// Every valuation of `vars` over `1..=universe`.
    pub fn all(vars: &BTreeSet<String>, universe: u32) -> Vec<Valuation> {
        vars.iter().fold(vec![Valuation::default()], |acc, x| {
            acc.iter().flat_map(|e| (1..=universe).map(move |c| e.with(x, c))).collect()
        })
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Parses `x=1, y=2`, optionally in braces, the form `Display` prints.
impl std::str::FromStr for Valuation {
    type Err = String;
    fn from_str(s: &str) -> Result<Valuation, String> {
        let body = s.trim().trim_start_matches('{').trim_end_matches('}');
        let mut v = Valuation::default();
        for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (x, c) = part.split_once('=').ok_or_else(|| format!("expected var=constant, got {part:?}"))?;
            let c: u32 = c.trim().parse().map_err(|_| format!("bad constant in {part:?}"))?;
            if c == 0 {
                return Err(format!("constants start at 1, got {part:?}"));
            }
            v.0.insert(x.trim().to_string(), c);
        }
        Ok(v)
    }
}

type Builder = dyn Fn(&Valuation) -> Game + Send + Sync;

/// A game depending on the variables in `vars`.
#[derive(Clone)]
pub struct GameFn {
    pub vars: BTreeSet<String>,
    build: Arc<Builder>,
}

impl fmt::Debug for GameFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GameFn({:?})", self.vars)
    }
}

impl GameFn {
    pub fn new(vars: BTreeSet<String>, build: impl Fn(&Valuation) -> Game + Send + Sync + 'static) -> GameFn {
        GameFn { vars, build: Arc::new(build) }
    }

    pub fn constant(g: Game) -> GameFn {
        GameFn::new(BTreeSet::new(), move |_| g.clone())
    }

    /// The instance `e[A]`.
    pub fn at(&self, e: &Valuation) -> Game {
        (self.build)(e)
    }

    fn quantified(&self, x: &str, universe: u32, wrap: fn(Vec<Game>) -> Game) -> GameFn {
        let inner = self.clone();
        let x = x.to_string();
        let mut vars = self.vars.clone();
        vars.remove(&x);
        GameFn::new(vars, move |e| wrap((1..=universe).map(|c| inner.at(&e.with(&x, c))).collect()))
    }

    pub fn choice_all(&self, x: &str, universe: u32) -> GameFn {
        self.quantified(x, universe, |xs| Game::choice(Sense::Conj, xs))
    }

    pub fn choice_ex(&self, x: &str, universe: u32) -> GameFn {
        self.quantified(x, universe, |xs| Game::choice(Sense::Disj, xs))
    }

    pub fn par_all(&self, x: &str, universe: u32) -> GameFn {
        self.quantified(x, universe, |xs| Game::parallel(Sense::Conj, xs))
    }

    pub fn par_ex(&self, x: &str, universe: u32) -> GameFn {
        self.quantified(x, universe, |xs| Game::parallel(Sense::Disj, xs))
    }

    /// `∀x`; `None` when the argument is not unistructural in `x`.
    pub fn blind_all(&self, x: &str, universe: u32, depth: usize) -> Option<GameFn> {
        is_unistructural(self, x, universe, depth)
            .then(|| self.quantified(x, universe, |xs| Game::blind(Sense::Conj, xs)))
    }

    pub fn blind_ex(&self, x: &str, universe: u32, depth: usize) -> Option<GameFn> {
        is_unistructural(self, x, universe, depth)
            .then(|| self.quantified(x, universe, |xs| Game::blind(Sense::Disj, xs)))
    }
}
