//! Branching recurrence bounded by a number of branches.
//!
//! Branches are addressed by bit strings; the root branch is the empty
//! string. The splitting player's move `s(w)` replaces leaf `w` by `w0` and
//! `w1`, both continuing from `w`'s position. A move `w#α` is made in every
//! leaf extending `w`, so a move made before a split behaves like the same
//! move made in both branches after it.

use std::collections::{BTreeMap, BTreeSet};

use super::{Game, LabeledMove, Player, Sense};

#[derive(Clone, Debug)]
pub(crate) struct Branching {
    /// `Conj`: environment splits, every leaf must be won by the machine.
    /// `Disj`: machine splits, one won leaf suffices.
    sense: Sense,
    limit: usize,
    leaves: BTreeMap<String, Game>,
}

fn parse_split(mv: &str) -> Option<&str> {
    let w = mv.strip_prefix("s(")?.strip_suffix(')')?;
    w.bytes().all(|b| b == b'0' || b == b'1').then_some(w)
}

impl Branching {
    pub(crate) fn new(body: &Game, limit: usize, sense: Sense) -> Branching {
        assert!(limit >= 1, "at least one branch");
        Branching { sense, limit, leaves: BTreeMap::from([(String::new(), body.clone())]) }
    }

    fn splitter(&self) -> Player {
        self.sense.chooser()
    }

    fn under<'a>(&'a self, w: &'a str) -> impl Iterator<Item = (&'a String, &'a Game)> + 'a {
        self.leaves.iter().filter(move |(v, _)| v.starts_with(w))
    }

    pub(crate) fn winner(&self) -> Player {
        self.sense.combine(self.leaves.values().map(|g| g.winner()))
    }

    pub(crate) fn after(&self, m: &LabeledMove) -> Option<Branching> {
        if let Some(w) = parse_split(&m.mv) {
            if m.player != self.splitter() || self.leaves.len() >= self.limit {
                return None;
            }
            let g = self.leaves.get(w)?.clone();
            let mut next = self.clone();
            next.leaves.remove(w);
            next.leaves.insert(format!("{w}0"), g.clone());
            next.leaves.insert(format!("{w}1"), g);
            return Some(next);
        }
        let (w, alpha) = m.mv.split_once('#')?;
        if !w.bytes().all(|b| b == b'0' || b == b'1') {
            return None;
        }
        let inner = LabeledMove::new(m.player, alpha);
        let mut next = self.clone();
        let mut touched = false;
        for (v, g) in self.under(w) {
            next.leaves.insert(v.clone(), g.after(&inner)?);
            touched = true;
        }
        touched.then_some(next)
    }

    pub(crate) fn moves(&self, p: Player) -> Vec<String> {
        let mut out = Vec::new();
        if p == self.splitter() && self.leaves.len() < self.limit {
            out.extend(self.leaves.keys().map(|w| format!("s({w})")));
        }
        let addresses: BTreeSet<String> =
            self.leaves.keys().flat_map(|v| (0..=v.len()).map(move |i| v[..i].to_string())).collect();
        for w in addresses {
            let mut group = self.under(&w).map(|(_, g)| g);
            let first = group.next().expect("address is a prefix of some leaf");
            let rest: Vec<&Game> = group.collect();
            for alpha in first.moves(p) {
                let m = LabeledMove::new(p, alpha.clone());
                if rest.iter().all(|g| g.after(&m).is_some()) {
                    out.push(format!("{w}#{alpha}"));
                }
            }
        }
        out
    }

    pub(crate) fn depth_bound(&self) -> usize {
        let splits = self.limit - self.leaves.len();
        let depths: Vec<usize> = self.leaves.values().map(|g| g.depth_bound()).collect();
        let deepest = depths.iter().copied().max().unwrap_or(0);
        splits + depths.iter().sum::<usize>() + splits * deepest
    }
}
