use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{LabeledMove, Player, Run};

/// One legal position of an explicit game as stored in files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplicitRecord {
    pub position: Run,
    pub winner: Player,
    pub children: Vec<LabeledMove>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct ExplicitFile {
    format: String,
    positions: Vec<ExplicitRecord>,
}

const FORMAT: &str = "clwork-explicit-game/1";

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExplicitError {
    #[error("no record for the empty position")]
    NoRoot,
    #[error("position {0} listed twice")]
    Duplicate(String),
    #[error("child {child} of {parent} has no record")]
    MissingChild { parent: String, child: String },
    #[error("position {0} is not listed as a child of its parent")]
    Orphan(String),
    #[error("unsupported format tag {0:?}")]
    Format(String),
    #[error("malformed file: {0}")]
    Syntax(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Entry {
    winner: Player,
    children: Vec<LabeledMove>,
    height: usize,
}

/// A finite prefix-closed set of legal positions with a winner for each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitGame {
    table: BTreeMap<Vec<LabeledMove>, Entry>,
}

impl ExplicitGame {
    pub fn from_records(records: Vec<ExplicitRecord>) -> Result<ExplicitGame, ExplicitError> {
        let mut table = BTreeMap::new();
        for r in &records {
            let key = r.position.0.clone();
            let entry = Entry { winner: r.winner, children: r.children.clone(), height: 0 };
            if table.insert(key, entry).is_some() {
                return Err(ExplicitError::Duplicate(r.position.to_string()));
            }
        }
        if !table.contains_key(&Vec::new()) {
            return Err(ExplicitError::NoRoot);
        }
        for r in &records {
            for c in &r.children {
                let mut next = r.position.0.clone();
                next.push(c.clone());
                if !table.contains_key(&next) {
                    return Err(ExplicitError::MissingChild { parent: r.position.to_string(), child: c.to_string() });
                }
            }
            if let Some((last, parent)) = r.position.0.split_last() {
                let listed = table.get(parent).is_some_and(|e: &Entry| e.children.contains(last));
                if !listed {
                    return Err(ExplicitError::Orphan(r.position.to_string()));
                }
            }
        }
        let mut game = ExplicitGame { table };
        game.compute_heights();
        Ok(game)
    }

    /// Builds the game whose legal positions are the runs over `alphabet`
    /// of length at most `depth` accepted by `legal` (checked prefix by prefix).
    pub fn from_fn(
        alphabet: &[LabeledMove],
        depth: usize,
        legal: impl Fn(&[LabeledMove]) -> bool,
        winner: impl Fn(&[LabeledMove]) -> Player,
    ) -> ExplicitGame {
        let mut records = Vec::new();
        let mut stack = vec![Vec::<LabeledMove>::new()];
        while let Some(pos) = stack.pop() {
            let mut children = Vec::new();
            if pos.len() < depth {
                for m in alphabet {
                    let mut next = pos.clone();
                    next.push(m.clone());
                    if legal(&next) {
                        children.push(m.clone());
                        stack.push(next);
                    }
                }
            }
            records.push(ExplicitRecord { winner: winner(&pos), position: Run(pos), children });
        }
        ExplicitGame::from_records(records).expect("generated table is consistent")
    }

    fn compute_heights(&mut self) {
        let mut by_len: Vec<Vec<LabeledMove>> = self.table.keys().cloned().collect();
        by_len.sort_by_key(|k| std::cmp::Reverse(k.len()));
        for k in by_len {
            let h = self.table[&k]
                .children
                .iter()
                .map(|c| {
                    let mut next = k.clone();
                    next.push(c.clone());
                    self.table[&next].height + 1
                })
                .max()
                .unwrap_or(0);
            self.table.get_mut(&k).expect("present").height = h;
        }
    }

    pub fn records(&self) -> Vec<ExplicitRecord> {
        self.table
            .iter()
            .map(|(k, e)| ExplicitRecord { position: Run(k.clone()), winner: e.winner, children: e.children.clone() })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<ExplicitGame, ExplicitError> {
        let file: ExplicitFile = serde_json::from_str(text).map_err(|e| ExplicitError::Syntax(e.to_string()))?;
        ExplicitGame::from_file(file)
    }

    fn from_file(file: ExplicitFile) -> Result<ExplicitGame, ExplicitError> {
        if file.format != FORMAT {
            return Err(ExplicitError::Format(file.format));
        }
        ExplicitGame::from_records(file.positions)
    }

    pub(crate) fn winner(&self, at: &[LabeledMove]) -> Option<Player> {
        self.table.get(at).map(|e| e.winner)
    }

    pub(crate) fn moves(&self, at: &[LabeledMove], p: Player) -> Vec<String> {
        self.table
            .get(at)
            .map(|e| e.children.iter().filter(|m| m.player == p).map(|m| m.mv.clone()).collect())
            .unwrap_or_default()
    }

    pub(crate) fn depth_from(&self, at: &[LabeledMove]) -> usize {
        self.table.get(at).map(|e| e.height).unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

impl Serialize for ExplicitGame {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ExplicitFile { format: FORMAT.to_string(), positions: self.records() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExplicitGame {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        ExplicitGame::from_file(ExplicitFile::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}
