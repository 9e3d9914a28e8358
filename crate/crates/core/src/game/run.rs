use std::fmt;
use std::ops::{Deref, DerefMut};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    /// `T`, the machine.
    Machine,
    /// `B`, the environment.
    Environment,
}

impl Player {
    pub fn flip(self) -> Player {
        match self {
            Player::Machine => Player::Environment,
            Player::Environment => Player::Machine,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Player::Machine => 'T',
            Player::Environment => 'B',
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledMove {
    pub player: Player,
    pub mv: String,
}

impl LabeledMove {
    pub fn new(player: Player, mv: impl Into<String>) -> LabeledMove {
        LabeledMove { player, mv: mv.into() }
    }

    pub fn machine(mv: impl Into<String>) -> LabeledMove {
        LabeledMove::new(Player::Machine, mv)
    }

    pub fn env(mv: impl Into<String>) -> LabeledMove {
        LabeledMove::new(Player::Environment, mv)
    }

    /// Same move with the label swapped.
    pub fn flipped(&self) -> LabeledMove {
        LabeledMove::new(self.player.flip(), self.mv.clone())
    }
}

impl fmt::Display for LabeledMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.player, self.mv)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("bad run token {token:?} (expected T:<move> or B:<move>)")]
pub struct RunParseError {
    pub token: String,
}

impl FromStr for LabeledMove {
    type Err = RunParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || RunParseError { token: s.to_string() };
        let (label, mv) = s.split_once(':').ok_or_else(bad)?;
        let player = match label {
            "T" | "⊤" => Player::Machine,
            "B" | "⊥" => Player::Environment,
            _ => return Err(bad()),
        };
        if mv.is_empty() || mv.chars().any(char::is_whitespace) {
            return Err(bad());
        }
        Ok(LabeledMove::new(player, mv))
    }
}

impl Serialize for LabeledMove {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LabeledMove {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// A finite run; illegal runs are representable.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Run(pub Vec<LabeledMove>);

impl Deref for Run {
    type Target = Vec<LabeledMove>;
    fn deref(&self) -> &Vec<LabeledMove> {
        &self.0
    }
}

impl DerefMut for Run {
    fn deref_mut(&mut self) -> &mut Vec<LabeledMove> {
        &mut self.0
    }
}

impl From<Vec<LabeledMove>> for Run {
    fn from(v: Vec<LabeledMove>) -> Run {
        Run(v)
    }
}

/// Whitespace-separated `T:<move>` and `B:<move>` tokens.
impl fmt::Display for Run {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

impl FromStr for Run {
    type Err = RunParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split_whitespace().map(str::parse).collect::<Result<Vec<_>, _>>().map(Run)
    }
}

impl Serialize for Run {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Run {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}
