use std::fmt;
use std::str::FromStr;

use super::{AtomKind, BinOp, Formula, Quant};

/// Child selectors from the root: 1 or 2 below a binary node, 0 below a unary
/// node or binder.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccurrencePath(pub Vec<u8>);

impl OccurrencePath {
    pub fn root() -> Self {
        OccurrencePath(Vec::new())
    }

    pub fn child(&self, step: u8) -> Self {
        let mut v = self.0.clone();
        v.push(step);
        OccurrencePath(v)
    }

    pub fn is_prefix_of(&self, other: &OccurrencePath) -> bool {
        other.0.starts_with(&self.0)
    }
}

/// Dotted steps, with `.` alone for the root.
impl fmt::Display for OccurrencePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str(".");
        }
        let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

impl FromStr for OccurrencePath {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s == "." || s.is_empty() {
            return Ok(OccurrencePath::root());
        }
        s.split('.')
            .map(|p| match p {
                "0" => Ok(0),
                "1" => Ok(1),
                "2" => Ok(2),
                other => Err(format!("bad path step {other:?}")),
            })
            .collect::<Result<Vec<u8>, String>>()
            .map(OccurrencePath)
    }
}

impl serde::Serialize for OccurrencePath {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for OccurrencePath {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum OccurrenceKind {
    CAnd,
    COr,
    ChoiceAll,
    ChoiceEx,
    General(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Occurrence {
    pub path: OccurrencePath,
    pub kind: OccurrenceKind,
    pub polarity: Polarity,
}

impl Occurrence {
    /// Choice points where the environment moves: positive `&`/`!x`, negative `|`/`?x`.
    pub fn is_environment_choice(&self) -> bool {
        matches!(
            (&self.kind, self.polarity),
            (OccurrenceKind::CAnd | OccurrenceKind::ChoiceAll, Polarity::Positive)
                | (OccurrenceKind::COr | OccurrenceKind::ChoiceEx, Polarity::Negative)
        )
    }

    /// Choice points where the machine moves.
    pub fn is_machine_choice(&self) -> bool {
        !matches!(self.kind, OccurrenceKind::General(_)) && !self.is_environment_choice()
    }
}

impl Formula {
    pub fn at(&self, path: &OccurrencePath) -> Option<&Formula> {
        let mut cur = self;
        for &step in &path.0 {
            cur = match (cur, step) {
                (Formula::Not(a) | Formula::Quant(_, _, a) | Formula::Rec(_, a), 0) => a,
                (Formula::Bin(_, a, _), 1) => a,
                (Formula::Bin(_, _, b), 2) => b,
                _ => return None,
            };
        }
        Some(cur)
    }

    /// Replaces the subformula at `path`; `None` if the path does not resolve.
    pub fn replace_at(&self, path: &OccurrencePath, new: Formula) -> Option<Formula> {
        fn go(f: &Formula, steps: &[u8], new: Formula) -> Option<Formula> {
            let Some((&s, rest)) = steps.split_first() else {
                return Some(new);
            };
            Some(match (f, s) {
                (Formula::Not(a), 0) => Formula::Not(Box::new(go(a, rest, new)?)),
                (Formula::Quant(q, x, a), 0) => Formula::Quant(*q, x.clone(), Box::new(go(a, rest, new)?)),
                (Formula::Rec(r, a), 0) => Formula::Rec(*r, Box::new(go(a, rest, new)?)),
                (Formula::Bin(op, a, b), 1) => Formula::Bin(*op, Box::new(go(a, rest, new)?), b.clone()),
                (Formula::Bin(op, a, b), 2) => Formula::Bin(*op, a.clone(), Box::new(go(b, rest, new)?)),
                _ => return None,
            })
        }
        go(self, &path.0, new)
    }

    /// Polarity of the occurrence at `path`, reading `A -> B` as `~A \/ B`.
    pub fn polarity_at(&self, path: &OccurrencePath) -> Option<Polarity> {
        let mut pol = Polarity::Positive;
        let mut cur = self;
        for &step in &path.0 {
            match (cur, step) {
                (Formula::Not(_), 0) => pol = pol.flip(),
                (Formula::Bin(BinOp::Implies, ..), 1) => pol = pol.flip(),
                _ => {}
            }
            cur = cur.at(&OccurrencePath(vec![step]))?;
        }
        Some(pol)
    }

    /// True when no choice operator lies strictly above `path`.
    pub fn is_surface(&self, path: &OccurrencePath) -> bool {
        let mut cur = self;
        for &step in &path.0 {
            match cur {
                Formula::Bin(BinOp::CAnd | BinOp::COr, ..) => return false,
                Formula::Quant(q, ..) if q.is_choice() => return false,
                _ => {}
            }
            match cur.at(&OccurrencePath(vec![step])) {
                Some(next) => cur = next,
                None => return false,
            }
        }
        true
    }

    /// Binders of the variables bound at `path`, innermost last.
    pub fn binders_above(&self, path: &OccurrencePath) -> Vec<(OccurrencePath, Quant, String)> {
        let mut out = Vec::new();
        let mut cur = self;
        let mut here = OccurrencePath::root();
        for &step in &path.0 {
            if let Formula::Quant(q, x, _) = cur {
                out.push((here.clone(), *q, x.clone()));
            }
            match cur.at(&OccurrencePath(vec![step])) {
                Some(next) => cur = next,
                None => break,
            }
            here = here.child(step);
        }
        out
    }

    /// Surface choice operators and surface general atoms, in pre-order.
    pub fn surface_occurrences(&self) -> Vec<Occurrence> {
        fn go(f: &Formula, path: OccurrencePath, pol: Polarity, out: &mut Vec<Occurrence>) {
            let kind = match f {
                Formula::Bin(BinOp::CAnd, ..) => Some(OccurrenceKind::CAnd),
                Formula::Bin(BinOp::COr, ..) => Some(OccurrenceKind::COr),
                Formula::Quant(Quant::ChoiceAll, ..) => Some(OccurrenceKind::ChoiceAll),
                Formula::Quant(Quant::ChoiceEx, ..) => Some(OccurrenceKind::ChoiceEx),
                Formula::Atom(a) if a.kind == AtomKind::General => Some(OccurrenceKind::General(a.name.clone())),
                _ => None,
            };
            if let Some(kind) = kind {
                out.push(Occurrence { path, kind, polarity: pol });
                return;
            }
            match f {
                Formula::Not(a) => go(a, path.child(0), pol.flip(), out),
                Formula::Quant(_, _, a) | Formula::Rec(_, a) => go(a, path.child(0), pol, out),
                Formula::Bin(op, a, b) => {
                    let left = if *op == BinOp::Implies { pol.flip() } else { pol };
                    go(a, path.child(1), left, out);
                    go(b, path.child(2), pol, out);
                }
                _ => {}
            }
        }
        let mut out = Vec::new();
        go(self, OccurrencePath::root(), Polarity::Positive, &mut out);
        out
    }
}
