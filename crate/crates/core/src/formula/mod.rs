//! Formula syntax: AST, concrete grammar, occurrences, substitution and the
//! classical oracles used for stability.

mod classical;
mod occurrence;
mod parse;
mod print;
mod sat;
mod subst;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use classical::{
    classical_fo_valid, classical_taut, elementarize, find_countermodel, is_stable, Budget, Countermodel, FoVerdict,
    Stability, StabilityCertificate,
};
pub use occurrence::{Occurrence, OccurrenceKind, OccurrencePath, Polarity};
pub use parse::{parse, ParseError, ParseErrorKind};
pub use print::pretty;
pub use subst::CaptureError;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(u32),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

/// Digit strings are constants; anything else must be an identifier.
impl std::str::FromStr for Term {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) {
            return match s.parse::<u32>() {
                Ok(c) if c > 0 => Ok(Term::Const(c)),
                _ => Err(format!("constant {s} out of range")),
            };
        }
        let mut chars = s.chars();
        match chars.next() {
            Some(c)
                if (c.is_ascii_alphabetic() || c == '_')
                    && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'') =>
            {
                Ok(Term::Var(s.to_string()))
            }
            _ => Err(format!("bad term {s:?}")),
        }
    }
}

impl serde::Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Term {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AtomKind {
    Elementary,
    General,
}

impl AtomKind {
    /// Lowercase-initial names are elementary, uppercase-initial names general.
    pub fn of_name(name: &str) -> AtomKind {
        if name.starts_with(|c: char| c.is_ascii_uppercase()) {
            AtomKind::General
        } else {
            AtomKind::Elementary
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub name: String,
    pub kind: AtomKind,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(name: impl Into<String>, args: Vec<Term>) -> Atom {
        let name = name.into();
        Atom { kind: AtomKind::of_name(&name), name, args }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    /// Parallel conjunction `/\`.
    PAnd,
    /// Parallel disjunction `\/`.
    POr,
    Implies,
    /// Choice conjunction `&`.
    CAnd,
    /// Choice disjunction `|`.
    COr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quant {
    BlindAll,
    BlindEx,
    ChoiceAll,
    ChoiceEx,
    ParAll,
    ParEx,
}

impl Quant {
    pub fn is_choice(self) -> bool {
        matches!(self, Quant::ChoiceAll | Quant::ChoiceEx)
    }

    pub fn is_blind(self) -> bool {
        matches!(self, Quant::BlindAll | Quant::BlindEx)
    }

    pub fn dual(self) -> Quant {
        match self {
            Quant::BlindAll => Quant::BlindEx,
            Quant::BlindEx => Quant::BlindAll,
            Quant::ChoiceAll => Quant::ChoiceEx,
            Quant::ChoiceEx => Quant::ChoiceAll,
            Quant::ParAll => Quant::ParEx,
            Quant::ParEx => Quant::ParAll,
        }
    }
}

/// Bounded recurrence operators; only the extended dialect admits them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rec {
    /// Branching recurrence `brc`.
    Branching,
    /// Branching corecurrence `bcr`.
    BranchingCo,
    /// Parallel recurrence `prc`.
    Parallel,
    /// Parallel corecurrence `pcr`.
    ParallelCo,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Bottom,
    Atom(Atom),
    Not(Box<Formula>),
    Bin(BinOp, Box<Formula>, Box<Formula>),
    Quant(Quant, String, Box<Formula>),
    Rec(Rec, Box<Formula>),
}

/// Serialized as formula text.
impl serde::Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = <String as serde::Deserialize>::deserialize(d)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse(s)
    }
}

pub fn atom(name: &str, args: &[Term]) -> Formula {
    Formula::Atom(Atom::new(name, args.to_vec()))
}

pub fn var(name: &str) -> Term {
    Term::Var(name.to_string())
}

pub fn not(f: Formula) -> Formula {
    Formula::Not(Box::new(f))
}

pub fn bin(op: BinOp, a: Formula, b: Formula) -> Formula {
    Formula::Bin(op, Box::new(a), Box::new(b))
}

pub fn quant(q: Quant, x: &str, body: Formula) -> Formula {
    Formula::Quant(q, x.to_string(), Box::new(body))
}

impl Formula {
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Top | Formula::Bottom | Formula::Atom(_) => vec![],
            Formula::Not(a) | Formula::Quant(_, _, a) | Formula::Rec(_, a) => vec![a],
            Formula::Bin(_, a, b) => vec![a, b],
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Number of choice connectives and choice quantifiers.
    pub fn choice_count(&self) -> usize {
        let own = match self {
            Formula::Bin(BinOp::CAnd | BinOp::COr, ..) => 1,
            Formula::Quant(q, ..) if q.is_choice() => 1,
            _ => 0,
        };
        own + self.children().iter().map(|c| c.choice_count()).sum::<usize>()
    }

    /// Number of general atom occurrences.
    pub fn general_count(&self) -> usize {
        match self {
            Formula::Atom(a) if a.kind == AtomKind::General => 1,
            _ => self.children().iter().map(|c| c.general_count()).sum(),
        }
    }

    pub fn is_elementary(&self) -> bool {
        match self {
            Formula::Top | Formula::Bottom => true,
            Formula::Atom(a) => a.kind == AtomKind::Elementary,
            Formula::Bin(BinOp::CAnd | BinOp::COr, ..) => false,
            Formula::Quant(q, _, body) => !q.is_choice() && body.is_elementary(),
            Formula::Rec(..) => false,
            Formula::Not(a) => a.is_elementary(),
            Formula::Bin(_, a, b) => a.is_elementary() && b.is_elementary(),
        }
    }

    pub fn has_blind(&self) -> bool {
        match self {
            Formula::Quant(q, _, body) => q.is_blind() || body.has_blind(),
            _ => self.children().iter().any(|c| c.has_blind()),
        }
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Formula::Atom(a) => out.push(a),
            _ => self.children().into_iter().for_each(|c| c.collect_atoms(out)),
        }
    }

    /// Atom symbols as (name, arity) pairs.
    pub fn symbols(&self) -> BTreeSet<(String, usize)> {
        self.atoms().into_iter().map(|a| (a.name.clone(), a.arity())).collect()
    }

    pub fn symbol_names(&self) -> BTreeSet<String> {
        self.atoms().into_iter().map(|a| a.name.clone()).collect()
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(a) => {
                for t in &a.args {
                    if let Term::Var(v) = t {
                        if !bound.contains(v) {
                            out.insert(v.clone());
                        }
                    }
                }
            }
            Formula::Quant(_, x, body) => {
                bound.push(x.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            _ => self.children().into_iter().for_each(|c| c.collect_free(bound, out)),
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Atom(a) => a.args.iter().for_each(|t| {
                if let Term::Var(v) = t {
                    out.insert(v.clone());
                }
            }),
            Formula::Quant(_, x, _) => {
                out.insert(x.clone());
            }
            _ => {}
        });
        out
    }

    pub fn constants(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        for a in self.atoms() {
            for t in &a.args {
                if let Term::Const(c) = t {
                    out.insert(*c);
                }
            }
        }
        out
    }

    pub fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Rebuilds the tree bottom-up through `f`.
    pub fn map_atoms(&self, f: &mut impl FnMut(&Atom) -> Formula) -> Formula {
        match self {
            Formula::Top | Formula::Bottom => self.clone(),
            Formula::Atom(a) => f(a),
            Formula::Not(a) => not(a.map_atoms(f)),
            Formula::Bin(op, a, b) => bin(*op, a.map_atoms(f), b.map_atoms(f)),
            Formula::Quant(q, x, a) => Formula::Quant(*q, x.clone(), Box::new(a.map_atoms(f))),
            Formula::Rec(r, a) => Formula::Rec(*r, Box::new(a.map_atoms(f))),
        }
    }

    /// Rewrites `A -> B` as `~A \/ B` and removes double negations.
    pub fn normalize_implications(&self) -> Formula {
        match self {
            Formula::Bin(BinOp::Implies, a, b) => {
                bin(BinOp::POr, not(a.normalize_implications()).strip_double_neg(), b.normalize_implications())
            }
            Formula::Not(a) => not(a.normalize_implications()).strip_double_neg(),
            Formula::Bin(op, a, b) => bin(*op, a.normalize_implications(), b.normalize_implications()),
            Formula::Quant(q, x, a) => Formula::Quant(*q, x.clone(), Box::new(a.normalize_implications())),
            Formula::Rec(r, a) => Formula::Rec(*r, Box::new(a.normalize_implications())),
            _ => self.clone(),
        }
    }

    fn strip_double_neg(self) -> Formula {
        match self {
            Formula::Not(inner) => match *inner {
                Formula::Not(x) => *x,
                other => not(other),
            },
            other => other,
        }
    }

    /// Arity consistency: a name must be used with one arity throughout.
    pub fn arity_table(&self) -> Result<BTreeMap<String, usize>, String> {
        let mut table = BTreeMap::new();
        for a in self.atoms() {
            if let Some(&n) = table.get(&a.name) {
                if n != a.arity() {
                    return Err(a.name.clone());
                }
            } else {
                table.insert(a.name.clone(), a.arity());
            }
        }
        Ok(table)
    }
}

/// Fragment a formula belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dialect {
    Cl1,
    Cl2,
    Cl4,
    Extended,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("not a {dialect:?} formula: {reason}")]
pub struct DialectError {
    pub dialect: Dialect,
    pub reason: String,
}

impl Dialect {
    pub fn check(self, f: &Formula) -> Result<(), DialectError> {
        let fail = |reason: String| Err(DialectError { dialect: self, reason });
        if let Err(name) = f.arity_table() {
            return fail(format!("symbol {name} used with two arities"));
        }
        let mut problem = None;
        f.visit(&mut |g| {
            if problem.is_some() {
                return;
            }
            match (self, g) {
                (Dialect::Extended, _) => {}
                (_, Formula::Rec(..)) => problem = Some("recurrence operator".to_string()),
                (Dialect::Cl1 | Dialect::Cl2, Formula::Quant(..)) => problem = Some("quantifier".to_string()),
                (Dialect::Cl4, Formula::Quant(Quant::ParAll | Quant::ParEx, ..)) => {
                    problem = Some("parallel quantifier".to_string())
                }
                (Dialect::Cl1 | Dialect::Cl2, Formula::Atom(a)) if a.arity() > 0 => {
                    problem = Some(format!("{}-ary atom {}", a.arity(), a.name))
                }
                (Dialect::Cl1, Formula::Atom(a)) if a.kind == AtomKind::General => {
                    problem = Some(format!("general atom {}", a.name))
                }
                _ => {}
            }
        });
        match problem {
            Some(p) => fail(p),
            None => Ok(()),
        }
    }

    /// Smallest prover dialect containing `f`.
    pub fn of(f: &Formula) -> Dialect {
        [Dialect::Cl1, Dialect::Cl2, Dialect::Cl4].into_iter().find(|d| d.check(f).is_ok()).unwrap_or(Dialect::Extended)
    }
}

impl std::str::FromStr for Dialect {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "cl1" => Ok(Dialect::Cl1),
            "cl2" => Ok(Dialect::Cl2),
            "cl4" => Ok(Dialect::Cl4),
            "extended" => Ok(Dialect::Extended),
            other => Err(format!("unknown dialect {other}")),
        }
    }
}

/// Smallest `prefix<n>` name not among `taken`.
pub fn fresh_name(prefix: &str, taken: &BTreeSet<String>) -> String {
    (1..).map(|i| format!("{prefix}{i}")).find(|n| !taken.contains(n)).expect("unbounded supply")
}
