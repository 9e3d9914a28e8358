//! Proof objects for CL1, CL2 and CL4, the rule checker, and backward provers.
//!
//! A proof is a list of nodes in which every premise precedes the node that
//! uses it; the last node concludes the theorem. The checker is the only
//! authority on correctness and every prover result goes through it.

mod check;
mod search;
#[cfg(test)]
mod tests;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::formula::{Dialect, Formula, OccurrencePath, StabilityCertificate, Term};

pub(crate) use check::complete_cover;
pub use check::{check_proof, Checked, ProofError, Reason};
pub use search::{decide_cl4_blindfree, measure, prove, prove_cl1, prove_cl2, prove_cl4, ProveError, Verdict};

/// Which required premise of a Rule (A) node a cover entry discharges.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pick {
    /// Component `1` or `2` of a choice connective.
    Branch(u8),
    /// The fresh variable substituted into a choice quantifier body.
    Fresh(String),
}

/// A required Rule (A) premise: the occurrence, what replaced it, and the
/// node proving the result.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cover {
    pub path: OccurrencePath,
    #[serde(flatten)]
    pub pick: Pick,
    pub premise: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "data")]
pub enum Step {
    /// Stability plus the premises demanded by environment choice points.
    /// An empty cover list lets the checker locate the premises itself.
    #[serde(alias = "a")]
    A {
        certificate: StabilityCertificate,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        cover: Vec<Cover>,
    },
    /// A machine choice connective resolved to one component.
    #[serde(alias = "b")]
    B1 { path: OccurrencePath, branch: u8 },
    /// A machine choice quantifier instantiated by a term.
    B2 { path: OccurrencePath, term: Term },
    /// A positive and a negative general atom of one letter replaced by a
    /// fresh elementary letter.
    #[serde(alias = "c")]
    C { positive: OccurrencePath, negative: OccurrencePath, fresh: String },
}

impl Step {
    /// Rule name as written for `dialect`: lowercase letters for the
    /// propositional systems.
    pub fn label(&self, dialect: Dialect) -> &'static str {
        let upper = matches!(dialect, Dialect::Cl4 | Dialect::Extended);
        match (self, upper) {
            (Step::A { .. }, true) => "A",
            (Step::A { .. }, false) => "a",
            (Step::B1 { .. }, true) => "B1",
            (Step::B1 { .. }, false) => "b",
            (Step::B2 { .. }, _) => "B2",
            (Step::C { .. }, true) => "C",
            (Step::C { .. }, false) => "c",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofNode {
    pub id: usize,
    pub formula: Formula,
    #[serde(flatten)]
    pub step: Step,
    #[serde(default)]
    pub premises: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proof {
    pub dialect: Dialect,
    pub nodes: Vec<ProofNode>,
}

const FORMAT: &str = "clwork-proof/1";

#[derive(Serialize, Deserialize)]
struct ProofFile {
    format: String,
    dialect: Dialect,
    nodes: Vec<ProofNode>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ProofFileError {
    #[error("unsupported format tag {0:?}")]
    Format(String),
    #[error("malformed proof file: {0}")]
    Syntax(String),
}

impl Serialize for Proof {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ProofFile { format: FORMAT.into(), dialect: self.dialect, nodes: self.nodes.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Proof {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let file = ProofFile::deserialize(d)?;
        if file.format != FORMAT {
            return Err(serde::de::Error::custom(ProofFileError::Format(file.format)));
        }
        Ok(Proof { dialect: file.dialect, nodes: file.nodes })
    }
}

impl Proof {
    pub fn theorem(&self) -> Option<&Formula> {
        self.nodes.last().map(|n| &n.formula)
    }

    pub fn node(&self, id: usize) -> Option<&ProofNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("proof serializes")
    }

    pub fn from_json(text: &str) -> Result<Proof, ProofFileError> {
        let file: ProofFile = serde_json::from_str(text).map_err(|e| ProofFileError::Syntax(e.to_string()))?;
        if file.format != FORMAT {
            return Err(ProofFileError::Format(file.format));
        }
        Ok(Proof { dialect: file.dialect, nodes: file.nodes })
    }

    /// One line per node: `n. formula  (from premises by Rule (x))`, where
    /// Rule (A) premises print as a set and other premises as a number.
    pub fn table(&self) -> Vec<(String, String)> {
        self.nodes
            .iter()
            .map(|n| {
                let ids: Vec<String> = n.premises.iter().map(|p| p.to_string()).collect();
                let from = match n.step {
                    Step::A { .. } => format!("{{{}}}", ids.join(",")),
                    _ => ids.join(","),
                };
                let reason = format!("(from {from} by Rule ({}))", n.step.label(self.dialect));
                (format!("{}. {}", n.id, n.formula), reason)
            })
            .collect()
    }
}

impl fmt::Display for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = self.table();
        let width = rows.iter().map(|(l, _)| l.chars().count()).max().unwrap_or(0);
        for (left, right) in rows {
            writeln!(f, "{left:<width$}  {right}")?;
        }
        Ok(())
    }
}
