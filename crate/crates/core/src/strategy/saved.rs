//! Agent files: a JSON description of an agent that can be rebuilt.

use serde::{Deserialize, Serialize};

use crate::proof::Proof;

use super::{compose_mp, extract, Agent, Copycat, ExtractError, Fixed, Idle};

const FORMAT: &str = "clwork-agent/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AgentSpec {
    Idle,
    Fixed {
        moves: Vec<String>,
    },
    Copycat {
        pairs: Vec<(String, String)>,
    },
    /// The strategy extracted from a proof.
    Proof {
        proof: Proof,
    },
    /// `compose_mp(left, right)`; `right` plays `left`'s game `->` the target.
    Compose {
        left: Box<AgentSpec>,
        right: Box<AgentSpec>,
    },
}

#[derive(Serialize, Deserialize)]
struct AgentFile {
    format: String,
    #[serde(flatten)]
    agent: AgentSpec,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AgentFileError {
    #[error("unsupported format tag {0:?}")]
    Format(String),
    #[error("malformed agent file: {0}")]
    Syntax(String),
    #[error(transparent)]
    Extract(#[from] ExtractError),
}

impl AgentSpec {
    pub fn build(&self) -> Result<Box<dyn Agent>, AgentFileError> {
        Ok(match self {
            AgentSpec::Idle => Box::new(Idle),
            AgentSpec::Fixed { moves } => {
                let moves: Vec<&str> = moves.iter().map(String::as_str).collect();
                Box::new(Fixed::new(&moves))
            }
            AgentSpec::Copycat { pairs } => {
                let pairs: Vec<(&str, &str)> = pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
                Box::new(Copycat::new(&pairs))
            }
            AgentSpec::Proof { proof } => Box::new(extract(proof)?),
            AgentSpec::Compose { left, right } => Box::new(compose_mp(left.build()?, right.build()?)),
        })
    }

    pub fn to_json(&self) -> String {
        let file = AgentFile { format: FORMAT.into(), agent: self.clone() };
        serde_json::to_string_pretty(&file).expect("agent file serializes")
    }

    pub fn from_json(text: &str) -> Result<AgentSpec, AgentFileError> {
        let file: AgentFile = serde_json::from_str(text).map_err(|e| AgentFileError::Syntax(e.to_string()))?;
        if file.format != FORMAT {
            return Err(AgentFileError::Format(file.format));
        }
        Ok(file.agent)
    }
}
