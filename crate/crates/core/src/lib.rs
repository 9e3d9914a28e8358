//! Computability-logic workbench.
//!
//! Formulas denote games between a machine (`T`) and its environment (`B`).
//! This crate builds those games over a finite universe of constants, decides
//! provability in CL1, CL2 and CL4, extracts winning strategies from proofs and
//! runs them on a hard-play machine simulator.

pub mod formula;
pub mod game;
pub mod hpm;
pub mod proof;
pub mod semantics;
pub mod service;
pub mod strategy;
