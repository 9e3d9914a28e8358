//! Modus ponens on strategies: from an agent for `A` and one for `A -> B`,
//! an agent for `B`.

use std::collections::VecDeque;

use crate::game::Valuation;

use super::Agent;

/// Bound on internal exchanges per poll; legal play in a finite game never
/// comes near it.
const SETTLE_LIMIT: usize = 10_000;

/// Plays `B` by running `n` on `A -> B` against the real environment in
/// the consequent and against `m` in the antecedent.
#[derive(Clone)]
pub struct Composite {
    m: Box<dyn Agent>,
    n: Box<dyn Agent>,
    outbox: VecDeque<String>,
}

pub fn compose_mp(m: Box<dyn Agent>, n: Box<dyn Agent>) -> Composite {
    Composite { m, n, outbox: VecDeque::new() }
}

impl Composite {
    /// Exchanges moves between the two agents until both wait, or for at
    /// most `SETTLE_LIMIT` exchanges.
    fn settle(&mut self) {
        for _ in 0..SETTLE_LIMIT {
            let from_n = self.n.poll();
            let from_m = self.m.poll();
            if from_n.is_empty() && from_m.is_empty() {
                return;
            }
            for mv in from_n {
                if let Some(rest) = mv.strip_prefix("2.") {
                    self.outbox.push_back(rest.to_string());
                } else if let Some(rest) = mv.strip_prefix("1.") {
                    self.m.observe(rest);
                }
            }
            for mv in from_m {
                self.n.observe(&format!("1.{mv}"));
            }
        }
    }
}

impl Agent for Composite {
    fn begin(&mut self, e: &Valuation) {
        self.m.begin(e);
        self.n.begin(e);
        self.outbox.clear();
    }

    fn observe(&mut self, mv: &str) {
        self.n.observe(&format!("2.{mv}"));
    }

    fn poll(&mut self) -> Vec<String> {
        self.settle();
        self.outbox.drain(..).collect()
    }

    fn clone_box(&self) -> Box<dyn Agent> {
        Box::new(self.clone())
    }
}
