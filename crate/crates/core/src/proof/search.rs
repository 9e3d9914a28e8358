//! Backward proof search. Every rule read backwards strictly lowers
//! [`measure`], so the search space is finite; goals are memoized by formula.

use std::collections::{BTreeSet, HashMap};

use crate::formula::{
    fresh_name, is_stable, Budget, Dialect, DialectError, Formula, OccurrenceKind, OccurrencePath, Polarity, Stability,
    Term,
};

use super::check::{check_proof, replace_pair, usable_elementary, ProofError};
use super::{Cover, Pick, Proof, ProofNode, Step};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Proved(Proof),
    NotProvable,
    /// The goal budget ran out, or some stability question stayed open.
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ProveError {
    #[error(transparent)]
    Dialect(#[from] DialectError),
    #[error("the formula contains blind quantifiers")]
    Blind,
    #[error("recurrence operators have no proof system")]
    Extended,
    #[error("internal error: the checker rejected a found proof: {0:?}")]
    Rejected(Vec<ProofError>),
}

/// `(general atoms, choice operators, size)`; compared lexicographically.
pub fn measure(f: &Formula) -> (usize, usize, usize) {
    (f.general_count(), f.choice_count(), f.size())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Proved(usize),
    Refuted,
    Unknown,
}

struct Search {
    dialect: Dialect,
    budget: Budget,
    memo: HashMap<Formula, Status>,
    arena: Vec<(Formula, Step, Vec<usize>)>,
    goals: usize,
    exhausted: bool,
}

const FRESH_VARS: [&str; 4] = ["z", "w", "v", "u"];

fn fresh_var(taken: &BTreeSet<String>) -> String {
    FRESH_VARS.iter().find(|v| !taken.contains(**v)).map(|v| v.to_string()).unwrap_or_else(|| fresh_name("z", taken))
}

fn fresh_letter(general: &str, taken: &BTreeSet<String>) -> String {
    let lower = general.to_lowercase();
    if usable_elementary(&lower) && !taken.contains(&lower) {
        lower
    } else {
        fresh_name(if usable_elementary(&lower) { &lower } else { "q" }, taken)
    }
}

/// Premises Rule (A) demands of `f`, in surface order.
fn required(f: &Formula) -> Vec<(OccurrencePath, Pick, Formula)> {
    let taken = f.all_vars();
    let mut out = Vec::new();
    for occ in f.surface_occurrences().into_iter().filter(|o| o.is_environment_choice()) {
        match f.at(&occ.path).expect("occurrence resolves") {
            Formula::Bin(_, a, b) => {
                for (i, g) in [(1u8, a), (2, b)] {
                    let h = f.replace_at(&occ.path, (**g).clone()).expect("path resolves");
                    out.push((occ.path.clone(), Pick::Branch(i), h));
                }
            }
            Formula::Quant(_, x, g) => {
                let y = fresh_var(&taken);
                let inst = g.substitute(x, &Term::Var(y.clone())).expect("fresh variable is never captured");
                let h = f.replace_at(&occ.path, inst).expect("path resolves");
                out.push((occ.path, Pick::Fresh(y), h));
            }
            _ => unreachable!("environment choices are choice operators"),
        }
    }
    out
}

/// Terms tried for Rule (B2): free variables, constants, and the smallest
/// constant not in `f`.
fn term_pool(f: &Formula) -> Vec<Term> {
    let consts = f.constants();
    let mut pool: Vec<Term> = f.free_vars().into_iter().map(Term::Var).collect();
    pool.extend(consts.iter().map(|c| Term::Const(*c)));
    let unused = (1..).find(|c| !consts.contains(c)).expect("finitely many constants");
    pool.push(Term::Const(unused));
    pool
}

/// Single-premise rules applicable to `f` in `dialect`, with their premises.
fn single_premise_steps(f: &Formula, dialect: Dialect) -> Vec<(Step, Formula)> {
    let occs = f.surface_occurrences();
    let mut out = Vec::new();
    for occ in occs.iter().filter(|o| o.is_machine_choice()) {
        match (f.at(&occ.path).expect("occurrence resolves"), &occ.kind) {
            (Formula::Bin(_, a, b), _) => {
                for (i, g) in [(1u8, a), (2, b)] {
                    let h = f.replace_at(&occ.path, (**g).clone()).expect("path resolves");
                    out.push((Step::B1 { path: occ.path.clone(), branch: i }, h));
                }
            }
            (Formula::Quant(_, x, g), _) if dialect == Dialect::Cl4 => {
                let above = f.binders_above(&occ.path);
                for t in term_pool(f) {
                    if let Term::Var(v) = &t {
                        if above.iter().any(|(_, _, y)| y == v) {
                            continue;
                        }
                    }
                    let Ok(inst) = g.substitute(x, &t) else { continue };
                    let h = f.replace_at(&occ.path, inst).expect("path resolves");
                    out.push((Step::B2 { path: occ.path.clone(), term: t }, h));
                }
            }
            _ => {}
        }
    }
    if dialect != Dialect::Cl1 {
        let names = f.symbol_names();
        let general = |pol: Polarity| {
            occs.iter().filter(move |o| o.polarity == pol && matches!(o.kind, OccurrenceKind::General(_)))
        };
        for pos in general(Polarity::Positive) {
            for neg in general(Polarity::Negative).filter(|n| n.kind == pos.kind) {
                let (Some(Formula::Atom(pa)), Some(Formula::Atom(na))) = (f.at(&pos.path), f.at(&neg.path)) else {
                    continue;
                };
                let fresh = fresh_letter(&pa.name, &names);
                let h = replace_pair(f, &pos.path, pa, &neg.path, na, &fresh).expect("paths resolve");
                out.push((Step::C { positive: pos.path.clone(), negative: neg.path.clone(), fresh }, h));
            }
        }
    }
    out
}

impl Search {
    fn new(dialect: Dialect, budget: Budget) -> Search {
        Search { dialect, budget, memo: HashMap::new(), arena: Vec::new(), goals: 0, exhausted: false }
    }

    fn add(&mut self, f: &Formula, step: Step, premises: Vec<usize>) -> Status {
        self.arena.push((f.clone(), step, premises));
        let s = Status::Proved(self.arena.len() - 1);
        self.memo.insert(f.clone(), s);
        s
    }

    fn goal(&mut self, f: &Formula) -> Status {
        if let Some(&s) = self.memo.get(f) {
            return s;
        }
        if self.goals >= self.budget.max_goals {
            self.exhausted = true;
            return Status::Unknown;
        }
        self.goals += 1;
        let mut open = false;
        match is_stable(f, &self.budget) {
            Stability::Stable(certificate) => {
                let mut cover = Vec::new();
                let mut status = Status::Proved(0);
                for (path, pick, h) in required(f) {
                    debug_assert!(measure(&h) < measure(f));
                    match self.goal(&h) {
                        Status::Proved(i) => cover.push(Cover { path, pick, premise: i }),
                        Status::Refuted => {
                            status = Status::Refuted;
                            break;
                        }
                        Status::Unknown => status = Status::Unknown,
                    }
                }
                match status {
                    Status::Proved(_) => {
                        let mut premises: Vec<usize> = cover.iter().map(|c| c.premise).collect();
                        premises.sort_unstable();
                        premises.dedup();
                        return self.add(f, Step::A { certificate, cover }, premises);
                    }
                    Status::Unknown => open = true,
                    Status::Refuted => {}
                }
            }
            Stability::Instable => {}
            Stability::Unknown => open = true,
        }
        for (step, h) in single_premise_steps(f, self.dialect) {
            debug_assert!(measure(&h) < measure(f));
            match self.goal(&h) {
                Status::Proved(i) => return self.add(f, step, vec![i]),
                Status::Unknown => open = true,
                Status::Refuted => {}
            }
        }
        let status = if open { Status::Unknown } else { Status::Refuted };
        if !self.exhausted {
            self.memo.insert(f.clone(), status);
        }
        status
    }

    /// The nodes reachable from `root`, renumbered from 1 in arena order.
    fn extract(&self, root: usize) -> Proof {
        let mut keep = vec![false; self.arena.len()];
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            if !keep[i] {
                keep[i] = true;
                stack.extend(self.arena[i].2.iter().copied());
            }
        }
        let mut ids = vec![0; self.arena.len()];
        let mut nodes = Vec::new();
        for (i, (f, step, premises)) in self.arena.iter().enumerate() {
            if !keep[i] {
                continue;
            }
            ids[i] = nodes.len() + 1;
            let mut step = step.clone();
            if let Step::A { cover, .. } = &mut step {
                for c in cover.iter_mut() {
                    c.premise = ids[c.premise];
                }
            }
            let premises = premises.iter().map(|p| ids[*p]).collect();
            nodes.push(ProofNode { id: ids[i], formula: f.clone(), step, premises });
        }
        Proof { dialect: self.dialect, nodes }
    }
}

/// Backward search in `dialect` within `budget.max_goals` expanded goals.
pub fn prove(f: &Formula, dialect: Dialect, budget: &Budget) -> Result<Verdict, ProveError> {
    if dialect == Dialect::Extended {
        return Err(ProveError::Extended);
    }
    dialect.check(f)?;
    let mut search = Search::new(dialect, *budget);
    match search.goal(f) {
        Status::Proved(root) => {
            let proof = search.extract(root);
            check_proof(&proof).map_err(ProveError::Rejected)?;
            Ok(Verdict::Proved(proof))
        }
        Status::Refuted => Ok(Verdict::NotProvable),
        Status::Unknown => Ok(Verdict::Unknown),
    }
}

fn decide(f: &Formula, dialect: Dialect) -> Result<Option<Proof>, ProveError> {
    let budget = Budget { max_goals: usize::MAX, ..Budget::default() };
    match prove(f, dialect, &budget)? {
        Verdict::Proved(p) => Ok(Some(p)),
        Verdict::NotProvable => Ok(None),
        Verdict::Unknown => unreachable!("propositional stability is decided exactly and goals are unbounded"),
    }
}

/// Complete decision procedure for CL1.
pub fn prove_cl1(f: &Formula) -> Result<Option<Proof>, ProveError> {
    decide(f, Dialect::Cl1)
}

/// Complete decision procedure for CL2.
pub fn prove_cl2(f: &Formula) -> Result<Option<Proof>, ProveError> {
    decide(f, Dialect::Cl2)
}

/// Decision procedure for CL4 formulas without blind quantifiers. Rule (B2)
/// ranges over the free variables and constants of the goal plus one new
/// constant.
pub fn decide_cl4_blindfree(f: &Formula) -> Result<Option<Proof>, ProveError> {
    if f.has_blind() {
        return Err(ProveError::Blind);
    }
    decide(f, Dialect::Cl4)
}

/// Budgeted CL4 search. `NotProvable` only when every stability question
/// was settled and the search space closed.
pub fn prove_cl4(f: &Formula, budget: &Budget) -> Result<Verdict, ProveError> {
    prove(f, Dialect::Cl4, budget)
}
