use std::collections::HashMap;

use serde::Serialize;

use crate::formula::{
    is_stable, Atom, AtomKind, BinOp, Budget, CaptureError, Dialect, Formula, OccurrencePath, Polarity, Quant,
    Stability, StabilityCertificate, Term,
};

use super::{Cover, Pick, Proof, ProofNode, Step};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Reason {
    #[error("the proof has no nodes")]
    Empty,
    #[error("id {0} is used twice")]
    DuplicateId(usize),
    #[error("premise {0} is not an earlier node")]
    UnknownPremise(usize),
    #[error("{0}")]
    Dialect(String),
    #[error("rule ({rule}) is not a rule of {dialect:?}")]
    RuleNotInDialect { rule: &'static str, dialect: Dialect },
    #[error("expected exactly one premise, found {0}")]
    PremiseCount(usize),
    #[error("the conclusion is not stable")]
    Instable,
    #[error("stability of the conclusion could not be established")]
    StabilityUnknown,
    #[error("path {path} does not lead to {expected}")]
    BadPath { path: OccurrencePath, expected: &'static str },
    #[error("the occurrence at {path} has the wrong polarity")]
    Polarity { path: OccurrencePath },
    #[error("the occurrence at {path} is not a surface occurrence")]
    NotSurface { path: OccurrencePath },
    #[error("choice component must be 1 or 2, found {0}")]
    Branch(u8),
    #[error("premise should be {expected}")]
    PremiseMismatch { expected: Formula },
    #[error("no premise replaces the occurrence at {path} by {what}")]
    MissingPremise { path: OccurrencePath, what: String },
    #[error("cover entry for {path} does not match a required premise")]
    BadCover { path: OccurrencePath },
    #[error(transparent)]
    Capture(CaptureError),
    #[error("{name} already occurs in the conclusion")]
    NotFresh { name: String },
    #[error("{name} is not usable as an elementary letter")]
    NotElementary { name: String },
    #[error("the occurrences at {positive} and {negative} are different letters")]
    LetterMismatch { positive: OccurrencePath, negative: OccurrencePath },
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("node {node}: {reason}")]
pub struct ProofError {
    pub node: usize,
    pub reason: Reason,
}

impl Serialize for ProofError {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ProofError", 2)?;
        st.serialize_field("node", &self.node)?;
        st.serialize_field("reason", &self.reason.to_string())?;
        st.end()
    }
}

/// A verified proof.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Checked {
    pub theorem: Formula,
    /// Some Rule (A) node relies on an assumed stability certificate.
    pub conditional: bool,
}

/// Verifies every node against its rule and reports every failing node.
pub fn check_proof(p: &Proof) -> Result<Checked, Vec<ProofError>> {
    let Some(last) = p.nodes.last() else {
        return Err(vec![ProofError { node: 0, reason: Reason::Empty }]);
    };
    let mut errors = Vec::new();
    let mut seen: HashMap<usize, &Formula> = HashMap::new();
    let mut conditional = false;
    for n in &p.nodes {
        let mut fail = |reason| errors.push(ProofError { node: n.id, reason });
        if seen.contains_key(&n.id) {
            fail(Reason::DuplicateId(n.id));
            continue;
        }
        let mut premises = Vec::new();
        for id in &n.premises {
            match seen.get(id) {
                Some(f) => premises.push((*id, *f)),
                None => fail(Reason::UnknownPremise(*id)),
            }
        }
        seen.insert(n.id, &n.formula);
        if premises.len() != n.premises.len() {
            continue;
        }
        if p.dialect == Dialect::Extended {
            fail(Reason::Dialect("proofs are checked in cl1, cl2 or cl4".into()));
            continue;
        }
        if let Err(e) = p.dialect.check(&n.formula) {
            fail(Reason::Dialect(e.to_string()));
            continue;
        }
        match check_node(p.dialect, n, &premises) {
            Ok(assumed) => conditional |= assumed,
            Err(reasons) => reasons.into_iter().for_each(fail),
        }
    }
    if errors.is_empty() {
        Ok(Checked { theorem: last.formula.clone(), conditional })
    } else {
        Err(errors)
    }
}

fn rule_allowed(step: &Step, dialect: Dialect) -> bool {
    match step {
        Step::A { .. } | Step::B1 { .. } => true,
        Step::B2 { .. } => dialect == Dialect::Cl4,
        Step::C { .. } => dialect != Dialect::Cl1,
    }
}

/// `Ok(true)` when the node is accepted only on an assumed certificate.
fn check_node(dialect: Dialect, n: &ProofNode, premises: &[(usize, &Formula)]) -> Result<bool, Vec<Reason>> {
    if !rule_allowed(&n.step, dialect) {
        return Err(vec![Reason::RuleNotInDialect { rule: n.step.label(dialect), dialect }]);
    }
    let f = &n.formula;
    let single = || match premises {
        [(_, h)] => Ok(*h),
        _ => Err(vec![Reason::PremiseCount(premises.len())]),
    };
    match &n.step {
        Step::A { certificate, cover } => check_a(f, certificate, cover, premises),
        Step::B1 { path, branch } => {
            let h = single()?;
            let (op, a, b) = match f.at(path) {
                Some(Formula::Bin(op @ (BinOp::CAnd | BinOp::COr), a, b)) => (*op, a, b),
                _ => return Err(vec![Reason::BadPath { path: path.clone(), expected: "a choice connective" }]),
            };
            let want = if op == BinOp::CAnd { Polarity::Negative } else { Polarity::Positive };
            machine_site(f, path, want)?;
            let g = match branch {
                1 => a,
                2 => b,
                other => return Err(vec![Reason::Branch(*other)]),
            };
            expect(h, f.replace_at(path, (**g).clone()))
        }
        Step::B2 { path, term } => {
            let h = single()?;
            let (q, x, g) = match f.at(path) {
                Some(Formula::Quant(q @ (Quant::ChoiceAll | Quant::ChoiceEx), x, g)) => (*q, x, g),
                _ => return Err(vec![Reason::BadPath { path: path.clone(), expected: "a choice quantifier" }]),
            };
            let want = if q == Quant::ChoiceAll { Polarity::Negative } else { Polarity::Positive };
            machine_site(f, path, want)?;
            if let Term::Var(t) = term {
                if let Some((binder, ..)) = f.binders_above(path).into_iter().find(|(_, _, y)| y == t) {
                    return Err(vec![Reason::Capture(CaptureError { var: x.clone(), term: term.clone(), binder })]);
                }
            }
            let inst = g.substitute(x, term).map_err(|e| vec![Reason::Capture(e)])?;
            expect(h, f.replace_at(path, inst))
        }
        Step::C { positive, negative, fresh } => {
            let h = single()?;
            let pa = general_site(f, positive, Polarity::Positive)?;
            let na = general_site(f, negative, Polarity::Negative)?;
            if pa.name != na.name || positive == negative {
                return Err(vec![Reason::LetterMismatch { positive: positive.clone(), negative: negative.clone() }]);
            }
            if !usable_elementary(fresh) {
                return Err(vec![Reason::NotElementary { name: fresh.clone() }]);
            }
            if f.symbol_names().contains(fresh) {
                return Err(vec![Reason::NotFresh { name: fresh.clone() }]);
            }
            expect(h, replace_pair(f, positive, pa, negative, na, fresh))
        }
    }
}

pub(super) fn usable_elementary(name: &str) -> bool {
    AtomKind::of_name(name) == AtomKind::Elementary
        && name != "true"
        && name != "false"
        && name.parse::<Term>().is_ok_and(|t| matches!(t, Term::Var(_)))
}

pub(super) fn replace_pair(
    f: &Formula,
    positive: &OccurrencePath,
    pa: &Atom,
    negative: &OccurrencePath,
    na: &Atom,
    fresh: &str,
) -> Option<Formula> {
    f.replace_at(positive, Formula::Atom(Atom::new(fresh, pa.args.clone())))?
        .replace_at(negative, Formula::Atom(Atom::new(fresh, na.args.clone())))
}

fn machine_site(f: &Formula, path: &OccurrencePath, want: Polarity) -> Result<(), Vec<Reason>> {
    if !f.is_surface(path) {
        return Err(vec![Reason::NotSurface { path: path.clone() }]);
    }
    if f.polarity_at(path) != Some(want) {
        return Err(vec![Reason::Polarity { path: path.clone() }]);
    }
    Ok(())
}

fn general_site<'a>(f: &'a Formula, path: &OccurrencePath, want: Polarity) -> Result<&'a Atom, Vec<Reason>> {
    match f.at(path) {
        Some(Formula::Atom(a)) if a.kind == AtomKind::General => {
            machine_site(f, path, want)?;
            Ok(a)
        }
        _ => Err(vec![Reason::BadPath { path: path.clone(), expected: "a general atom" }]),
    }
}

fn expect(h: &Formula, expected: Option<Formula>) -> Result<bool, Vec<Reason>> {
    match expected {
        Some(e) if &e == h => Ok(false),
        Some(e) => Err(vec![Reason::PremiseMismatch { expected: e }]),
        None => Err(vec![Reason::PremiseMismatch { expected: h.clone() }]),
    }
}

fn check_a(
    f: &Formula,
    certificate: &StabilityCertificate,
    cover: &[Cover],
    premises: &[(usize, &Formula)],
) -> Result<bool, Vec<Reason>> {
    let mut reasons = Vec::new();
    let mut budget = Budget::default();
    if let StabilityCertificate::FoProof { depth, instances } = *certificate {
        budget.herbrand_depth = budget.herbrand_depth.max(depth);
        budget.max_instances = budget.max_instances.max(instances);
    }
    let mut assumed = false;
    match is_stable(f, &budget) {
        Stability::Stable(_) => {}
        Stability::Instable => reasons.push(Reason::Instable),
        Stability::Unknown if *certificate == StabilityCertificate::Assumed => assumed = true,
        Stability::Unknown => reasons.push(Reason::StabilityUnknown),
    }
    if let Err(more) = complete_cover(f, cover, premises) {
        reasons.extend(more);
    }
    if reasons.is_empty() {
        Ok(assumed)
    } else {
        Err(reasons)
    }
}

/// The full Rule (A) cover of `f`: supplied entries are verified, missing
/// ones are located among `premises`.
pub(crate) fn complete_cover(
    f: &Formula,
    cover: &[Cover],
    premises: &[(usize, &Formula)],
) -> Result<Vec<Cover>, Vec<Reason>> {
    let mut reasons = Vec::new();
    let mut out = Vec::new();
    let premise_formula = |id: usize| premises.iter().find(|(i, _)| *i == id).map(|(_, h)| *h);
    let taken = f.all_vars();
    let mut used = vec![false; cover.len()];
    for occ in f.surface_occurrences().into_iter().filter(|o| o.is_environment_choice()) {
        let path = occ.path;
        match f.at(&path) {
            Some(Formula::Bin(_, a, b)) => {
                for (i, g) in [(1u8, a), (2, b)] {
                    let expected = f.replace_at(&path, (**g).clone()).expect("path resolves");
                    let entry = cover.iter().position(|c| c.path == path && c.pick == Pick::Branch(i));
                    match entry {
                        Some(k) => {
                            used[k] = true;
                            if premise_formula(cover[k].premise) == Some(&expected) {
                                out.push(cover[k].clone());
                            } else {
                                reasons.push(Reason::PremiseMismatch { expected });
                            }
                        }
                        None => match premises.iter().find(|(_, h)| **h == expected) {
                            Some((id, _)) => {
                                out.push(Cover { path: path.clone(), pick: Pick::Branch(i), premise: *id })
                            }
                            None => reasons.push(Reason::MissingPremise { path: path.clone(), what: g.to_string() }),
                        },
                    }
                }
            }
            Some(Formula::Quant(_, x, g)) => {
                let entry = cover.iter().position(|c| c.path == path && matches!(c.pick, Pick::Fresh(_)));
                match entry {
                    Some(k) => {
                        used[k] = true;
                        let Pick::Fresh(y) = &cover[k].pick else { unreachable!() };
                        if taken.contains(y) {
                            reasons.push(Reason::NotFresh { name: y.clone() });
                            continue;
                        }
                        let inst = g.substitute(x, &Term::Var(y.clone())).expect("fresh variable is never captured");
                        let expected = f.replace_at(&path, inst).expect("path resolves");
                        if premise_formula(cover[k].premise) == Some(&expected) {
                            out.push(cover[k].clone());
                        } else {
                            reasons.push(Reason::PremiseMismatch { expected });
                        }
                    }
                    None => {
                        let found = premises
                            .iter()
                            .find_map(|(id, h)| fresh_instance(f, &path, x, g, h, &taken).map(|y| (*id, y)));
                        match found {
                            Some((id, y)) => out.push(Cover { path: path.clone(), pick: Pick::Fresh(y), premise: id }),
                            None => reasons.push(Reason::MissingPremise {
                                path: path.clone(),
                                what: format!("an instance of {g} at a fresh variable"),
                            }),
                        }
                    }
                }
            }
            _ => unreachable!("environment choices are choice operators"),
        }
    }
    for (k, c) in cover.iter().enumerate() {
        if !used[k] {
            reasons.push(Reason::BadCover { path: c.path.clone() });
        }
    }
    if reasons.is_empty() {
        Ok(out)
    } else {
        Err(reasons)
    }
}

/// The variable `y` absent from `f` for which `h` is `f` with the
/// quantifier at `path` replaced by `g(x/y)`.
fn fresh_instance(
    f: &Formula,
    path: &OccurrencePath,
    x: &str,
    g: &Formula,
    h: &Formula,
    taken: &std::collections::BTreeSet<String>,
) -> Option<String> {
    let k = h.at(path)?;
    let original = f.at(path).expect("path resolves").clone();
    if h.replace_at(path, original).as_ref() != Some(f) {
        return None;
    }
    if !g.free_vars().contains(x) {
        let mut all = taken.clone();
        all.extend(h.all_vars());
        return (k == g).then(|| crate::formula::fresh_name("y", &all));
    }
    k.free_vars()
        .difference(taken)
        .find(|y| g.substitute(x, &Term::Var((*y).clone())).is_ok_and(|inst| &inst == k))
        .cloned()
}
