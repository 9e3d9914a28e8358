//! Elementarization and the classical oracles behind stability.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::sat::{satisfy, Prop};
use super::{AtomKind, BinOp, Formula, Polarity, Quant, Term};

/// Search limits for the first-order oracles and the CL4 prover.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Maximum Herbrand term depth tried when refuting a negation.
    pub herbrand_depth: usize,
    /// Maximum number of ground instances per refutation attempt.
    pub max_instances: usize,
    /// Elements added beyond the formula's own names in countermodel search.
    pub model_extra: usize,
    /// Maximum number of distinct goals the prover may expand.
    pub max_goals: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { herbrand_depth: 3, max_instances: 4000, model_extra: 2, max_goals: 200_000 }
    }
}

/// Evidence that an elementarization is classically valid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StabilityCertificate {
    /// Propositional tautology over the given number of letters.
    Tautology { letters: usize },
    /// Unsatisfiable ground expansion of the negation at this term depth.
    FoProof { depth: usize, instances: usize },
    /// Taken on trust; any proof using it is conditional.
    Assumed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stability {
    Stable(StabilityCertificate),
    Instable,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FoVerdict {
    Valid { depth: usize, instances: usize },
    Unknown,
}

/// A finite structure falsifying a formula.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Countermodel {
    pub domain: Vec<String>,
    /// Ground atoms that hold; every other atom is false.
    pub true_atoms: Vec<String>,
}

/// Replaces surface `&`, `!x` by true, surface `|`, `?x` by false, and surface
/// general atoms by false (positive) or true (negative).
pub fn elementarize(f: &Formula) -> Formula {
    fn go(f: &Formula, pol: Polarity) -> Formula {
        match f {
            Formula::Bin(BinOp::CAnd, ..) | Formula::Quant(Quant::ChoiceAll, ..) => Formula::Top,
            Formula::Bin(BinOp::COr, ..) | Formula::Quant(Quant::ChoiceEx, ..) => Formula::Bottom,
            Formula::Atom(a) if a.kind == AtomKind::General => match pol {
                Polarity::Positive => Formula::Bottom,
                Polarity::Negative => Formula::Top,
            },
            Formula::Top | Formula::Bottom | Formula::Atom(_) => f.clone(),
            Formula::Not(a) => Formula::Not(Box::new(go(a, pol.flip()))),
            Formula::Bin(op, a, b) => {
                let lp = if *op == BinOp::Implies { pol.flip() } else { pol };
                Formula::Bin(*op, Box::new(go(a, lp)), Box::new(go(b, pol)))
            }
            Formula::Quant(q, x, a) => Formula::Quant(*q, x.clone(), Box::new(go(a, pol))),
            Formula::Rec(_, a) => go(a, pol),
        }
    }
    go(f, Polarity::Positive)
}

/// Propositional letters keyed by canonical text of atoms (or of quantified
/// subformulas, which are opaque here).
#[derive(Default)]
struct Letters {
    index: HashMap<String, usize>,
}

impl Letters {
    fn get(&mut self, key: String) -> usize {
        let n = self.index.len();
        *self.index.entry(key).or_insert(n)
    }

    fn prop(&mut self, f: &Formula) -> Prop {
        match f {
            Formula::Top => Prop::Const(true),
            Formula::Bottom => Prop::Const(false),
            Formula::Atom(a) => Prop::Var(self.get(a.to_string())),
            Formula::Not(a) => Prop::Not(Box::new(self.prop(a))),
            Formula::Bin(op, a, b) => {
                let (pa, pb) = (self.prop(a), self.prop(b));
                match op {
                    BinOp::PAnd | BinOp::CAnd => Prop::And(vec![pa, pb]),
                    BinOp::POr | BinOp::COr => Prop::Or(vec![pa, pb]),
                    BinOp::Implies => Prop::Or(vec![Prop::Not(Box::new(pa)), pb]),
                }
            }
            Formula::Quant(..) | Formula::Rec(..) => Prop::Var(self.get(f.to_string())),
        }
    }
}

/// Truth-functional validity; distinct atom instances are distinct letters.
pub fn classical_taut(f: &Formula) -> bool {
    let mut letters = Letters::default();
    let p = letters.prop(f);
    satisfy(&Prop::Not(Box::new(p)), letters.index.len()).is_none()
}

pub(crate) fn taut_letters(f: &Formula) -> (bool, usize) {
    let mut letters = Letters::default();
    let p = letters.prop(f);
    let n = letters.index.len();
    (satisfy(&Prop::Not(Box::new(p)), n).is_none(), n)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum HTerm {
    Name(String),
    App(usize, Vec<HTerm>),
    Univ(usize),
}

impl HTerm {
    fn depth(&self) -> usize {
        match self {
            HTerm::App(_, xs) => 1 + xs.iter().map(|x| x.depth()).max().unwrap_or(0),
            _ => 0,
        }
    }

    fn ground(&self, sigma: &[HTerm]) -> HTerm {
        match self {
            HTerm::Univ(i) => sigma[*i].clone(),
            HTerm::App(f, xs) => HTerm::App(*f, xs.iter().map(|x| x.ground(sigma)).collect()),
            other => other.clone(),
        }
    }

    fn key(&self) -> String {
        match self {
            HTerm::Name(n) => n.clone(),
            HTerm::App(f, xs) => {
                let inner: Vec<String> = xs.iter().map(|x| x.key()).collect();
                format!("f{f}({})", inner.join(","))
            }
            HTerm::Univ(i) => format!("?{i}"),
        }
    }
}

/// Quantifier-free negation normal form with Skolem terms.
#[derive(Clone, Debug)]
enum Matrix {
    Const(bool),
    Lit(bool, String, Vec<HTerm>),
    And(Vec<Matrix>),
    Or(Vec<Matrix>),
}

struct Skolemizer {
    univs: usize,
    /// Skolem function arities by id.
    functions: Vec<usize>,
    names: BTreeSet<String>,
}

fn name_of_const(c: u32) -> String {
    c.to_string()
}

fn name_of_free(v: &str) -> String {
    format!("'{v}")
}

impl Skolemizer {
    fn term(&mut self, t: &Term, env: &BTreeMap<String, HTerm>) -> HTerm {
        match t {
            Term::Const(c) => {
                let n = name_of_const(*c);
                self.names.insert(n.clone());
                HTerm::Name(n)
            }
            Term::Var(v) => env.get(v).cloned().unwrap_or_else(|| {
                let n = name_of_free(v);
                self.names.insert(n.clone());
                HTerm::Name(n)
            }),
        }
    }

    /// NNF of `f` (or of its negation when `positive` is false), Skolemized.
    fn go(&mut self, f: &Formula, positive: bool, env: &mut BTreeMap<String, HTerm>, scope: &mut Vec<usize>) -> Matrix {
        match f {
            Formula::Top => Matrix::Const(positive),
            Formula::Bottom => Matrix::Const(!positive),
            Formula::Atom(a) => {
                let args = a.args.iter().map(|t| self.term(t, env)).collect();
                Matrix::Lit(positive, a.name.clone(), args)
            }
            Formula::Not(a) => self.go(a, !positive, env, scope),
            Formula::Rec(_, a) => self.go(a, positive, env, scope),
            Formula::Bin(op, a, b) => {
                let (la, lb, conj) = match (op, positive) {
                    (BinOp::PAnd | BinOp::CAnd, p) => (p, p, p),
                    (BinOp::POr | BinOp::COr, p) => (p, p, !p),
                    (BinOp::Implies, p) => (!p, p, !p),
                };
                let ma = self.go(a, la, env, scope);
                let mb = self.go(b, lb, env, scope);
                if conj {
                    Matrix::And(vec![ma, mb])
                } else {
                    Matrix::Or(vec![ma, mb])
                }
            }
            Formula::Quant(q, x, body) => {
                let universal_kind = matches!(q, Quant::BlindAll | Quant::ParAll | Quant::ChoiceAll);
                let saved = env.get(x).cloned();
                let pushed = if universal_kind == positive {
                    let id = self.univs;
                    self.univs += 1;
                    env.insert(x.clone(), HTerm::Univ(id));
                    scope.push(id);
                    true
                } else {
                    let term = if scope.is_empty() {
                        let n = format!("#sk{}", self.functions.len());
                        self.functions.push(0);
                        self.names.insert(n.clone());
                        HTerm::Name(n)
                    } else {
                        let id = self.functions.len();
                        self.functions.push(scope.len());
                        HTerm::App(id, scope.iter().map(|&u| HTerm::Univ(u)).collect())
                    };
                    env.insert(x.clone(), term);
                    false
                };
                let m = self.go(body, positive, env, scope);
                if pushed {
                    scope.pop();
                }
                match saved {
                    Some(s) => env.insert(x.clone(), s),
                    None => env.remove(x),
                };
                m
            }
        }
    }
}

fn ground_prop(m: &Matrix, sigma: &[HTerm], letters: &mut Letters) -> Prop {
    match m {
        Matrix::Const(b) => Prop::Const(*b),
        Matrix::Lit(sign, name, args) => {
            let keys: Vec<String> = args.iter().map(|t| t.ground(sigma).key()).collect();
            let v = Prop::Var(letters.get(format!("{name}({})", keys.join(","))));
            if *sign {
                v
            } else {
                Prop::Not(Box::new(v))
            }
        }
        Matrix::And(xs) => Prop::And(xs.iter().map(|x| ground_prop(x, sigma, letters)).collect()),
        Matrix::Or(xs) => Prop::Or(xs.iter().map(|x| ground_prop(x, sigma, letters)).collect()),
    }
}

/// Sound, incomplete first-order validity: refutes the Skolemized negation by
/// ground instances over Herbrand terms of increasing depth.
pub fn classical_fo_valid(f: &Formula, budget: &Budget) -> FoVerdict {
    let mut sk = Skolemizer { univs: 0, functions: Vec::new(), names: BTreeSet::new() };
    let matrix = sk.go(f, false, &mut BTreeMap::new(), &mut Vec::new());
    if sk.names.is_empty() {
        sk.names.insert("#c".to_string());
    }
    let mut universe: Vec<HTerm> = sk.names.iter().cloned().map(HTerm::Name).collect();
    for depth in 0..=budget.herbrand_depth {
        if depth > 0 {
            let mut next: BTreeSet<HTerm> = universe.iter().cloned().collect();
            for (id, &arity) in sk.functions.iter().enumerate() {
                if arity == 0 {
                    continue;
                }
                for args in tuples(&universe, arity, budget.max_instances) {
                    let t = HTerm::App(id, args);
                    if t.depth() == depth {
                        next.insert(t);
                    }
                }
            }
            if next.len() == universe.len() {
                break;
            }
            universe = next.into_iter().collect();
        }
        let n = universe.len().checked_pow(sk.univs as u32).unwrap_or(usize::MAX);
        if n > budget.max_instances {
            break;
        }
        let mut letters = Letters::default();
        let instances: Vec<Prop> = tuples(&universe, sk.univs, budget.max_instances)
            .into_iter()
            .map(|sigma| ground_prop(&matrix, &sigma, &mut letters))
            .collect();
        let count = instances.len();
        if satisfy(&Prop::And(instances), letters.index.len()).is_none() {
            return FoVerdict::Valid { depth, instances: count };
        }
    }
    FoVerdict::Unknown
}

fn tuples<T: Clone>(items: &[T], n: usize, cap: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for prefix in &out {
            for it in items {
                if next.len() >= cap {
                    return next;
                }
                let mut p = prefix.clone();
                p.push(it.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Searches structures whose domain is the formula's names plus up to
/// `budget.model_extra` further elements for one falsifying `f`.
pub fn find_countermodel(f: &Formula, budget: &Budget) -> Option<Countermodel> {
    let mut names: Vec<String> = f.constants().into_iter().map(name_of_const).collect();
    names.extend(f.free_vars().iter().map(|v| name_of_free(v)));
    let start = usize::from(names.is_empty());
    for extra in start..=budget.model_extra {
        let mut domain = names.clone();
        domain.extend((1..=extra).map(|i| format!("#e{i}")));
        let mut letters = Letters::default();
        let p = ground_finite(f, &domain, &mut BTreeMap::new(), &mut letters, budget)?;
        let n = letters.index.len();
        if let Some(model) = satisfy(&Prop::Not(Box::new(p)), n) {
            let mut true_atoms: Vec<String> =
                letters.index.iter().filter(|(_, &i)| model[i]).map(|(k, _)| k.clone()).collect();
            true_atoms.sort();
            return Some(Countermodel { domain, true_atoms });
        }
    }
    None
}

fn ground_finite(
    f: &Formula,
    domain: &[String],
    env: &mut BTreeMap<String, String>,
    letters: &mut Letters,
    budget: &Budget,
) -> Option<Prop> {
    if letters.index.len() > budget.max_instances {
        return None;
    }
    Some(match f {
        Formula::Top => Prop::Const(true),
        Formula::Bottom => Prop::Const(false),
        Formula::Atom(a) => {
            let args: Vec<String> = a
                .args
                .iter()
                .map(|t| match t {
                    Term::Const(c) => name_of_const(*c),
                    Term::Var(v) => env.get(v).cloned().unwrap_or_else(|| name_of_free(v)),
                })
                .collect();
            Prop::Var(letters.get(format!("{}({})", a.name, args.join(","))))
        }
        Formula::Not(a) => Prop::Not(Box::new(ground_finite(a, domain, env, letters, budget)?)),
        Formula::Rec(_, a) => ground_finite(a, domain, env, letters, budget)?,
        Formula::Bin(op, a, b) => {
            let pa = ground_finite(a, domain, env, letters, budget)?;
            let pb = ground_finite(b, domain, env, letters, budget)?;
            match op {
                BinOp::PAnd | BinOp::CAnd => Prop::And(vec![pa, pb]),
                BinOp::POr | BinOp::COr => Prop::Or(vec![pa, pb]),
                BinOp::Implies => Prop::Or(vec![Prop::Not(Box::new(pa)), pb]),
            }
        }
        Formula::Quant(q, x, body) => {
            let saved = env.get(x).cloned();
            let mut parts = Vec::new();
            for d in domain {
                env.insert(x.clone(), d.clone());
                parts.push(ground_finite(body, domain, env, letters, budget)?);
            }
            match saved {
                Some(s) => env.insert(x.clone(), s),
                None => env.remove(x),
            };
            if matches!(q, Quant::BlindAll | Quant::ParAll | Quant::ChoiceAll) {
                Prop::And(parts)
            } else {
                Prop::Or(parts)
            }
        }
    })
}

/// Whether the elementarization of `f` is classically valid.
pub fn is_stable(f: &Formula, budget: &Budget) -> Stability {
    let e = elementarize(f);
    let quantified = {
        let mut q = false;
        e.visit(&mut |g| q |= matches!(g, Formula::Quant(..)));
        q
    };
    if !quantified {
        let (valid, letters) = taut_letters(&e);
        return if valid {
            Stability::Stable(StabilityCertificate::Tautology { letters })
        } else {
            Stability::Instable
        };
    }
    if let FoVerdict::Valid { depth, instances } = classical_fo_valid(&e, budget) {
        return Stability::Stable(StabilityCertificate::FoProof { depth, instances });
    }
    if find_countermodel(&e, budget).is_some() {
        Stability::Instable
    } else {
        Stability::Unknown
    }
}
