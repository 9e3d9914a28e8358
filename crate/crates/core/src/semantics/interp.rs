use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::formula::{AtomKind, Formula, Quant, Rec, Term};
use crate::game::{is_unistructural, ExplicitGame, Game, GameFn, Player, Sense, Valuation};

use super::{Bounds, SemanticsError};

/// Truth function of an elementary letter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Predicate {
    Const(bool),
    Builtin(Builtin),
    /// True exactly at the listed argument tuples.
    Table {
        true_at: BTreeSet<Vec<u32>>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    Odd,
    Even,
    /// The sum of all arguments is even.
    SumEven,
    Lt,
    Le,
    Eq,
}

impl Builtin {
    fn arity_ok(self, n: usize) -> bool {
        match self {
            Builtin::Odd | Builtin::Even => n == 1,
            Builtin::Lt | Builtin::Le | Builtin::Eq => n == 2,
            Builtin::SumEven => n >= 1,
        }
    }

    fn eval(self, args: &[u32]) -> bool {
        match self {
            Builtin::Odd => args[0] % 2 == 1,
            Builtin::Even => args[0].is_multiple_of(2),
            Builtin::SumEven => args.iter().map(|&a| a as u64).sum::<u64>() % 2 == 0,
            Builtin::Lt => args[0] < args[1],
            Builtin::Le => args[0] <= args[1],
            Builtin::Eq => args[0] == args[1],
        }
    }
}

impl Predicate {
    pub fn eval(&self, args: &[u32]) -> bool {
        match self {
            Predicate::Const(b) => *b,
            Predicate::Builtin(b) => b.eval(args),
            Predicate::Table { true_at } => true_at.contains(args),
        }
    }
}

/// Game shape assigned to a general letter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Template {
    /// A fixed explicit game; only for 0-ary letters.
    Explicit { explicit: Arc<ExplicitGame> },
    /// A formula over elementary letters whose free variables are among
    /// `params`, which receive the atom's arguments in order. A case whose
    /// `args` equal the argument values overrides `body`.
    Formula {
        #[serde(default)]
        params: Vec<String>,
        body: Formula,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        cases: Vec<Case>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub args: Vec<u32>,
    pub body: Formula,
}

impl Template {
    pub fn formula(params: &[&str], body: Formula) -> Template {
        Template::Formula { params: params.iter().map(|p| p.to_string()).collect(), body, cases: Vec::new() }
    }

    fn arity(&self) -> usize {
        match self {
            Template::Explicit { .. } => 0,
            Template::Formula { params, .. } => params.len(),
        }
    }

    fn bodies(&self) -> Vec<&Formula> {
        match self {
            Template::Explicit { .. } => Vec::new(),
            Template::Formula { body, cases, .. } => {
                std::iter::once(body).chain(cases.iter().map(|c| &c.body)).collect()
            }
        }
    }
}

/// Assignment of games to letters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Interpretation {
    #[serde(default)]
    pub elementary: BTreeMap<String, Predicate>,
    #[serde(default)]
    pub general: BTreeMap<String, Template>,
}

const INTERPRETATION_FORMAT: &str = "clwork-interpretation/1";
const FAMILY_FORMAT: &str = "clwork-family/1";

#[derive(Serialize, Deserialize)]
struct InterpretationFile {
    format: String,
    #[serde(flatten)]
    interpretation: Interpretation,
}

#[derive(Serialize, Deserialize)]
struct FamilyFile {
    format: String,
    members: Vec<Interpretation>,
}

impl Interpretation {
    pub fn with_letter(mut self, name: &str, value: bool) -> Interpretation {
        self.elementary.insert(name.to_string(), Predicate::Const(value));
        self
    }

    pub fn with_predicate(mut self, name: &str, p: Predicate) -> Interpretation {
        self.elementary.insert(name.to_string(), p);
        self
    }

    pub fn with_template(mut self, name: &str, t: Template) -> Interpretation {
        self.general.insert(name.to_string(), t);
        self
    }

    pub fn to_json(&self) -> String {
        let file = InterpretationFile { format: INTERPRETATION_FORMAT.into(), interpretation: self.clone() };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Interpretation, SemanticsError> {
        let file: InterpretationFile = serde_json::from_str(text).map_err(|e| SemanticsError::File(e.to_string()))?;
        if file.format != INTERPRETATION_FORMAT {
            return Err(SemanticsError::File(format!("unsupported format tag {:?}", file.format)));
        }
        Ok(file.interpretation)
    }

    pub fn family_to_json(family: &[Interpretation]) -> String {
        let file = FamilyFile { format: FAMILY_FORMAT.into(), members: family.to_vec() };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    /// Reads a family file, or a single interpretation as a one-member family.
    pub fn family_from_json(text: &str) -> Result<Vec<Interpretation>, SemanticsError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| SemanticsError::File(e.to_string()))?;
        match value.get("format").and_then(|f| f.as_str()) {
            Some(FAMILY_FORMAT) => serde_json::from_value::<FamilyFile>(value)
                .map(|f| f.members)
                .map_err(|e| SemanticsError::File(e.to_string())),
            _ => Interpretation::from_json(text).map(|i| vec![i]),
        }
    }

    fn predicate(&self, name: &str, arity: usize) -> Result<&Predicate, SemanticsError> {
        let p = self.elementary.get(name).ok_or_else(|| SemanticsError::Uninterpreted { symbol: name.to_string() })?;
        let fits = match p {
            Predicate::Const(_) => true,
            Predicate::Builtin(b) => b.arity_ok(arity),
            Predicate::Table { true_at } => true_at.iter().all(|t| t.len() == arity),
        };
        if !fits {
            return Err(SemanticsError::Arity { symbol: name.to_string(), arity });
        }
        Ok(p)
    }

    /// Checks every letter of `f` (and of the templates it reaches) and the
    /// two admissibility conditions: a general letter's game depends only on
    /// the atom's own arguments, and it is unistructural in every variable
    /// bound by an enclosing blind quantifier.
    pub fn check(&self, f: &Formula, bounds: &Bounds) -> Result<(), SemanticsError> {
        let mut seen = BTreeSet::new();
        self.check_letters(f, &mut seen)?;
        self.check_blind(f, &mut Vec::new(), bounds)
    }

    fn check_letters(&self, f: &Formula, seen: &mut BTreeSet<String>) -> Result<(), SemanticsError> {
        for a in f.atoms() {
            match a.kind {
                AtomKind::Elementary => {
                    self.predicate(&a.name, a.arity())?;
                }
                AtomKind::General => {
                    let t = self
                        .general
                        .get(&a.name)
                        .ok_or_else(|| SemanticsError::Uninterpreted { symbol: a.name.clone() })?;
                    if t.arity() != a.arity() {
                        return Err(SemanticsError::Arity { symbol: a.name.clone(), arity: a.arity() });
                    }
                    if !seen.insert(a.name.clone()) {
                        continue;
                    }
                    if let Template::Formula { params, cases, .. } = t {
                        if let Some(c) = cases.iter().find(|c| c.args.len() != params.len()) {
                            return Err(SemanticsError::Arity { symbol: a.name.clone(), arity: c.args.len() });
                        }
                        for body in t.bodies() {
                            if let Some(g) = body.atoms().into_iter().find(|b| b.kind == AtomKind::General) {
                                return Err(SemanticsError::NestedGeneral {
                                    symbol: a.name.clone(),
                                    inner: g.name.clone(),
                                });
                            }
                            if let Some(v) = body.free_vars().into_iter().find(|v| !params.contains(v)) {
                                return Err(SemanticsError::Dependence { symbol: a.name.clone(), var: v });
                            }
                            self.check_letters(body, seen)?;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn check_blind(&self, f: &Formula, blind: &mut Vec<String>, bounds: &Bounds) -> Result<(), SemanticsError> {
        match f {
            Formula::Atom(a) if a.kind == AtomKind::General => {
                for x in blind.iter() {
                    if !a.args.contains(&Term::Var(x.clone())) {
                        continue;
                    }
                    let atom = Formula::Atom(a.clone());
                    let vars = atom.free_vars();
                    let (star, b) = (self.clone(), *bounds);
                    let family = GameFn::new(vars.clone(), move |e| build(&atom, &star, &b, e));
                    let depth = Valuation::all(&vars, bounds.universe)
                        .iter()
                        .map(|e| family.at(e).depth_bound())
                        .max()
                        .unwrap_or(0);
                    if !is_unistructural(&family, x, bounds.universe, depth) {
                        return Err(SemanticsError::NotUnistructural { symbol: a.name.clone(), var: x.clone() });
                    }
                }
                Ok(())
            }
            Formula::Quant(q, x, body) if q.is_blind() => {
                blind.push(x.clone());
                let r = self.check_blind(body, blind, bounds);
                blind.pop();
                r
            }
            Formula::Quant(_, x, body) => {
                // A non-blind binder shadows an outer blind binder of the same name.
                let saved = blind.clone();
                blind.retain(|y| y != x);
                let r = self.check_blind(body, blind, bounds);
                *blind = saved;
                r
            }
            _ => f.children().into_iter().try_for_each(|c| self.check_blind(c, blind, bounds)),
        }
    }
}

fn value(t: &Term, e: &Valuation) -> u32 {
    match t {
        Term::Var(x) => e.get(x),
        Term::Const(c) => *c,
    }
}

/// The instance `e[f*]`. Assumes `star` has passed [`Interpretation::check`].
pub(crate) fn build(f: &Formula, star: &Interpretation, bounds: &Bounds, e: &Valuation) -> Game {
    let go = |g: &Formula| build(g, star, bounds, e);
    let over = |x: &str, body: &Formula| -> Vec<Game> {
        (1..=bounds.universe).map(|c| build(body, star, bounds, &e.with(x, c))).collect()
    };
    match f {
        Formula::Top => Game::top(),
        Formula::Bottom => Game::bottom(),
        Formula::Atom(a) => {
            let args: Vec<u32> = a.args.iter().map(|t| value(t, e)).collect();
            match a.kind {
                AtomKind::Elementary => {
                    let truth = star.elementary[&a.name].eval(&args);
                    Game::elementary(if truth { Player::Machine } else { Player::Environment })
                }
                AtomKind::General => match &star.general[&a.name] {
                    Template::Explicit { explicit } => Game::explicit(explicit.clone()),
                    Template::Formula { params, body, cases } => {
                        let body = cases.iter().find(|c| c.args == args).map(|c| &c.body).unwrap_or(body);
                        let inner = Valuation(params.iter().cloned().zip(args).collect());
                        build(body, star, bounds, &inner)
                    }
                },
            }
        }
        Formula::Not(a) => Game::neg(&go(a)),
        Formula::Bin(op, a, b) => {
            let (a, b) = (go(a), go(b));
            match op {
                crate::formula::BinOp::PAnd => Game::pand(&a, &b),
                crate::formula::BinOp::POr => Game::por(&a, &b),
                crate::formula::BinOp::Implies => Game::implies(&a, &b),
                crate::formula::BinOp::CAnd => Game::cand(&a, &b),
                crate::formula::BinOp::COr => Game::cor(&a, &b),
            }
        }
        Formula::Quant(q, x, body) => {
            let xs = over(x, body);
            match q {
                Quant::ChoiceAll => Game::choice(Sense::Conj, xs),
                Quant::ChoiceEx => Game::choice(Sense::Disj, xs),
                Quant::ParAll => Game::parallel(Sense::Conj, xs),
                Quant::ParEx => Game::parallel(Sense::Disj, xs),
                Quant::BlindAll => Game::blind(Sense::Conj, xs),
                Quant::BlindEx => Game::blind(Sense::Disj, xs),
            }
        }
        Formula::Rec(r, a) => {
            let a = go(a);
            let n = bounds.branches;
            match r {
                Rec::Branching => Game::br_rec(&a, n),
                Rec::BranchingCo => Game::br_corec(&a, n),
                Rec::Parallel => Game::pr_rec(&a, n),
                Rec::ParallelCo => Game::pr_corec(&a, n),
            }
        }
    }
}
