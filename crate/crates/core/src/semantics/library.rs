//! Template shapes for general letters and exhaustive families built from them.

use std::collections::{BTreeMap, BTreeSet};

use crate::formula::{parse, Atom, AtomKind, Formula, Term};

use super::{Interpretation, Predicate, Template};

/// A game shape over elementary letters `a`, `b`, `c`, `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shape {
    pub name: &'static str,
    pub body: &'static str,
}

pub const SHAPES: &[Shape] = &[
    Shape { name: "letter", body: "a" },
    Shape { name: "or", body: "a | b" },
    Shape { name: "and", body: "a & b" },
    Shape { name: "and-of-ors", body: "(a | b) & (c | d)" },
    Shape { name: "or-of-ands", body: "(a & b) | (c & d)" },
    Shape { name: "par-mix", body: "(a | b) /\\ (c & d)" },
];

pub fn shape(name: &str) -> Option<Shape> {
    SHAPES.iter().copied().find(|s| s.name == name)
}

impl Shape {
    /// Template for a general letter `symbol` of the given arity. Letter `a`
    /// of the shape becomes the elementary letter `<symbol>_a` applied to the
    /// parameters `x1..xn`. Returns the template and the letters it uses.
    pub fn instantiate(&self, symbol: &str, arity: usize) -> (Template, Vec<String>) {
        let params: Vec<String> = (1..=arity).map(|i| format!("x{i}")).collect();
        let args: Vec<Term> = params.iter().map(|p| Term::Var(p.clone())).collect();
        let body = parse(self.body).expect("library shapes parse");
        let mut letters = BTreeSet::new();
        let body = body.map_atoms(&mut |a| {
            let name = format!("{}_{}", symbol.to_lowercase(), a.name);
            letters.insert(name.clone());
            Formula::Atom(Atom::new(name, args.clone()))
        });
        (Template::Formula { params, body, cases: Vec::new() }, letters.into_iter().collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("family needs 2^{cells} members, over the limit of {limit}")]
pub struct FamilyTooLarge {
    pub cells: usize,
    pub limit: usize,
}

/// Every interpretation extending `base` in which each general letter of `f`
/// missing from `base` gets the shape named in `shapes`, and every
/// elementary letter missing from `base` ranges over all truth tables on
/// `1..=universe`.
pub fn enumerate_family(
    f: &Formula,
    base: &Interpretation,
    shapes: &BTreeMap<String, Shape>,
    universe: u32,
    limit: usize,
) -> Result<Vec<Interpretation>, FamilyTooLarge> {
    let mut star = base.clone();
    let mut free: BTreeMap<String, usize> = BTreeMap::new();
    let arities = f.arity_table().unwrap_or_default();
    for (name, &n) in &arities {
        match AtomKind::of_name(name) {
            AtomKind::General if !star.general.contains_key(name) => {
                let s = shapes.get(name).copied().unwrap_or(SHAPES[0]);
                let (t, letters) = s.instantiate(name, n);
                star.general.insert(name.clone(), t);
                for l in letters {
                    free.insert(l, n);
                }
            }
            AtomKind::Elementary if !star.elementary.contains_key(name) => {
                free.insert(name.clone(), n);
            }
            _ => {}
        }
    }
    let mut cells: Vec<(String, Vec<u32>)> = Vec::new();
    for (name, &n) in &free {
        let tuples = (0..n).fold(vec![Vec::new()], |acc, _| {
            acc.iter().flat_map(|t: &Vec<u32>| (1..=universe).map(move |c| [t.clone(), vec![c]].concat())).collect()
        });
        cells.extend(tuples.into_iter().map(|t| (name.clone(), t)));
    }
    if cells.len() >= usize::BITS as usize || (1usize << cells.len()) > limit {
        return Err(FamilyTooLarge { cells: cells.len(), limit });
    }
    let mut out = Vec::with_capacity(1 << cells.len());
    for bits in 0..(1usize << cells.len()) {
        let mut member = star.clone();
        for name in free.keys() {
            member.elementary.insert(name.clone(), Predicate::Table { true_at: BTreeSet::new() });
        }
        for (i, (name, tuple)) in cells.iter().enumerate() {
            if bits >> i & 1 == 1 {
                if let Some(Predicate::Table { true_at }) = member.elementary.get_mut(name) {
                    true_at.insert(tuple.clone());
                }
            }
        }
        out.push(member);
    }
    Ok(out)
}
