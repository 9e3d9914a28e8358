use std::fmt;

use super::{Atom, BinOp, Formula, Quant, Rec};

const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const PREFIX: u8 = 4;

fn level(f: &Formula) -> u8 {
    match f {
        Formula::Bin(BinOp::Implies, ..) => IMP,
        Formula::Bin(BinOp::POr | BinOp::COr, ..) => OR,
        Formula::Bin(BinOp::PAnd | BinOp::CAnd, ..) => AND,
        _ => PREFIX,
    }
}

fn op_text(op: BinOp) -> &'static str {
    match op {
        BinOp::PAnd => "/\\",
        BinOp::POr => "\\/",
        BinOp::Implies => "->",
        BinOp::CAnd => "&",
        BinOp::COr => "|",
    }
}

fn quant_text(q: Quant) -> &'static str {
    match q {
        Quant::ChoiceAll => "!",
        Quant::ChoiceEx => "?",
        Quant::BlindAll => "all ",
        Quant::BlindEx => "ex ",
        Quant::ParAll => "pall ",
        Quant::ParEx => "pex ",
    }
}

fn rec_text(r: Rec) -> &'static str {
    match r {
        Rec::Branching => "brc",
        Rec::BranchingCo => "bcr",
        Rec::Parallel => "prc",
        Rec::ParallelCo => "pcr",
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, t) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn child(f: &mut fmt::Formatter<'_>, g: &Formula, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({g})")
    } else {
        write!(f, "{g}")
    }
}

/// Canonical text with minimal parentheses; `parse` inverts it exactly.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Top => f.write_str("true"),
            Formula::Bottom => f.write_str("false"),
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(a) => {
                f.write_str("~")?;
                child(f, a, level(a) < PREFIX)
            }
            Formula::Quant(q, x, a) => {
                write!(f, "{}{x}. ", quant_text(*q))?;
                child(f, a, level(a) < PREFIX)
            }
            Formula::Rec(r, a) => {
                write!(f, "{} ", rec_text(*r))?;
                child(f, a, level(a) < PREFIX)
            }
            Formula::Bin(op, a, b) => {
                let lv = level(self);
                let right_assoc = *op == BinOp::Implies;
                // Mixed operators of one level are parenthesized for readability.
                let mixed = |g: &Formula| matches!(g, Formula::Bin(o, ..) if o != op);
                child(f, a, level(a) < lv || (level(a) == lv && (right_assoc || mixed(a))))?;
                write!(f, " {} ", op_text(*op))?;
                child(f, b, level(b) < lv || (level(b) == lv && !right_assoc))
            }
        }
    }
}

/// Mathematical rendering with the usual connective symbols.
pub fn pretty(g: &Formula) -> String {
    fn go(g: &Formula, out: &mut String) {
        let wrap = |h: &Formula, parens: bool, out: &mut String| {
            if parens {
                out.push('(');
                go(h, out);
                out.push(')');
            } else {
                go(h, out);
            }
        };
        match g {
            Formula::Top => out.push('⊤'),
            Formula::Bottom => out.push('⊥'),
            Formula::Atom(a) => out.push_str(&a.to_string()),
            Formula::Not(a) => {
                out.push('¬');
                wrap(a, level(a) < PREFIX, out);
            }
            Formula::Quant(q, x, a) => {
                let sym = match q {
                    Quant::ChoiceAll => "⊓",
                    Quant::ChoiceEx => "⊔",
                    Quant::BlindAll => "∀",
                    Quant::BlindEx => "∃",
                    Quant::ParAll => "∧",
                    Quant::ParEx => "∨",
                };
                out.push_str(sym);
                out.push_str(x);
                wrap(a, level(a) < PREFIX, out);
            }
            Formula::Rec(r, a) => {
                out.push_str(match r {
                    Rec::Branching => "∘|",
                    Rec::BranchingCo => "∘¦",
                    Rec::Parallel => "∧|",
                    Rec::ParallelCo => "∨¦",
                });
                wrap(a, level(a) < PREFIX, out);
            }
            Formula::Bin(op, a, b) => {
                let lv = level(g);
                let right_assoc = *op == BinOp::Implies;
                let mixed = matches!(&**a, Formula::Bin(o, ..) if o != op);
                wrap(a, level(a) < lv || (level(a) == lv && (right_assoc || mixed)), out);
                out.push_str(match op {
                    BinOp::PAnd => " ∧ ",
                    BinOp::POr => " ∨ ",
                    BinOp::Implies => " → ",
                    BinOp::CAnd => " ⊓ ",
                    BinOp::COr => " ⊔ ",
                });
                wrap(b, level(b) < lv || (level(b) == lv && !right_assoc), out);
            }
        }
    }
    let mut out = String::new();
    go(g, &mut out);
    out
}
