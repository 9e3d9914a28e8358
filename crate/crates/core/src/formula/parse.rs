use super::{bin, not, Atom, BinOp, Formula, Quant, Rec, Term};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{kind} at offset {pos}")]
pub struct ParseError {
    /// Byte offset into the input.
    pub pos: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    BadChar(char),
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: &'static str, found: String },
    #[error("reserved word {0:?} used as a name")]
    Reserved(String),
    #[error("symbol {name} used with arity {found}, earlier with {first}")]
    Arity { name: String, first: usize, found: usize },
    #[error("constants start at 1")]
    ZeroConstant,
    #[error("trailing input")]
    Trailing,
}

const RESERVED: &[&str] = &["true", "false", "all", "ex", "pall", "pex", "brc", "bcr", "prc", "pcr"];

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Tilde,
    Bang,
    Quest,
    PAnd,
    POr,
    CAnd,
    COr,
    Arrow,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Num(s) => format!("{s:?}"),
            Tok::Eof => "end of input".into(),
            other => format!("{other:?}"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        let next = chars.get(i + 1).map(|p| p.1);
        let (tok, width) = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            ',' => (Tok::Comma, 1),
            '.' => (Tok::Dot, 1),
            '~' | '¬' => (Tok::Tilde, 1),
            '!' => (Tok::Bang, 1),
            '?' => (Tok::Quest, 1),
            '&' | '⊓' => (Tok::CAnd, 1),
            '|' | '⊔' => (Tok::COr, 1),
            '∧' => (Tok::PAnd, 1),
            '∨' => (Tok::POr, 1),
            '→' => (Tok::Arrow, 1),
            '⊤' => (Tok::Ident("true".into()), 1),
            '⊥' => (Tok::Ident("false".into()), 1),
            '/' if next == Some('\\') => (Tok::PAnd, 2),
            '\\' if next == Some('/') => (Tok::POr, 2),
            '-' if next == Some('>') => (Tok::Arrow, 2),
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].1.is_ascii_digit() {
                    j += 1;
                }
                let s: String = chars[i..j].iter().map(|p| p.1).collect();
                (Tok::Num(s), j - i)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].1.is_ascii_alphanumeric() || chars[j].1 == '_' || chars[j].1 == '\'')
                {
                    j += 1;
                }
                let s: String = chars[i..j].iter().map(|p| p.1).collect();
                (Tok::Ident(s), j - i)
            }
            other => return Err(ParseError { pos, kind: ParseErrorKind::BadChar(other) }),
        };
        out.push((pos, tok));
        i += width;
    }
    out.push((src.len(), Tok::Eof));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    arities: Vec<(String, usize)>,
}

/// Parses the ASCII formula grammar.
///
/// Precedence from loosest: `->` (right), `\/` `|` (left), `/\` `&` (left),
/// then the prefixes `~`, `!x.`, `?x.`, `all x.`, `ex x.`, `pall x.`,
/// `pex x.`, `brc`, `bcr`, `prc`, `pcr`.
pub fn parse(src: &str) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: lex(src)?, at: 0, arities: Vec::new() };
    let f = p.implication()?;
    if p.peek() != &Tok::Eof {
        return Err(p.error(ParseErrorKind::Trailing));
    }
    Ok(f)
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if t != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { pos: self.pos(), kind }
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        self.error(ParseErrorKind::Unexpected { expected, found: self.peek().describe() })
    }

    fn expect(&mut self, t: Tok, expected: &'static str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(bin(BinOp::Implies, lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        loop {
            let op = match self.peek() {
                Tok::POr => BinOp::POr,
                Tok::COr => BinOp::COr,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.conjunction()?;
            lhs = bin(op, lhs, rhs);
        }
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.prefix()?;
        loop {
            let op = match self.peek() {
                Tok::PAnd => BinOp::PAnd,
                Tok::CAnd => BinOp::CAnd,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.prefix()?;
            lhs = bin(op, lhs, rhs);
        }
    }

    fn binder(&mut self, q: Quant) -> Result<Formula, ParseError> {
        let x = self.variable()?;
        self.expect(Tok::Dot, "'.' after bound variable")?;
        let body = self.prefix()?;
        Ok(Formula::Quant(q, x, Box::new(body)))
    }

    fn variable(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if RESERVED.contains(&s.as_str()) => Err(self.error(ParseErrorKind::Reserved(s))),
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("variable")),
        }
    }

    fn prefix(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(not(self.prefix()?))
            }
            Tok::Bang => {
                self.bump();
                self.binder(Quant::ChoiceAll)
            }
            Tok::Quest => {
                self.bump();
                self.binder(Quant::ChoiceEx)
            }
            Tok::LParen => {
                self.bump();
                let f = self.implication()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(f)
            }
            Tok::Ident(word) => {
                let quant = match word.as_str() {
                    "all" => Some(Quant::BlindAll),
                    "ex" => Some(Quant::BlindEx),
                    "pall" => Some(Quant::ParAll),
                    "pex" => Some(Quant::ParEx),
                    _ => None,
                };
                let rec = match word.as_str() {
                    "brc" => Some(Rec::Branching),
                    "bcr" => Some(Rec::BranchingCo),
                    "prc" => Some(Rec::Parallel),
                    "pcr" => Some(Rec::ParallelCo),
                    _ => None,
                };
                if let Some(q) = quant {
                    self.bump();
                    return self.binder(q);
                }
                if let Some(r) = rec {
                    self.bump();
                    return Ok(Formula::Rec(r, Box::new(self.prefix()?)));
                }
                match word.as_str() {
                    "true" => {
                        self.bump();
                        Ok(Formula::Top)
                    }
                    "false" => {
                        self.bump();
                        Ok(Formula::Bottom)
                    }
                    _ => self.atom(word),
                }
            }
            _ => Err(self.unexpected("formula")),
        }
    }

    fn atom(&mut self, name: String) -> Result<Formula, ParseError> {
        let start = self.pos();
        self.bump();
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            loop {
                args.push(self.term()?);
                match self.bump() {
                    Tok::Comma => continue,
                    Tok::RParen => break,
                    _ => {
                        self.at -= 1;
                        return Err(self.unexpected("',' or ')'"));
                    }
                }
            }
        }
        match self.arities.iter().find(|(n, _)| *n == name) {
            Some(&(_, first)) if first != args.len() => {
                return Err(ParseError { pos: start, kind: ParseErrorKind::Arity { name, first, found: args.len() } })
            }
            Some(_) => {}
            None => self.arities.push((name.clone(), args.len())),
        }
        Ok(Formula::Atom(Atom::new(name, args)))
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Num(s) => {
                let pos = self.pos();
                self.bump();
                match s.parse::<u32>() {
                    Ok(0) => Err(ParseError { pos, kind: ParseErrorKind::ZeroConstant }),
                    Ok(c) => Ok(Term::Const(c)),
                    Err(_) => {
                        Err(ParseError { pos, kind: ParseErrorKind::Unexpected { expected: "constant", found: s } })
                    }
                }
            }
            Tok::Ident(_) => Ok(Term::Var(self.variable()?)),
            _ => Err(self.unexpected("term")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{atom, quant, var, AtomKind};

    #[test]
    fn choice_implication_shape() {
        let f = parse("(true | false) -> ((false | true) /\\ true)").unwrap();
        let want = bin(
            BinOp::Implies,
            bin(BinOp::COr, Formula::Top, Formula::Bottom),
            bin(BinOp::PAnd, bin(BinOp::COr, Formula::Bottom, Formula::Top), Formula::Top),
        );
        assert_eq!(f, want);
    }

    #[test]
    fn single_elementary_atom() {
        match parse("p").unwrap() {
            Formula::Atom(a) => {
                assert_eq!(a.kind, AtomKind::Elementary);
                assert_eq!(a.arity(), 0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nested_choice_quantifiers() {
        let f = parse("!x.?y.(P(x) -> P(y))").unwrap();
        let body = bin(BinOp::Implies, atom("P", &[var("x")]), atom("P", &[var("y")]));
        let want = quant(Quant::ChoiceAll, "x", quant(Quant::ChoiceEx, "y", body));
        assert_eq!(f, want);
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse("a -> b -> c").unwrap();
        assert_eq!(f, parse("a -> (b -> c)").unwrap());
        let g = parse("a \\/ b | c /\\ d & e").unwrap();
        assert_eq!(g, parse("(a \\/ b) | ((c /\\ d) & e)").unwrap());
        let h = parse("!x.P(x) -> Q").unwrap();
        assert!(matches!(h, Formula::Bin(BinOp::Implies, ..)));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("p -> ").unwrap_err();
        assert_eq!(e.pos, 5);
        let e = parse("P(x) /\\ P").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Arity { .. }));
        assert_eq!(e.pos, 8);
        let e = parse("all true. p").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Reserved(_)));
        let e = parse("p(0)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::ZeroConstant);
        assert!(matches!(parse("p q").unwrap_err().kind, ParseErrorKind::Trailing));
        assert!(matches!(parse("p # q").unwrap_err().kind, ParseErrorKind::BadChar('#')));
    }

    #[test]
    fn unicode_connectives() {
        assert_eq!(parse("¬p ∧ q → ⊤").unwrap(), parse("~p /\\ q -> true").unwrap());
    }
}
