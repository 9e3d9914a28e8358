use super::{Formula, OccurrencePath, Term};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("substituting {term} for {var} is captured by the binder at {binder}")]
pub struct CaptureError {
    pub var: String,
    pub term: Term,
    pub binder: OccurrencePath,
}

impl Formula {
    /// `F(x/t)`: replaces every free occurrence of `x` by `t`.
    pub fn substitute(&self, x: &str, t: &Term) -> Result<Formula, CaptureError> {
        fn go(
            f: &Formula,
            x: &str,
            t: &Term,
            path: OccurrencePath,
            capturing: Option<&OccurrencePath>,
        ) -> Result<Formula, CaptureError> {
            Ok(match f {
                Formula::Top | Formula::Bottom => f.clone(),
                Formula::Atom(a) => {
                    let mut a = a.clone();
                    for arg in a.args.iter_mut() {
                        if matches!(arg, Term::Var(v) if v == x) {
                            if let Some(binder) = capturing {
                                return Err(CaptureError {
                                    var: x.to_string(),
                                    term: t.clone(),
                                    binder: binder.clone(),
                                });
                            }
                            *arg = t.clone();
                        }
                    }
                    Formula::Atom(a)
                }
                Formula::Quant(_, y, _) if y == x => f.clone(),
                Formula::Quant(q, y, body) => {
                    let binds_t = matches!(t, Term::Var(v) if v == y);
                    let cap = if binds_t && capturing.is_none() { Some(&path) } else { capturing };
                    Formula::Quant(*q, y.clone(), Box::new(go(body, x, t, path.child(0), cap)?))
                }
                Formula::Not(a) => Formula::Not(Box::new(go(a, x, t, path.child(0), capturing)?)),
                Formula::Rec(r, a) => Formula::Rec(*r, Box::new(go(a, x, t, path.child(0), capturing)?)),
                Formula::Bin(op, a, b) => Formula::Bin(
                    *op,
                    Box::new(go(a, x, t, path.child(1), capturing)?),
                    Box::new(go(b, x, t, path.child(2), capturing)?),
                ),
            })
        }
        if matches!(t, Term::Var(v) if v == x) {
            return Ok(self.clone());
        }
        go(self, x, t, OccurrencePath::root(), None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    #[test]
    fn replaces_free_occurrences_only() {
        let f = parse("lt(x,y) /\\ all x. p(x)").unwrap();
        let g = f.substitute("x", &Term::Const(3)).unwrap();
        assert_eq!(g, parse("lt(3,y) /\\ all x. p(x)").unwrap());
    }

    #[test]
    fn identity_substitution() {
        let f = parse("!y. P(x,y)").unwrap();
        assert_eq!(f.substitute("x", &Term::Var("x".into())).unwrap(), f);
    }

    #[test]
    fn capture_reports_binder() {
        let f = parse("p /\\ all t. P(x)").unwrap();
        let err = f.substitute("x", &Term::Var("t".into())).unwrap_err();
        assert_eq!(err.binder.to_string(), "2");
        // A binder on t without free x below it is harmless.
        let g = parse("P(x) /\\ all t. P(t)").unwrap();
        assert!(g.substitute("x", &Term::Var("t".into())).is_ok());
    }
}
