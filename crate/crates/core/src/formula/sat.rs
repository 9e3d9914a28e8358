//! Propositional satisfiability: Tseitin encoding into clauses and a DPLL
//! search with unit propagation.

#[derive(Clone, Debug)]
pub(crate) enum Prop {
    Const(bool),
    Var(usize),
    Not(Box<Prop>),
    And(Vec<Prop>),
    Or(Vec<Prop>),
}

struct Encoder {
    next: i32,
    clauses: Vec<Vec<i32>>,
}

impl Encoder {
    fn fresh(&mut self) -> i32 {
        self.next += 1;
        self.next
    }

    /// Literal equivalent to `p`; letter `i` is variable `i + 1`.
    fn lit(&mut self, p: &Prop) -> i32 {
        match p {
            Prop::Const(b) => {
                let v = self.fresh();
                self.clauses.push(vec![if *b { v } else { -v }]);
                v
            }
            Prop::Var(i) => *i as i32 + 1,
            Prop::Not(a) => -self.lit(a),
            Prop::And(xs) => {
                let lits: Vec<i32> = xs.iter().map(|x| self.lit(x)).collect();
                let v = self.fresh();
                for &l in &lits {
                    self.clauses.push(vec![-v, l]);
                }
                let mut back: Vec<i32> = lits.iter().map(|l| -l).collect();
                back.push(v);
                self.clauses.push(back);
                v
            }
            Prop::Or(xs) => {
                let lits: Vec<i32> = xs.iter().map(|x| self.lit(x)).collect();
                let v = self.fresh();
                for &l in &lits {
                    self.clauses.push(vec![-l, v]);
                }
                let mut fwd = lits;
                fwd.push(-v);
                self.clauses.push(fwd);
                v
            }
        }
    }
}

/// A satisfying assignment of the first `letters` variables, if any.
pub(crate) fn satisfy(p: &Prop, letters: usize) -> Option<Vec<bool>> {
    let mut enc = Encoder { next: letters as i32, clauses: Vec::new() };
    let root = enc.lit(p);
    enc.clauses.push(vec![root]);
    let mut assign = vec![0i8; enc.next as usize + 1];
    if dpll(&enc.clauses, &mut assign) {
        Some((1..=letters).map(|v| assign[v] > 0).collect())
    } else {
        None
    }
}

fn value(assign: &[i8], lit: i32) -> i8 {
    let v = assign[lit.unsigned_abs() as usize];
    if lit > 0 {
        v
    } else {
        -v
    }
}

fn dpll(clauses: &[Vec<i32>], assign: &mut Vec<i8>) -> bool {
    let mut trail = Vec::new();
    let undo = |trail: &[usize], assign: &mut Vec<i8>| trail.iter().for_each(|&v| assign[v] = 0);
    loop {
        let mut changed = false;
        for c in clauses {
            let mut open = None;
            let mut count = 0;
            let mut sat = false;
            for &l in c {
                match value(assign, l) {
                    1 => {
                        sat = true;
                        break;
                    }
                    0 => {
                        count += 1;
                        open = Some(l);
                    }
                    _ => {}
                }
            }
            if sat {
                continue;
            }
            match (count, open) {
                (0, _) => {
                    undo(&trail, assign);
                    return false;
                }
                (1, Some(l)) => {
                    let v = l.unsigned_abs() as usize;
                    assign[v] = if l > 0 { 1 } else { -1 };
                    trail.push(v);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }
    let branch = clauses.iter().find_map(|c| {
        if c.iter().any(|&l| value(assign, l) == 1) {
            return None;
        }
        c.iter().find(|&&l| value(assign, l) == 0).copied()
    });
    let Some(lit) = branch else {
        return true;
    };
    let v = lit.unsigned_abs() as usize;
    for val in [1i8, -1] {
        assign[v] = val;
        if dpll(clauses, assign) {
            return true;
        }
    }
    assign[v] = 0;
    undo(&trail, assign);
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_instances() {
        let x = || Prop::Var(0);
        let contradiction = Prop::And(vec![x(), Prop::Not(Box::new(x()))]);
        assert!(satisfy(&contradiction, 1).is_none());
        let m = satisfy(&Prop::Or(vec![Prop::Const(false), Prop::Not(Box::new(x()))]), 1).unwrap();
        assert_eq!(m, vec![false]);
        assert!(satisfy(&Prop::And(vec![]), 0).is_some());
        assert!(satisfy(&Prop::Or(vec![]), 0).is_none());
    }
}
