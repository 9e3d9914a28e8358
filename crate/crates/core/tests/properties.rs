//! Property tests over generated formulas, proofs and games.

use std::sync::Arc;

use proptest::prelude::*;

use clwork::formula::{parse, BinOp, Formula, Quant, Rec, Term};
use clwork::game::{is_static, same_game, ExplicitGame, ExplicitRecord, Game, LabeledMove, Player, Run, Valuation};
use clwork::proof::{check_proof, measure, prove_cl1, prove_cl2, Proof};

fn atom(name: &str, args: Vec<Term>) -> Formula {
    clwork::formula::atom(name, &args)
}

fn term() -> impl Strategy<Value = Term> {
    prop_oneof![
        prop::sample::select(vec!["x", "y"]).prop_map(|v| Term::Var(v.to_string())),
        (1u32..4).prop_map(Term::Const),
    ]
}

/// Formulas of every dialect; each symbol keeps one arity.
fn any_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::Top),
        Just(Formula::Bottom),
        prop::sample::select(vec!["p", "q", "P", "Q"]).prop_map(|n| atom(n, vec![])),
        term().prop_map(|t| atom("r", vec![t])),
        (term(), term()).prop_map(|(a, b)| atom("E", vec![a, b])),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let bin = prop::sample::select(vec![BinOp::PAnd, BinOp::POr, BinOp::Implies, BinOp::CAnd, BinOp::COr]);
        let quant = prop::sample::select(vec![
            Quant::BlindAll,
            Quant::BlindEx,
            Quant::ChoiceAll,
            Quant::ChoiceEx,
            Quant::ParAll,
            Quant::ParEx,
        ]);
        let rec = prop::sample::select(vec![Rec::Branching, Rec::BranchingCo, Rec::Parallel, Rec::ParallelCo]);
        prop_oneof![
            inner.clone().prop_map(|a| Formula::Not(Box::new(a))),
            (bin, inner.clone(), inner.clone()).prop_map(|(op, a, b)| Formula::Bin(op, Box::new(a), Box::new(b))),
            (quant, prop::sample::select(vec!["x", "y"]), inner.clone()).prop_map(|(q, x, a)| Formula::Quant(
                q,
                x.to_string(),
                Box::new(a)
            )),
            (rec, inner).prop_map(|(r, a)| Formula::Rec(r, Box::new(a))),
        ]
    })
}

/// Quantifier-free formulas over `p`, `q`, `r` and the given general letters.
fn propositional(general: Vec<&'static str>) -> impl Strategy<Value = Formula> {
    let mut names = vec!["p", "q", "r"];
    names.extend(general);
    let leaf = prop::sample::select(names).prop_map(|n| atom(n, vec![]));
    leaf.prop_recursive(4, 16, 2, |inner| {
        let bin = prop::sample::select(vec![BinOp::PAnd, BinOp::POr, BinOp::Implies, BinOp::CAnd, BinOp::COr]);
        prop_oneof![
            inner.clone().prop_map(|a| Formula::Not(Box::new(a))),
            (bin, inner.clone(), inner).prop_map(|(op, a, b)| Formula::Bin(op, Box::new(a), Box::new(b))),
        ]
    })
}

/// Elementary classical formulas: no choice operators, no general letters.
fn classical() -> impl Strategy<Value = Formula> {
    let leaf = prop::sample::select(vec!["p", "q", "r", "s"]).prop_map(|n| atom(n, vec![]));
    leaf.prop_recursive(4, 16, 2, |inner| {
        let bin = prop::sample::select(vec![BinOp::PAnd, BinOp::POr, BinOp::Implies]);
        prop_oneof![
            inner.clone().prop_map(|a| Formula::Not(Box::new(a))),
            (bin, inner.clone(), inner).prop_map(|(op, a, b)| Formula::Bin(op, Box::new(a), Box::new(b))),
        ]
    })
}

fn truth(f: &Formula, row: u32) -> bool {
    match f {
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Atom(a) => row >> (a.name.as_bytes()[0] - b'p') & 1 == 1,
        Formula::Not(a) => !truth(a, row),
        Formula::Bin(BinOp::PAnd, a, b) => truth(a, row) && truth(b, row),
        Formula::Bin(BinOp::POr, a, b) => truth(a, row) || truth(b, row),
        Formula::Bin(BinOp::Implies, a, b) => !truth(a, row) || truth(b, row),
        other => unreachable!("not classical: {other}"),
    }
}

fn premises_shrink(p: &Proof) -> Result<(), String> {
    for n in &p.nodes {
        for &k in &n.premises {
            let prem = p.node(k).ok_or_else(|| format!("node {} cites missing {k}", n.id))?;
            if measure(&prem.formula) >= measure(&n.formula) {
                return Err(format!("premise {k} of node {} does not shrink", n.id));
            }
        }
    }
    Ok(())
}

/// Random explicit game tree of depth at most 3 over two symbols playable by
/// both sides.
fn explicit_game() -> impl Strategy<Value = Game> {
    game_over(&["T:a", "T:b", "B:a", "B:b"])
}

/// Random explicit game tree of depth at most 3 over at most four labeled
/// moves.
fn game_over(moves: &[&str]) -> impl Strategy<Value = Game> {
    let alphabet: Vec<LabeledMove> = moves.iter().map(|s| s.parse().unwrap()).collect();
    let node = (any::<bool>(), prop::collection::vec(any::<bool>(), 4));
    prop::collection::vec(node, 85).prop_map(move |slots| {
        let mut records = Vec::new();
        // Slot i has children 4i+1..=4i+4, one per labeled move.
        let mut stack = vec![(0usize, Vec::<LabeledMove>::new())];
        while let Some((i, at)) = stack.pop() {
            let (won, present) = &slots[i];
            let mut children = Vec::new();
            for (k, m) in alphabet.iter().enumerate() {
                let child = 4 * i + 1 + k;
                if at.len() < 3 && present[k] && child < slots.len() {
                    children.push(m.clone());
                    let mut next = at.clone();
                    next.push(m.clone());
                    stack.push((child, next));
                }
            }
            let winner = if *won { Player::Machine } else { Player::Environment };
            records.push(ExplicitRecord { position: Run(at), winner, children });
        }
        Game::explicit(Arc::new(ExplicitGame::from_records(records).expect("generated trees are prefix closed")))
    })
}

const DEPTH: usize = 8;

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn printed_formulas_parse_back(f in any_formula()) {
        let text = f.to_string();
        prop_assert_eq!(parse(&text).unwrap(), f, "{}", text);
    }

    #[test]
    fn cl1_decides_classical_validity(f in classical()) {
        let valid = (0..16).all(|row| truth(&f, row));
        let proof = prove_cl1(&f).unwrap();
        prop_assert_eq!(proof.is_some(), valid, "{}", f);
    }

    #[test]
    fn found_proofs_check_and_shrink(f in propositional(vec!["P", "Q"])) {
        if let Some(p) = prove_cl2(&f).unwrap() {
            prop_assert!(check_proof(&p).is_ok(), "{}", f);
            prop_assert_eq!(p.theorem(), Some(&f));
            premises_shrink(&p).map_err(TestCaseError::fail)?;
            prop_assert_eq!(Proof::from_json(&p.to_json()).unwrap(), p);
        }
    }

    #[test]
    fn negation_is_an_involution(a in explicit_game()) {
        prop_assert!(same_game(&a, &Game::neg(&Game::neg(&a)), DEPTH));
    }

    #[test]
    fn de_morgan(a in explicit_game(), b in explicit_game()) {
        let n = Game::neg;
        prop_assert!(same_game(&Game::pand(&a, &b), &n(&Game::por(&n(&a), &n(&b))), DEPTH));
        prop_assert!(same_game(&Game::cor(&a, &b), &n(&Game::cand(&n(&a), &n(&b))), DEPTH));
        prop_assert!(same_game(&Game::implies(&a, &b), &Game::por(&n(&a), &b), DEPTH));
    }

    #[test]
    fn prefixation_by_a_run_is_stepwise(a in explicit_game(), b in explicit_game(), picks in prop::collection::vec(0usize..16, 0..5)) {
        let g = Game::pand(&a, &b);
        let mut run = Vec::new();
        let mut at = g.clone();
        for k in picks {
            let moves = at.labeled_moves();
            if moves.is_empty() {
                break;
            }
            let m = moves[k % moves.len()].clone();
            at = at.after(&m).unwrap();
            run.push(m);
        }
        prop_assert!(same_game(&g.prefix(&run).unwrap(), &at, DEPTH));
    }

    #[test]
    fn operations_preserve_static_games(a in game_over(&["T:a", "T:b"]), b in game_over(&["B:a", "B:b"])) {
        // One-player games are static: a run has no delays but itself.
        prop_assert!(is_static(&a, 4, 100_000).unwrap() && is_static(&b, 4, 100_000).unwrap());
        for g in [Game::pand(&a, &b), Game::por(&a, &b), Game::cand(&a, &b), Game::cor(&b, &a), Game::neg(&a), Game::implies(&b, &a)] {
            prop_assert!(is_static(&g, 4, 10_000_000).unwrap());
        }
    }

    #[test]
    fn runs_and_valuations_round_trip(moves in prop::collection::vec((any::<bool>(), "[12]\\.[ab]"), 0..6), x in 1u32..9, y in 1u32..9) {
        let run = Run(moves.into_iter().map(|(t, mv)| LabeledMove::new(if t { Player::Machine } else { Player::Environment }, mv)).collect());
        prop_assert_eq!(run.to_string().parse::<Run>().unwrap(), run);
        let e = Valuation::default().with("x", x).with("y", y);
        prop_assert_eq!(format!("x={x}, y={y}").parse::<Valuation>().unwrap(), e);
    }
}
