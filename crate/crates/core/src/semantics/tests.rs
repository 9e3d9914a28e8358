use std::collections::BTreeMap;

use super::library::{enumerate_family, shape, SHAPES};
use super::*;
use crate::formula::parse;
use crate::game::{same_game, Game, Run};

fn f(s: &str) -> Formula {
    parse(s).unwrap()
}

fn run(s: &str) -> Run {
    s.parse().unwrap()
}

fn odd_star() -> Interpretation {
    Interpretation::default()
        .with_predicate("odd", Predicate::Builtin(Builtin::Odd))
        .with_template("Odd", Template::formula(&["x1"], f("odd(x1)")))
}

fn winner(formula: &str, star: &Interpretation, bounds: Bounds, r: &str) -> Adjudication {
    adjudicate(&f(formula), star, &bounds, &Valuation::default(), &run(r)).unwrap()
}

#[test]
fn choice_implication_runs() {
    let g = "(true | false) -> ((false | true) /\\ true)";
    let star = Interpretation::default();
    let b = Bounds::default();
    for (r, w) in [
        ("B:1.1 T:2.1.2", Player::Machine),
        ("", Player::Machine),
        ("B:1.1", Player::Environment),
        ("T:2.1.2", Player::Machine),
    ] {
        let a = winner(g, &star, b, r);
        assert!(a.legal);
        assert_eq!(a.winner, w, "{r}");
    }
    let a = winner(g, &star, b, "T:1.1");
    assert_eq!((a.legal, a.blame), (false, Some(Player::Machine)));
}

#[test]
fn quantified_odd_runs() {
    let star = odd_star();
    let b = Bounds::universe(3);
    assert_eq!(winner("!x. (Odd(x) | ~Odd(x))", &star, b, "B:3 T:1").winner, Player::Machine);
    for r in ["", "T:1", "T:2"] {
        let a = winner("all x. (Odd(x) | ~Odd(x))", &star, b, r);
        assert!(a.legal);
        assert_eq!(a.winner, Player::Environment, "{r}");
    }
    assert_eq!(winner("ex x. (Odd(x) | ~Odd(x))", &star, b, "").winner, Player::Environment);
    assert_eq!(winner("ex x. (Odd(x) | ~Odd(x))", &star, b, "T:2").winner, Player::Machine);
    assert_eq!(winner("pex x. (Odd(x) | ~Odd(x))", &star, b, "T:2.1").winner, Player::Environment);
    assert_eq!(winner("pex x. (Odd(x) | ~Odd(x))", &star, b, "T:2.2").winner, Player::Machine);
    let pall = "pall x. (Odd(x) | ~Odd(x))";
    assert_eq!(winner(pall, &star, b, "T:1.1 T:2.2 T:3.1").winner, Player::Machine);
    for r in ["", "T:1.1", "T:1.1 T:2.2", "T:2.2 T:3.1"] {
        assert_eq!(winner(pall, &star, b, r).winner, Player::Environment, "{r}");
    }
}

#[test]
fn bring_down_of_parallel_choice_run() {
    let g0 = f("(A & (B | C)) /\\ (D \\/ (E | F))");
    let mut star = Interpretation::default().with_letter("t", true);
    for p in ["A", "B", "C", "D", "E", "F"] {
        star = star.with_template(p, Template::formula(&[], f("t")));
    }
    let chain = trace(&g0, &star, &Bounds::default(), &Valuation::default(), &run("T:2.2.1 B:1.2 T:1.2")).unwrap();
    let texts: Vec<String> = chain.iter().map(|s| s.position.to_string()).collect();
    assert_eq!(
        texts,
        [
            "(A & (B | C)) /\\ (D \\/ (E | F))",
            "(A & (B | C)) /\\ (D \\/ E)",
            "(B | C) /\\ (D \\/ E)",
            "C /\\ (D \\/ E)",
        ]
    );
}

#[test]
fn bring_down_under_blind_quantifier() {
    let g0 = f("all x. ((E(x,4) | ~E(x,4)) -> !y. (E(x,y) | ~E(x,y)))");
    let star = Interpretation::default()
        .with_predicate("ev", Predicate::Builtin(Builtin::SumEven))
        .with_template("E", Template::formula(&["x1", "x2"], f("ev(x1,x2)")));
    let b = Bounds::universe(7);
    let chain = trace(&g0, &star, &b, &Valuation::default(), &run("B:2.7 B:1.2 T:2.1")).unwrap();
    let expected = [
        "all x. ((E(x,4) | ~E(x,4)) -> !y. (E(x,y) | ~E(x,y)))",
        "all x. ((E(x,4) | ~E(x,4)) -> (E(x,7) | ~E(x,7)))",
        "all x. (~E(x,4) -> (E(x,7) | ~E(x,7)))",
        "all x. (~E(x,4) -> E(x,7))",
    ];
    for (s, want) in chain.iter().zip(expected) {
        assert_eq!(s.position.to_formula().unwrap(), f(want));
    }
    let last = chain[3].position.to_formula().unwrap().normalize_implications();
    assert_eq!(last, f("all x. (E(x,4) \\/ E(x,7))"));
    assert_eq!(chain.last().unwrap().game.winner(), Player::Machine);
    for w in chain.windows(2) {
        let stepped = w[0].game.after(w[1].mv.as_ref().unwrap()).unwrap();
        assert!(same_game(&stepped, &w[1].game, 4));
    }
}

#[test]
fn trace_rejects_illegal_run() {
    let err = trace(
        &f("p | q"),
        &Interpretation::default().with_letter("p", true).with_letter("q", false),
        &Bounds::default(),
        &Valuation::default(),
        &run("B:1"),
    )
    .unwrap_err();
    assert_eq!(err, SemanticsError::Illegal { index: 0, blame: Player::Environment });
}

#[test]
fn annotated_atom_positions() {
    let star = Interpretation::default()
        .with_letter("a", true)
        .with_letter("b", false)
        .with_template("P", Template::formula(&[], f("a | b")));
    let chain = trace(&f("P -> P"), &star, &Bounds::default(), &Valuation::default(), &run("B:1.1 T:2.1")).unwrap();
    assert_eq!(chain[1].position.to_string(), "P<T:1> -> P");
    assert_eq!(chain[2].position.to_string(), "P<T:1> -> P<T:1>");
    assert_eq!(chain[2].game.winner(), Player::Machine);
}

#[test]
fn admissibility_conditions() {
    let b = Bounds::default();
    let star = Interpretation::default().with_letter("a", true).with_letter("c", true).with_template(
        "P",
        Template::Formula {
            params: vec!["x1".into()],
            body: f("a"),
            cases: vec![Case { args: vec![2], body: f("a | c") }],
        },
    );
    let err = interpret(&f("all x. P(x)"), &star, &b).unwrap_err();
    assert!(matches!(err, SemanticsError::NotUnistructural { ref var, .. } if var == "x"), "{err}");
    assert!(interpret(&f("!x. P(x)"), &star, &b).is_ok());
    let leaky = Interpretation::default()
        .with_predicate("a", Predicate::Const(true))
        .with_template("P", Template::formula(&[], f("a(y)")));
    assert!(matches!(interpret(&f("P"), &leaky, &b), Err(SemanticsError::Dependence { .. })));
    assert!(matches!(interpret(&f("q"), &star, &b), Err(SemanticsError::Uninterpreted { .. })));
}

#[test]
fn interpretation_file_round_trip() {
    let star =
        odd_star().with_predicate("r", Predicate::Table { true_at: [vec![1, 2]].into() }).with_letter("p", false);
    let text = star.to_json();
    assert_eq!(Interpretation::from_json(&text).unwrap(), star);
    let fam = vec![star.clone(), Interpretation::default()];
    assert_eq!(Interpretation::family_from_json(&Interpretation::family_to_json(&fam)).unwrap(), fam);
    assert_eq!(Interpretation::family_from_json(&text).unwrap(), vec![star]);
}

#[test]
fn elementary_formulas_give_classical_truth() {
    let star = Interpretation::default().with_letter("p", true).with_letter("q", false);
    let g = interpret(&f("(p -> q) \\/ ~q"), &star, &Bounds::default()).unwrap().at(&Valuation::default());
    assert_eq!(g.winner(), Player::Machine);
    assert!(g.labeled_moves().is_empty());
}

#[test]
fn solver_basics() {
    let w = |g: &Game| winnable(g, 100_000).unwrap().winnable;
    assert!(w(&Game::cor(&Game::bottom(), &Game::top())));
    assert!(!w(&Game::cor(&Game::bottom(), &Game::bottom())));
    let sol = winnable(&Game::cor(&Game::bottom(), &Game::top()), 100).unwrap();
    let mut s = sol.strategy.unwrap();
    assert_eq!(s.reply(&[]), Some(LabeledMove::machine("2")));
}

#[test]
fn uniform_refutation_of_excluded_middle_choice() {
    let fam = vec![Interpretation::default().with_letter("p", true), Interpretation::default().with_letter("p", false)];
    let r = find_uniform_countermodel(&f("p | ~p"), &fam, &Bounds::default(), 10_000).unwrap();
    assert_eq!(r.map(|r| r.members), Some(vec![0, 1]));
    assert_eq!(find_uniform_countermodel(&f("p \\/ ~p"), &fam, &Bounds::default(), 10_000).unwrap(), None);
}

#[test]
fn uniform_refutation_of_contraction() {
    let formula = f("P -> P /\\ P");
    let shapes = BTreeMap::from([("P".to_string(), shape("and-of-ors").unwrap())]);
    let fam: Vec<Interpretation> = enumerate_family(&formula, &Interpretation::default(), &shapes, 1, 1 << 8)
        .unwrap()
        .into_iter()
        .filter(|i| {
            let t = |l: &str| i.elementary[l].eval(&[]);
            (t("p_a") != t("p_b")) && (t("p_c") != t("p_d"))
        })
        .collect();
    assert_eq!(fam.len(), 4);
    let r = find_uniform_countermodel(&formula, &fam, &Bounds::default(), 1_000_000).unwrap();
    assert!(r.is_some());
    let single = shapes.get("P").map(|_| shape("or").unwrap()).unwrap();
    let fam2 =
        enumerate_family(&formula, &Interpretation::default(), &BTreeMap::from([("P".into(), single)]), 1, 16).unwrap();
    let one_true: Vec<Interpretation> =
        fam2.into_iter().filter(|i| i.elementary["p_a"].eval(&[]) != i.elementary["p_b"].eval(&[])).collect();
    assert_eq!(find_uniform_countermodel(&formula, &one_true, &Bounds::default(), 1_000_000).unwrap(), None);
}

#[test]
fn library_shapes_parse() {
    for s in SHAPES {
        let (t, letters) = s.instantiate("Q", 2);
        assert!(!letters.is_empty());
        assert!(matches!(t, Template::Formula { ref params, .. } if params.len() == 2));
    }
}
