use super::*;
use crate::formula::{parse, Budget, Dialect};

fn f(s: &str) -> Formula {
    parse(s).unwrap()
}

fn node(id: usize, formula: &str, step: Step, premises: &[usize]) -> ProofNode {
    ProofNode { id, formula: f(formula), step, premises: premises.to_vec() }
}

fn a() -> Step {
    Step::A { certificate: StabilityCertificate::Tautology { letters: 0 }, cover: Vec::new() }
}

fn path(s: &str) -> OccurrencePath {
    s.parse().unwrap()
}

fn distribution_proof() -> Proof {
    let left = "((p -> q) & (p -> r))";
    Proof {
        dialect: Dialect::Cl1,
        nodes: vec![
            node(1, "(p -> q) -> (p -> q)", a(), &[]),
            node(2, &format!("{left} -> (p -> q)"), Step::B1 { path: path("1"), branch: 1 }, &[1]),
            node(3, "(p -> r) -> (p -> r)", a(), &[]),
            node(4, &format!("{left} -> (p -> r)"), Step::B1 { path: path("1"), branch: 2 }, &[3]),
            node(5, &format!("{left} -> (p -> (q & r))"), a(), &[2, 4]),
        ],
    }
}

#[test]
fn handwritten_distribution_proof_checks() {
    let checked = check_proof(&distribution_proof()).unwrap();
    assert!(!checked.conditional);
    assert_eq!(checked.theorem, f("((p -> q) & (p -> r)) -> (p -> (q & r))"));
}

#[test]
fn found_distribution_proof_matches_handwritten_table() {
    let proof = prove_cl1(&f("((p -> q) & (p -> r)) -> (p -> (q & r))")).unwrap().unwrap();
    let rows: Vec<String> = proof.table().into_iter().map(|(_, r)| r).collect();
    assert_eq!(
        rows,
        [
            "(from {} by Rule (a))",
            "(from 1 by Rule (b))",
            "(from {} by Rule (a))",
            "(from 3 by Rule (b))",
            "(from {2,4} by Rule (a))",
        ]
    );
    let found: Vec<&Formula> = proof.nodes.iter().map(|n| &n.formula).collect();
    let hand = distribution_proof();
    let hand: Vec<&Formula> = hand.nodes.iter().map(|n| &n.formula).collect();
    assert_eq!(found, hand);
}

#[test]
fn contraction_proof_and_freshness() {
    let good = Proof {
        dialect: Dialect::Cl2,
        nodes: vec![
            node(1, "p /\\ P -> p", a(), &[]),
            node(2, "P /\\ P -> P", Step::C { positive: path("2"), negative: path("1.1"), fresh: "p".into() }, &[1]),
        ],
    };
    assert!(check_proof(&good).is_ok());
    let stale = Proof {
        dialect: Dialect::Cl2,
        nodes: vec![
            node(1, "p /\\ p -> p", a(), &[]),
            node(2, "p /\\ P -> P", Step::C { positive: path("2"), negative: path("1.2"), fresh: "p".into() }, &[1]),
        ],
    };
    let errs = check_proof(&stale).unwrap_err();
    assert_eq!(errs, vec![ProofError { node: 2, reason: Reason::NotFresh { name: "p".into() } }]);
}

fn cl1(s: &str) -> bool {
    prove_cl1(&f(s)).unwrap().is_some()
}

fn cl2(s: &str) -> bool {
    prove_cl2(&f(s)).unwrap().is_some()
}

fn cl4(s: &str) -> Verdict {
    prove_cl4(&f(s), &Budget::default()).unwrap()
}

#[test]
fn cl1_corpus() {
    assert!(cl1("((p -> q) & (p -> r)) -> (p -> (q & r))"));
    assert!(!cl1("((p -> q) & (p -> r)) -> (p -> (q /\\ r))"));
    assert!(cl1("((p & q) /\\ (p & q)) -> (p & q)"));
    assert!(!cl1("(p & q) -> ((p & q) /\\ (p & q))"));
}

#[test]
fn cl2_corpus() {
    let cases = [
        ("P /\\ P -> P", true),
        ("P -> P /\\ P", false),
        ("P \\/ ~P", true),
        ("P | ~P", false),
        ("P -> P & P", true),
        ("(P /\\ Q) \\/ (R /\\ S) -> (P \\/ R) /\\ (Q \\/ S)", true),
        ("p /\\ (p -> Q) /\\ (p -> R) -> Q /\\ R", true),
        ("P /\\ (P -> Q) /\\ (P -> R) -> Q /\\ R", false),
        ("P & (Q \\/ R) -> (P & Q) \\/ (P & R)", true),
        ("(P & Q) \\/ (P & R) -> P & (Q \\/ R)", false),
        ("(p & Q) \\/ (p & R) -> p & (Q \\/ R)", true),
    ];
    for (s, want) in cases {
        assert_eq!(cl2(s), want, "{s}");
    }
}

#[test]
fn contraction_is_found_in_two_steps() {
    let proof = prove_cl2(&f("P /\\ P -> P")).unwrap().unwrap();
    assert_eq!(proof.nodes.len(), 2);
    assert!(matches!(proof.nodes[1].step, Step::C { .. }));
}

#[test]
fn cl4_corpus() {
    let proved = |s: &str| matches!(cl4(s), Verdict::Proved(_));
    assert!(proved("!x. ?y. (P(x) -> P(y))"));
    assert_eq!(cl4("?y. !x. (P(x) -> P(y))"), Verdict::NotProvable);
    assert!(proved("ex y. all x. (P(x) -> P(y))"));
    assert!(proved("all x. P(x) -> !x. P(x)"));
    assert_eq!(cl4("!x. P(x) -> all x. P(x)"), Verdict::NotProvable);
    assert!(proved("!x. ((P(x) /\\ !x. Q(x)) & (!x. P(x) /\\ Q(x))) -> !x. P(x) /\\ !x. Q(x)"));
    let kb = "all x. (Red(x) -> Acid(x)) /\\ all x. (Acid(x) -> Red(x)) /\\ !x. (Red(x) | ~Red(x))";
    assert!(proved(&format!("{kb} -> !x. (Acid(x) | ~Acid(x))")));
}

#[test]
fn blindfree_decider_reproduces_four_step_derivation() {
    let proof = decide_cl4_blindfree(&f("!x. ?y. (P(x) -> P(y))")).unwrap().unwrap();
    let rows: Vec<String> = proof.table().into_iter().map(|(l, r)| format!("{l} {r}")).collect();
    assert_eq!(
        rows,
        [
            "1. p(z) -> p(z) (from {} by Rule (A))",
            "2. P(z) -> P(z) (from 1 by Rule (C))",
            "3. ?y. (P(z) -> P(y)) (from 2 by Rule (B2))",
            "4. !x. ?y. (P(x) -> P(y)) (from {3} by Rule (A))",
        ]
    );
    assert_eq!(decide_cl4_blindfree(&f("all x. P(x)")), Err(ProveError::Blind));
}

#[test]
fn blind_version_is_two_steps() {
    let Verdict::Proved(proof) = cl4("ex y. all x. (P(x) -> P(y))") else { panic!() };
    assert_eq!(proof.nodes.len(), 2);
    assert_eq!(proof.nodes[0].formula, f("ex y. all x. (p(x) -> p(y))"));
}

#[test]
fn proof_file_round_trip() {
    let proof = prove_cl1(&f("((p -> q) & (p -> r)) -> (p -> (q & r))")).unwrap().unwrap();
    let text = proof.to_json();
    assert_eq!(Proof::from_json(&text).unwrap(), proof);
    let lower = text.replace("\"rule\": \"B1\"", "\"rule\": \"b\"");
    assert_eq!(Proof::from_json(&lower).unwrap(), proof);
    assert!(matches!(Proof::from_json(&text.replace("clwork-proof/1", "x")), Err(ProofFileError::Format(_))));
}

#[test]
fn checker_diagnostics() {
    let mut p = distribution_proof();
    p.nodes[4].premises = vec![2];
    let errs = check_proof(&p).unwrap_err();
    assert!(matches!(errs[..], [ProofError { node: 5, reason: Reason::MissingPremise { .. } }]), "{errs:?}");

    let mut p = distribution_proof();
    p.nodes[1].step = Step::B1 { path: path("2"), branch: 1 };
    let errs = check_proof(&p).unwrap_err();
    assert!(matches!(errs[0].reason, Reason::BadPath { .. }));

    let polarity = Proof {
        dialect: Dialect::Cl1,
        nodes: vec![node(1, "p", a(), &[]), node(2, "p & q", Step::B1 { path: path("."), branch: 1 }, &[1])],
    };
    let errs = check_proof(&polarity).unwrap_err();
    assert!(errs.iter().any(|e| e.node == 1 && e.reason == Reason::Instable));
    assert!(errs.iter().any(|e| e.node == 2 && matches!(e.reason, Reason::Polarity { .. })));

    let forward = Proof { dialect: Dialect::Cl1, nodes: vec![node(1, "p -> p", a(), &[2])] };
    assert_eq!(check_proof(&forward).unwrap_err()[0].reason, Reason::UnknownPremise(2));

    let b2_in_cl2 = Proof {
        dialect: Dialect::Cl2,
        nodes: vec![node(1, "p -> p", Step::B2 { path: path("."), term: Term::Const(1) }, &[])],
    };
    assert!(matches!(check_proof(&b2_in_cl2).unwrap_err()[0].reason, Reason::RuleNotInDialect { .. }));
}

#[test]
fn b2_capture_is_rejected() {
    let p = Proof {
        dialect: Dialect::Cl4,
        nodes: vec![
            node(1, "all y. (P(y) -> P(y))", a(), &[]),
            node(2, "all y. (P(y) -> ?x. P(x))", Step::B2 { path: path("0.2"), term: Term::Var("y".into()) }, &[1]),
        ],
    };
    let errs = check_proof(&p).unwrap_err();
    assert!(errs.iter().any(|e| e.node == 2 && matches!(e.reason, Reason::Capture(_))), "{errs:?}");
}

#[test]
fn assumed_certificate_cannot_override_a_countermodel() {
    let p = Proof {
        dialect: Dialect::Cl4,
        nodes: vec![node(
            1,
            "p(1) -> all x. p(x)",
            Step::A { certificate: StabilityCertificate::Assumed, cover: vec![] },
            &[],
        )],
    };
    assert_eq!(check_proof(&p).unwrap_err()[0].reason, Reason::Instable);
}

#[test]
fn quantifier_cover_with_stale_variable_is_rejected() {
    let p = Proof {
        dialect: Dialect::Cl4,
        nodes: vec![
            node(1, "?y. (P(x) -> P(y))", a(), &[]),
            node(
                2,
                "!x. ?y. (P(x) -> P(y))",
                Step::A {
                    certificate: StabilityCertificate::Tautology { letters: 0 },
                    cover: vec![Cover { path: path("."), pick: Pick::Fresh("x".into()), premise: 1 }],
                },
                &[1],
            ),
        ],
    };
    let errs = check_proof(&p).unwrap_err();
    assert!(errs.iter().any(|e| e.node == 2 && e.reason == Reason::NotFresh { name: "x".into() }), "{errs:?}");
}
