use super::*;
use crate::asp::parse_program;

fn g(src: &str) -> GroundProgram {
    ground(&parse_program(src).unwrap()).unwrap()
}

fn models(src: &str) -> Vec<String> {
    let gp = expand_choices(&g(src));
    solve_reference(&gp, 1000)
        .unwrap()
        .into_iter()
        .map(|m| m.without_auxiliary().to_string())
        .collect()
}

#[test]
fn even_loop_has_two_models() {
    assert_eq!(models("a :- not b. b :- not a."), vec!["a", "b"]);
}

#[test]
fn positive_loop_is_unfounded() {
    assert_eq!(models("a :- a."), vec![""]);
    assert_eq!(models("a :- b. b :- a. c."), vec!["c"]);
}

#[test]
fn constraints_and_odd_loops() {
    assert!(models("a. :- a.").is_empty());
    assert!(models("a :- not a.").is_empty());
    assert_eq!(models("a :- not b. b :- not a. :- a."), vec!["b"]);
}

#[test]
fn exactly_one_choice_over_things_but_one() {
    let src = "thing(t1). thing(t2). thing(t3). item(t1).
        1 { informed(T1) : thing(T1), T1 != T } 1 :- item(T).";
    let ms = models(src);
    assert_eq!(ms.len(), 2);
    assert!(ms.iter().all(|m| !m.contains("informed(t1)")));
}

#[test]
fn general_bounds() {
    let ms = models("{ p(1..3) } 2.");
    assert_eq!(ms.len(), 7);
    let ms = models("2 { p(1..3) }.");
    assert_eq!(ms.len(), 4);
    assert!(models("2 { p(1) }.").is_empty());
}

#[test]
fn count_aggregate_constraint() {
    let ms = models("{ p(1..3) }. :- #count{ X : p(X) } != 2.");
    assert_eq!(ms.len(), 3);
}

#[test]
fn strategies_agree() {
    let gp = expand_choices(&g("{ p(1..6) }. q(X) :- p(X), not r(X). r(X) :- p(X), X > 3. :- q(1), q(2)."));
    let a = solve_reference_with(&gp, 1 << 12, Strategy::Parallel).unwrap();
    let b = solve_reference_with(&gp, 1 << 12, Strategy::Sequential).unwrap();
    assert_eq!(a, b);
    for m in &a {
        assert!(is_stable(&gp, m));
    }
}

#[test]
fn reference_limits() {
    let gp = expand_choices(&g("{ p(1..30) }."));
    assert!(matches!(solve_reference(&gp, 10), Err(SolveError::TooLarge { .. })));
    let gp = expand_choices(&g("{ p(1..4) }."));
    assert!(matches!(solve_reference(&gp, 3), Err(SolveError::CapExceeded { cap: 3 })));
    assert!(matches!(solve_reference(&g("{ a }."), 3), Err(SolveError::ChoiceRules)));
}

#[test]
fn checker_rejects_non_models() {
    let gp = g("a :- not b. b :- not a. c :- a.");
    let m = |s: &[&str]| AnswerSet::new(s.iter().map(|x| GroundAtom::parse(x).unwrap()));
    assert!(is_stable(&gp, &m(&["a", "c"])));
    assert!(is_stable(&gp, &m(&["b"])));
    assert!(!is_stable(&gp, &m(&["a"])));
    assert!(!is_stable(&gp, &m(&["a", "b", "c"])));
    assert!(is_model(&gp, &m(&["a", "b", "c"])));
    // checker handles choices directly
    let gp = g("1 { p(1..2) } 1.");
    assert!(is_stable(&gp, &m(&["p(1)"])));
    assert!(!is_stable(&gp, &m(&["p(1)", "p(2)"])));
}

#[test]
fn grounding_binds_through_arithmetic() {
    let gp = g("step(0..2). f(0). f(I+1) :- f(I), step(I), I < 2.");
    let facts: BTreeSet<String> = gp.facts().into_iter().map(|i| gp.atoms[i].to_string()).collect();
    assert!(facts.contains("f(2)"));
    assert!(!facts.contains("f(3)"));
}

#[test]
fn unsafe_rules_are_reported() {
    let p = parse_program("p(X) :- not q(X).").unwrap();
    assert!(matches!(ground(&p), Err(GroundError::Unsafe { .. })));
}

#[test]
fn atom_cap() {
    let p = parse_program("n(1..100). p(X,Y) :- n(X), n(Y).").unwrap();
    assert!(matches!(ground_with_cap(&p, 500), Err(GroundError::AtomCap { cap: 500 })));
}

#[test]
fn external_solver_when_available() {
    if detect_solver().is_none() {
        eprintln!("no external solver; skipped");
        return;
    }
    let cfg = SolverConfig::default();
    let o = solve_external_text("a :- not b. b :- not a.", &cfg).unwrap();
    assert_eq!(o.models.len(), 2);
    let o = solve_external_text("a. :- a.", &cfg).unwrap();
    assert!(o.models.is_empty());
    assert!(o.complete);
}

fn random_program() -> impl proptest::strategy::Strategy<Value = String> {
    use proptest::prelude::*;
    let lit = (0..6usize, any::<bool>());
    let rule = (proptest::option::of(0..6usize), proptest::collection::vec(lit, 0..3));
    proptest::collection::vec(rule, 1..10).prop_map(|rules| {
        rules
            .into_iter()
            .map(|(head, body)| {
                let body: Vec<String> = body
                    .into_iter()
                    .map(|(a, neg)| if neg { format!("not a{}", a) } else { format!("a{}", a) })
                    .collect();
                let head = head.map(|h| format!("a{}", h)).unwrap_or_default();
                match (head.is_empty(), body.is_empty()) {
                    (_, true) if head.is_empty() => "a0 :- a0.".to_string(),
                    (false, true) => format!("{}.", head),
                    (true, false) => format!(":- {}.", body.join(", ")),
                    _ => format!("{} :- {}.", head, body.join(", ")),
                }
            })
            .collect::<Vec<_>>()
            .join("\n")
    })
}

proptest::proptest! {
    #[test]
    fn reference_matches_checker_enumeration(src in random_program()) {
        let gp = g(&src);
        let found = solve_reference(&gp, 1 << 10).unwrap();
        let universe: Vec<GroundAtom> = (0..6).map(|i| GroundAtom::new(format!("a{}", i), vec![])).collect();
        let mut oracle = Vec::new();
        for mask in 0u32..64 {
            let m = AnswerSet::new((0..6).filter(|i| mask & (1 << i) != 0).map(|i| universe[i].clone()));
            if m.atoms.iter().all(|a| gp.lookup(a).is_some()) && is_stable(&gp, &m) {
                oracle.push(m);
            }
        }
        let mut found_sorted = found.clone();
        found_sorted.sort();
        oracle.sort();
        proptest::prop_assert_eq!(found_sorted, oracle);
    }

    #[test]
    fn expansion_preserves_choice_models(lower in 0u32..3, width in 0u32..3, n in 1i64..5) {
        let upper = lower + width;
        let src = format!("{} {{ p(1..{}) }} {}.", lower, n, upper);
        let gp = g(&src);
        let expanded = expand_choices(&gp);
        let via_expansion: BTreeSet<AnswerSet> = solve_reference(&expanded, 1 << 10)
            .unwrap()
            .into_iter()
            .map(|m| m.without_auxiliary())
            .collect();
        let count = (0..(1u32 << n))
            .filter(|m| (lower..=upper).contains(&m.count_ones()))
            .count();
        proptest::prop_assert_eq!(via_expansion.len(), count);
        for m in &via_expansion {
            proptest::prop_assert!(is_stable(&gp, m));
        }
    }
}
