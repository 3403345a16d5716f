mod common;

use almkit_core::reason::{
    answer, diagnose, is_consistent, solve, solve_interfered, Mode, Query, ReasonConfig, Scenario, Verdict,
};
use almkit_core::solve::{detect_solver, GroundAtom, Value};

use common::*;

fn solver_or_skip() -> bool {
    let found = detect_solver().is_some();
    if !found {
        eprintln!("no ASP solver found; skipping");
    }
    found
}

fn sym(s: &str) -> Value {
    Value::Sym(s.to_string())
}

fn scenario(story: &str, mode: Mode) -> Scenario {
    let (lib, _, script) = story_kit();
    Scenario::build(&logic_form(story), mode, &script, &lib).unwrap()
}

#[test]
fn reduced_example1_has_one_model() {
    let (p, models) = reduced_example1();
    assert_eq!(models.len(), 1);
    let m = &models[0];
    let restaurant = p.symbols.get("a vegetarian restaurant").unwrap();
    let nicole = p.symbols.get("Nicole").unwrap();
    assert!(m.contains(&GroundAtom::new("val_open", vec![sym(restaurant), sym("true"), Value::Int(0)])));
    assert!(m.contains(&GroundAtom::new("val_at", vec![sym(nicole), sym(restaurant), Value::Int(1)])));
}

#[test]
fn example1_matches_reduced_oracle() {
    if !solver_or_skip() {
        return;
    }
    let (p, models) = reduced_example1();
    let restaurant = p.symbols.get("a vegetarian restaurant").unwrap();
    let oracle_open = models[0]
        .with_pred("val_open")
        .find(|a| a.args[0] == sym(restaurant) && a.args[2] == Value::Int(0))
        .map(|a| a.args[1].to_string())
        .unwrap();
    let oracle_after = models[0]
        .with_pred("val_at")
        .find(|a| a.args[2] == Value::Int(1))
        .map(|a| p.symbols.display(&a.args[1].to_string()))
        .unwrap();

    let (lib, _, _) = story_kit();
    let sol = solve(&scenario("example1", Mode::Complete), &ReasonConfig::default()).unwrap();
    let what = answer(&sol, &Query::parse("what(open, a vegetarian restaurant, e1)").unwrap(), &lib).unwrap();
    assert_eq!(what.answer.as_deref(), Some(oracle_open.as_str()));
    let next = answer(&sol, &Query::parse("where(Nicole, s_seat)").unwrap(), &lib).unwrap();
    assert_eq!(next.answer.as_deref(), Some(oracle_after.as_str()));
}

#[test]
fn example1_reading_invariants() {
    if !solver_or_skip() {
        return;
    }
    let sc = scenario("example1", Mode::Complete);
    let sol = solve(&sc, &ReasonConfig::default()).unwrap();
    assert_eq!(sol.skipped, 0);
    assert!(!sol.readings.is_empty());
    for r in &sol.readings {
        // observations happen in told order at increasing steps
        let steps: Vec<u32> = ["e1", "e2", "e3", "e4"].iter().map(|e| r.step_of(e).unwrap()).collect();
        assert!(steps.windows(2).all(|w| w[0] < w[1]), "{:?}", steps);
        // no script step happens twice
        for a in &sc.actions {
            assert!(r.occurrences.iter().filter(|(_, n)| *n == a.name).count() <= 1, "{}", a.name);
        }
    }
}

#[test]
fn cautious_verdicts_rewalk_models() {
    if !solver_or_skip() {
        return;
    }
    let (lib, _, _) = story_kit();
    let sc = scenario("example1", Mode::Complete);
    let sol = solve(&sc, &ReasonConfig::default()).unwrap();
    for spec in ["yes_no(pay)", "yes_no(eat)", "yes_no(leave)", "yes_no(becomes_unavailable)", "yes_no pay actor=nicole"] {
        let a = answer(&sol, &Query::parse(spec).unwrap(), &lib).unwrap();
        let class = spec.trim_start_matches("yes_no").trim_matches(|c| c == '(' || c == ')' || c == ' ');
        let class = class.split_whitespace().next().unwrap();
        let holds: Vec<bool> = sol
            .readings
            .iter()
            .map(|r| sc.actions.iter().any(|x| lib.is_subclass(&x.class, class) && r.step_of(&x.name).is_some()))
            .collect();
        let expect = if holds.iter().all(|h| *h) { Verdict::Yes } else if holds.iter().any(|h| *h) { Verdict::Unknown } else { Verdict::No };
        assert_eq!(a.verdict, expect, "{}", spec);
    }
    let none = answer(&sol, &Query::parse("yes_no(becomes_unavailable)").unwrap(), &lib).unwrap();
    assert_eq!(none.verdict, Verdict::No);
    let filtered = answer(&sol, &Query::parse("yes_no pay actor=somebody").unwrap(), &lib).unwrap();
    assert_eq!(filtered.verdict, Verdict::No);
}

#[test]
fn consistent_story_needs_no_diagnosis() {
    if !solver_or_skip() {
        return;
    }
    let (lib, _, _) = story_kit();
    let d = diagnose(&scenario("example1", Mode::Diagnose), &lib, &ReasonConfig::default()).unwrap();
    assert!(!d.needed);
    assert!(d.explanations.is_empty());
}

#[test]
fn two_wrong_items_need_two_interferences() {
    if !solver_or_skip() {
        return;
    }
    let (lib, _, _) = story_kit();
    let cfg = ReasonConfig::default();
    let sc = scenario("two_wrong_items", Mode::Diagnose);
    let d = diagnose(&sc, &lib, &cfg).unwrap();
    assert_eq!(d.size, Some(2));
    assert!(d.minimal);
    // no single interference is enough, checked candidate by candidate
    assert!(!d.candidates.is_empty());
    for c in &d.candidates {
        assert!(!is_consistent(&sc, &cfg, &[c.clone()], 0).unwrap(), "{}", c);
    }
    for e in &d.explanations {
        assert!(is_consistent(&sc, &cfg, &e.interfered, 0).unwrap());
    }
    // with the first explanation applied the story reads through
    let sol = solve_interfered(&sc, &cfg, &d.explanations[0].interfered).unwrap();
    assert_eq!(sol.skipped, 0);
}
