use std::path::PathBuf;

use super::*;
use crate::ingest::{build_logic_form, parse_annotations};
use crate::lexmap::Lexicon;

fn story(name: &str) -> (LogicForm, ResolvedLibrary) {
    let lib = theory_library();
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name).join("story.json");
    let text = std::fs::read_to_string(path).unwrap();
    let (lf, _) = build_logic_form(&parse_annotations(&text).unwrap(), &Lexicon::builtin().unwrap(), &lib).unwrap();
    (lf, lib)
}

fn completed(name: &str) -> Scenario {
    let (lf, lib) = story(name);
    Scenario::complete(&lf, &ActivityScript::restaurant(), &lib).unwrap()
}

fn names(sc: &Scenario) -> Vec<&str> {
    sc.actions.iter().map(|a| a.name.as_str()).collect()
}

#[test]
fn bundled_script_checks_clean() {
    let s = ActivityScript::restaurant();
    let d = s.check(&theory_library());
    assert!(d.is_empty(), "{}", d.render_text());
    assert_eq!(s.steps.len(), 17);
    assert_eq!(s.steps.iter().filter(|s| s.optional).map(|s| s.name.as_str()).collect::<Vec<_>>(), ["greet"]);
    assert_eq!(s.goal_owner, "customer");
}

#[test]
fn script_check_names_unknowns() {
    let src = r#"
        name = "broken"
        goal_owner = "nobody"
        [roles]
        guest = "ghosts"
        [[steps]]
        name = "fly"
        class = "fly"
        [[steps]]
        name = "walk"
        class = "move"
        bind = { wings = "guest", actor = "host" }
    "#;
    let s = ActivityScript::from_toml(src).unwrap();
    let msgs: Vec<String> = s.check(&theory_library()).iter().map(|d| d.message.clone()).collect();
    for needle in ["unknown sort `ghosts`", "goal owner `nobody`", "unknown action class `fly`", "no attribute `wings`", "unknown role `host`"] {
        assert!(msgs.iter().any(|m| m.contains(needle)), "missing `{}` in {:?}", needle, msgs);
    }
}

#[test]
fn duplicate_step_names_rejected() {
    let src = r#"
        name = "dup"
        goal_owner = "a"
        [roles]
        a = "persons"
        [[steps]]
        name = "x"
        class = "sit"
        [[steps]]
        name = "x"
        class = "sit"
    "#;
    assert!(matches!(ActivityScript::from_toml(src), Err(ReasonError::Script(_))));
}

#[test]
fn fact_templates() {
    let f = FactTemplate::parse("at(customer) = street").unwrap();
    assert_eq!((f.function.as_str(), f.args.clone(), f.value.clone(), f.positive), ("at", vec!["customer".to_string()], Some("street".to_string()), true));
    let f = FactTemplate::parse("-open(restaurant)").unwrap();
    assert!(!f.positive && f.value.is_none());
    let f = FactTemplate::parse("holding(waiter, dish)").unwrap();
    assert_eq!(f.args, ["waiter", "dish"]);
    assert!(FactTemplate::parse("-at(x) = y").is_err());
    assert!(FactTemplate::parse("at(x").is_err());
}

#[test]
fn example1_alignment() {
    let sc = completed("example1");
    assert_eq!(
        names(&sc),
        [
            "e1", "s_seat", "s_sit", "s_read_menu", "e2", "s_relay", "s_cook", "s_pick_up", "e3", "s_eat",
            "s_ask_bill", "s_make_bill", "s_bring_bill", "s_pay", "s_stand_up", "e4"
        ]
    );
    assert!(sc.unaligned.is_empty());
    let e2 = sc.action("e2").unwrap();
    assert_eq!(e2.slot.as_deref(), Some("order"));
    assert_eq!(e2.bindings["recipient"], "the waitress");
    assert_eq!(sc.action("e4").unwrap().bindings["origin"], "a vegetarian restaurant");
    let sort = |c: &str| sc.constants.iter().find(|d| d.name == c).unwrap().sort.clone();
    assert_eq!(sort("Nicole"), "customers");
    assert_eq!(sort("the waitress"), "waiters");
    assert_eq!(sort("a vegetarian restaurant"), "restaurants");
    assert_eq!(sort("the cook"), "cooks");
    assert_eq!(sc.roles["payer"], "Nicole");
    assert_eq!(sc.goal_owner.as_deref(), Some("Nicole"));
}

#[test]
fn optional_steps_kept_only_when_told() {
    assert!(completed("example1").actions.iter().all(|a| a.slot.as_deref() != Some("greet")));
    let sc = completed("normal_pizzeria");
    assert_eq!(sc.action("e2").unwrap().slot.as_deref(), Some("greet"));
}

#[test]
fn unaligned_events_anchor_after_previous_step() {
    let sc = completed("early_exit");
    assert_eq!(sc.unaligned, ["e3"]);
    let at = |n: &str| names(&sc).iter().position(|a| *a == n).unwrap();
    assert_eq!(at("e3"), at("e2") + 1);
    assert!(at("s_eat") > at("e3"));
}

#[test]
fn role_defaults_share_constants() {
    let sc = completed("serendipity");
    assert_eq!(sc.roles["payer"], "Anna");
    assert_eq!(sc.roles["given_bill"], "the bill");
    assert_eq!(sc.roles["bill"], "the bill");
    assert_eq!(sc.roles["dish"], sc.roles["food"]);
    assert_eq!(sc.constants.iter().filter(|c| c.name.starts_with("the bill")).count(), 1);
}

#[test]
fn project_mode_keeps_observed_only() {
    let (lf, lib) = story("example1");
    let sc = Scenario::build(&lf, Mode::Project, &ActivityScript::restaurant(), &lib).unwrap();
    assert_eq!(names(&sc), ["e1", "e2", "e3", "e4"]);
    assert!(!sc.initially.is_empty());
    let bare = Scenario::project(&lf);
    assert!(bare.initially.is_empty() && bare.script.is_none());
}

#[test]
fn horizon_bounds() {
    let sc = completed("example1");
    let mut cfg = ReasonConfig::default();
    assert_eq!(sc.horizon(&cfg).unwrap(), 16 + cfg.slack);
    cfg.horizon = Some(3);
    assert!(matches!(sc.horizon(&cfg), Err(ReasonError::HorizonTooSmall { given: 3, minimum: 4 })));
    cfg.horizon = Some(30);
    assert_eq!(sc.horizon(&cfg).unwrap(), 30);
}

#[test]
fn compiled_program_orders_story_actions() {
    let sc = completed("example1");
    let c = sc.compile(&ReasonConfig::default(), &[]).unwrap();
    assert!(c.text.contains("before(e1,s_seat)."));
    assert!(c.text.contains("observed(e4)."));
    assert!(!c.text.contains("observed(s_pay)."));
    assert!(c.text.contains("#show val_at/3."));
    let c = sc.compile(&ReasonConfig::default(), &["e2".to_string()]).unwrap();
    assert!(c.text.contains("occurs(intf_e2,I) :- occurs(e2,I)."));
    assert!(c.text.contains("instance(intf_e2,interference)."));
}

#[test]
fn query_forms() {
    let q = |s: &str| Query::parse(s).unwrap();
    assert_eq!(q("who(e3)"), Query::Who { action: "e3".into() });
    assert_eq!(
        q("what(open, a vegetarian restaurant, e1)"),
        Query::What { function: "open".into(), args: vec!["a vegetarian restaurant".into()], action: "e1".into() }
    );
    assert_eq!(q("where(Nicole, e3)"), Query::Where { person: "Nicole".into(), action: "e3".into() });
    assert_eq!(q("yes_no pay actor=nicole"), Query::YesNo { action: "pay actor=nicole".into() });
    assert_eq!(
        q("where eat person='the customer' actor=Tom"),
        Query::Where { person: "the customer".into(), action: "eat actor=Tom".into() }
    );
    assert_eq!(
        q("what paid args='the bill' action=leave"),
        Query::What { function: "paid".into(), args: vec!["the bill".into()], action: "leave".into() }
    );
    let json: Query = serde_json::from_str(r#"{"query":"who_whom","action":"e2"}"#).unwrap();
    assert_eq!(json, Query::WhoWhom { action: "e2".into() });
    for bad in ["who()", "where(e3)", "fly(e1)", "where eat", "what open", "yes_no", "who e3 actor"] {
        assert!(Query::parse(bad).is_err(), "{}", bad);
    }
}

#[test]
fn call_form_round_trips() {
    for s in ["yes_no(pay)", "when(e1)", "where(Nicole, e3)", "who(e3)", "who_whom(e2)", "what(open, x, e1)", "what(open, e1)", "goal(Nicole, e2)", "intended(Nicole, e2)"] {
        assert_eq!(Query::parse(s).unwrap().to_string(), s);
    }
}

mod props {
    use proptest::prelude::*;

    use super::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn alignment_invariants(order in Just(vec![0usize, 1, 2, 3]).prop_shuffle(), keep in proptest::collection::vec(any::<bool>(), 4)) {
            let (mut lf, lib) = story("normal_pizzeria");
            let script = ActivityScript::restaurant();
            let picked: Vec<usize> = order.into_iter().filter(|&i| keep[i]).collect();
            let all = lf.observations.clone();
            lf.observations = picked
                .iter()
                .enumerate()
                .map(|(n, &i)| crate::ingest::Observation { ordinal: n, ..all[i].clone() })
                .collect();
            let sc = Scenario::complete(&lf, &script, &lib).unwrap();

            let mut seen = std::collections::BTreeSet::new();
            for a in &sc.actions {
                prop_assert!(seen.insert(a.name.clone()), "duplicate {}", a.name);
            }
            let observed: Vec<&str> = sc.actions.iter().filter(|a| a.observed).map(|a| a.name.as_str()).collect();
            let told: Vec<&str> = picked.iter().map(|&i| all[i].instance.as_str()).collect();
            prop_assert_eq!(observed, told);
            for step in script.steps.iter().filter(|s| !s.optional) {
                let n = sc.actions.iter().filter(|a| a.slot.as_deref() == Some(step.name.as_str())).count();
                prop_assert_eq!(n, 1, "step {}", step.name);
            }
            for a in &sc.actions {
                for v in a.bindings.values() {
                    prop_assert!(sc.is_constant(v), "{} binds unknown {}", a.name, v);
                }
            }
        }
    }
}
