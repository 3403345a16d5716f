//! One line per acceptance criterion. Run with `--nocapture` to see them.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use almkit_core::ingest::{build_logic_form, parse_annotations};
use almkit_core::reason::{
    answer, diagnose, is_consistent, run_corpus, solve, Mode, Query, ReasonConfig, Scenario, Verdict,
};
use almkit_core::restkb::{describe, load_library};
use almkit_core::sema::check_valid_attributes;
use almkit_core::solve::{detect_solver, SolverConfig};

use common::*;

const LIBRARY_LIMIT: Duration = Duration::from_secs(1);
const GOLDEN_LIMIT: Duration = Duration::from_secs(1);
const MICRO_LIMIT: Duration = Duration::from_secs(30);
const EXAMPLE1_LIMIT: Duration = Duration::from_secs(10);
const EXAMPLE2_LIMIT: Duration = Duration::from_secs(30);
const MIN_MICRO: usize = 12;
const MIN_STORIES: usize = 8;
const MIN_ORDER_BEHAVIOURS: usize = 5;

/// Module contents: classes (action classes included) and inertial fluents.
const TABLE: &[(&str, &[&str], &[&str])] = &[
    ("root", &["agents", "things", "points", "areas", "persons"], &["at", "in"]),
    ("motion", &["move", "enter", "leave", "lead_to"], &["open"]),
    ("bodily_motion", &["sit", "stand_up"], &["sitting", "standing", "seating_exists"]),
    ("grasping_releasing", &["grasp", "release", "put_on"], &["holding", "can_reach"]),
    ("communication", &["communicate", "interference", "greet", "request"], &["greeted_by", "informed"]),
    ("eating", &["foods", "eat", "prepare"], &["satiated", "food_prepared_by"]),
    (
        "restaurant",
        &["customers", "waiters", "cooks", "bills", "restaurants", "read_menu", "pay", "becomes_unavailable", "order"],
        &["available", "served", "has_read_menu", "bill_generated_for", "paid"],
    ),
];

const IMPORTS: &[(&str, &[&str])] = &[
    ("bodily_motion", &["motion"]),
    ("communication", &["root"]),
    ("eating", &["grasping_releasing"]),
    ("grasping_releasing", &["root"]),
    ("motion", &["root"]),
    ("restaurant", &["bodily_motion", "communication", "eating", "grasping_releasing", "motion"]),
    ("root", &[]),
];

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < limit, format!("took {:.2?}, limit {:?}", t, limit))?;
    Ok(t)
}

fn solver() -> Result<SolverConfig, String> {
    let cmd = detect_solver().ok_or("no external ASP solver found")?;
    Ok(SolverConfig { command: Some(cmd), ..SolverConfig::default() })
}

fn library_fidelity() -> Outcome {
    let start = Instant::now();
    let (lib, d) = load_library();
    ensure(!d.has_errors(), d.render_text())?;
    let m = describe(&lib.ok_or("library did not resolve")?);
    let counts = (m.classes, m.action_classes, m.inertial_fluents, m.depth);
    ensure(counts == (30, 19, 17, 3), format!("classes/actions/fluents/depth = {:?}", counts))?;
    for (module, classes, fluents) in TABLE {
        let s = m.modules.iter().find(|s| s.name == *module).ok_or(format!("missing module {}", module))?;
        let want: BTreeSet<&str> = classes.iter().copied().collect();
        let got: BTreeSet<&str> = s.classes.iter().map(String::as_str).collect();
        ensure(want == got, format!("{} classes {:?}", module, got))?;
        let want: BTreeSet<&str> = fluents.iter().copied().collect();
        let got: BTreeSet<&str> = s.inertial_fluents.iter().map(String::as_str).collect();
        ensure(want == got, format!("{} fluents {:?}", module, got))?;
    }
    let want: BTreeMap<String, BTreeSet<String>> = IMPORTS
        .iter()
        .map(|(m, is)| (m.to_string(), is.iter().map(|s| s.to_string()).collect()))
        .collect();
    let got: BTreeMap<String, BTreeSet<String>> =
        m.imports.iter().map(|(k, v)| (k.clone(), v.iter().cloned().collect())).collect();
    ensure(want == got, format!("module graph {:?}", got))?;
    let t = within(start, LIBRARY_LIMIT)?;
    Ok(format!("30/19/17, depth 3, module graph matches, {:.2?}", t))
}

fn translation_goldens() -> Outcome {
    let start = Instant::now();
    for (name, module, needle) in GOLDEN_CASES {
        let text = render_golden(module, needle);
        let golden = std::fs::read_to_string(golden_dir().join(format!("{}.lp", name)))
            .map_err(|e| format!("{}: {}", name, e))?;
        ensure(!text.is_empty() && text == golden, format!("{} differs from its golden", name))?;
        ensure(text == render_golden(module, needle), format!("{} is not byte-stable", name))?;
    }
    let t = within(start, GOLDEN_LIMIT)?;
    Ok(format!("{} goldens byte-identical, {:.2?}", GOLDEN_CASES.len(), t))
}

fn semantics_oracle() -> Outcome {
    solver()?;
    let start = Instant::now();
    let fixtures = micro_fixtures();
    ensure(fixtures.len() >= MIN_MICRO, format!("only {} micro-programs", fixtures.len()))?;
    for (name, src) in &fixtures {
        let r = run_micro(name, src);
        ensure(r.atoms <= MICRO_ATOM_LIMIT, format!("{} has {} atoms", name, r.atoms))?;
        ensure(r.checker_ok, format!("{}: reduct checker rejected a model", name))?;
        ensure(r.external.as_ref() == Some(&r.reference), format!("{}: model sets differ", name))?;
    }
    let t = within(start, MICRO_LIMIT)?;
    Ok(format!("{} micro-programs agree, all models stable, {:.2?}", fixtures.len(), t))
}

fn attribute_validity() -> Outcome {
    let (lib, _) = load_library();
    let d = check_valid_attributes(&lib.ok_or("library did not resolve")?);
    ensure(!d.has_errors(), d.render_text())?;
    let mut seen = BTreeSet::new();
    for (name, src) in mutation_fixtures() {
        let expected = name.split('_').next().unwrap_or_default().to_uppercase();
        let codes = mutation_codes(&src);
        ensure(!codes.is_empty() && codes.iter().all(|c| *c == expected), format!("{}: {:?}", name, codes))?;
        seen.insert(expected);
    }
    ensure(seen.contains("VA1") && seen.contains("VA2"), format!("codes covered: {:?}", seen))?;
    Ok("library accepted; VA1 and VA2 mutations rejected".into())
}

fn example1() -> Outcome {
    let cfg = ReasonConfig { solver: solver()?, ..ReasonConfig::default() };
    let start = Instant::now();
    let (lib, lex, script) = story_kit();
    let text = std::fs::read_to_string(corpus_root().join("example1/story.json")).map_err(|e| e.to_string())?;
    let (lf, _) = build_logic_form(&parse_annotations(&text).map_err(|e| e.to_string())?, &lex, &lib)
        .map_err(|e| e.to_string())?;
    let expected = [
        ("e1", "move", vec![("actor", "Nicole"), ("dest", "a vegetarian restaurant")]),
        ("e2", "order", vec![("actor", "Nicole"), ("item", "a lentil soup")]),
        ("e3", "put_on", vec![("actor", "the waitress"), ("object", "a lentil soup"), ("on", "the table")]),
        ("e4", "leave", vec![("actor", "Nicole")]),
    ];
    ensure(lf.instances.len() == 4, format!("{} instances", lf.instances.len()))?;
    for (i, (name, class, binds)) in lf.instances.iter().zip(&expected) {
        let got: Vec<(&str, &str)> = i.bindings.iter().map(|b| (b.attribute.as_str(), b.value.as_str())).collect();
        ensure(i.name == *name && i.class == *class && got == *binds, format!("instance {:?}", i))?;
    }
    let facts = "st_hpd(e1,true,0).\nst_hpd(e2,true,1).\nst_hpd(e3,true,2).\nst_hpd(e4,true,3).\n";
    ensure(lf.to_facts() == facts, format!("facts:\n{}", lf.to_facts()))?;

    let sc = Scenario::build(&lf, Mode::Complete, &script, &lib).map_err(|e| e.to_string())?;
    let sol = solve(&sc, &cfg).map_err(|e| e.to_string())?;
    let ask = |q: &str| answer(&sol, &Query::parse(q).unwrap(), &lib).map_err(|e| e.to_string());
    let pay = ask("yes_no(pay)")?;
    ensure(pay.verdict == Verdict::Yes, format!("yes_no(pay) = {}", pay.verdict))?;
    let who = ask("who(e3)")?;
    ensure(who.answer.as_deref() == Some("the waitress"), format!("who(e3) = {:?}", who.answer))?;
    let mut when = Vec::new();
    for e in ["e1", "e2", "e3", "e4"] {
        let a = ask(&format!("when({})", e))?;
        when.push(a.answer.and_then(|s| s.parse::<u32>().ok()).ok_or(format!("when({}) unanswered", e))?);
    }
    ensure(when.windows(2).all(|w| w[0] < w[1]), format!("event steps {:?}", when))?;
    let t = within(start, EXAMPLE1_LIMIT)?;

    let (_, models) = reduced_example1();
    ensure(models.len() == 1, format!("reduced fixture has {} reference models", models.len()))?;
    Ok(format!("4 instances, 4 st_hpd facts, pay = yes, who(e3) = the waitress, steps {:?}, {:.2?}", when, t))
}

fn example2() -> Outcome {
    let cfg = ReasonConfig { solver: solver()?, ..ReasonConfig::default() };
    let start = Instant::now();
    let (lib, _, script) = story_kit();
    let sc = Scenario::build(&logic_form("example2"), Mode::Diagnose, &script, &lib).map_err(|e| e.to_string())?;
    let d = diagnose(&sc, &lib, &cfg).map_err(|e| e.to_string())?;
    ensure(d.needed && d.size == Some(1), format!("size {:?}", d.size))?;
    ensure(d.explanations.len() >= 2, format!("{} explanations", d.explanations.len()))?;
    ensure(d.explanations.iter().all(|e| e.interfered.len() == 1), "explanation larger than 1")?;
    let sets: BTreeSet<&str> = d.explanations.iter().map(|e| e.interfered[0].as_str()).collect();
    // e2 is the customer's order, s_relay the waiter passing it to the cook.
    ensure(sets.contains("e2") && sets.contains("s_relay"), format!("explanations {:?}", sets))?;
    ensure(d.minimal, "minimality not established")?;
    let empty = is_consistent(&sc, &cfg, &[], 0).map_err(|e| e.to_string())?;
    ensure(!empty, "the story is consistent without interference")?;
    let t = within(start, EXAMPLE2_LIMIT)?;
    Ok(format!("size-1 explanations {:?}, empty subset refuted, {:.2?}", sets, t))
}

fn corpus() -> Outcome {
    let cfg = ReasonConfig { solver: solver()?, ..ReasonConfig::default() };
    let (lib, lex, script) = story_kit();
    let reports = run_corpus(&corpus_root(), &lex, &lib, &script, &cfg).map_err(|e| e.to_string())?;
    ensure(reports.len() >= MIN_STORIES, format!("only {} stories", reports.len()))?;
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.name.as_str()).collect();
    ensure(failed.is_empty(), format!("failing stories {:?}", failed))?;
    let kinds: BTreeSet<&str> = reports.iter().map(|r| r.kind.as_str()).collect();
    ensure(["a", "b", "c", "d"].iter().all(|k| kinds.contains(k)), format!("types covered {:?}", kinds))?;
    let checks: usize = reports.iter().map(|r| r.checks.len()).sum();
    Ok(format!("{} stories, types a-d, {} checks pass", reports.len(), checks))
}

fn conciseness() -> Outcome {
    let solver = solver()?;
    let behaviours = order_behaviours(&solver);
    let broken: Vec<&str> = behaviours.iter().filter(|(_, ok)| !ok).map(|(w, _)| *w).collect();
    ensure(broken.is_empty(), format!("not inherited: {:?}", broken))?;
    ensure(behaviours.len() >= MIN_ORDER_BEHAVIOURS, format!("{} behaviours", behaviours.len()))?;
    let own = order_axioms();
    ensure(
        own.len() == 1 && own[0].contains("has_read_menu"),
        format!("order-specific axioms: {:#?}", own),
    )?;
    Ok(format!("{} inherited behaviours, 1 order-specific axiom (menu precondition)", behaviours.len()))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("library fidelity", library_fidelity),
        ("translation goldens", translation_goldens),
        ("semantics oracle", semantics_oracle),
        ("attribute validity", attribute_validity),
        ("example 1 end to end", example1),
        ("example 2 diagnosis", example2),
        ("scenario corpus", corpus),
        ("order conciseness", conciseness),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {} {}: {}", i + 1, name, detail),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {}: {}", i + 1, name, why);
            }
        }
    }
    assert_eq!(failed, 0, "{} acceptance criteria failed", failed);
}
