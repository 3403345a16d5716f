#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use almkit_core::asp::parse_program;
use almkit_core::solve::{
    detect_solver, expand_choices, ground, is_stable, solve_external_text, solve_reference, AnswerSet, SolverConfig,
};

pub const MICRO_ATOM_LIMIT: usize = 20;

pub fn fixture_dir(sub: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(sub)
}

pub fn micro_fixtures() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = std::fs::read_dir(fixture_dir("micro"))
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "lp"))
        .map(|p| {
            (
                p.file_stem().unwrap().to_string_lossy().into_owned(),
                std::fs::read_to_string(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

pub struct MicroResult {
    pub name: String,
    pub atoms: usize,
    pub reference: BTreeSet<AnswerSet>,
    /// `None` when no external solver is installed.
    pub external: Option<BTreeSet<AnswerSet>>,
    pub checker_ok: bool,
}

pub fn run_micro(name: &str, src: &str) -> MicroResult {
    let program = parse_program(src).unwrap_or_else(|e| panic!("{}: {}", name, e));
    let g = ground(&program).unwrap();
    let reference: BTreeSet<AnswerSet> = solve_reference(&expand_choices(&g), 1 << 12)
        .unwrap()
        .into_iter()
        .map(|m| m.without_auxiliary())
        .collect();
    let checker_ok = reference.iter().all(|m| is_stable(&g, m));
    let external = detect_solver().map(|cmd| {
        let cfg = SolverConfig { command: Some(cmd), ..SolverConfig::default() };
        let out = solve_external_text(src, &cfg).unwrap();
        assert!(out.complete);
        out.models.into_iter().collect()
    });
    MicroResult { name: name.to_string(), atoms: g.atoms.len(), reference, external, checker_ok }
}

/// Library sources with the module named in `replacement` swapped out.
pub fn library_with(replacement: &str) -> Vec<(String, String)> {
    let module = replacement
        .lines()
        .find_map(|l| l.trim().strip_prefix("module "))
        .expect("module line")
        .trim()
        .to_string();
    almkit_core::restkb::MODULES
        .iter()
        .map(|(m, src)| {
            let text = if *m == module { replacement.to_string() } else { src.to_string() };
            (almkit_core::restkb::file_name(m), text)
        })
        .collect()
}

/// Attribute-validity error codes raised on a mutated library.
pub fn mutation_codes(replacement: &str) -> Vec<String> {
    let sd = almkit_core::syntax::parse_system_description(&library_with(replacement)).unwrap();
    let lib = almkit_core::sema::resolve(&sd).unwrap();
    almkit_core::sema::check_valid_attributes(&lib)
        .errors()
        .map(|d| d.code.clone())
        .collect()
}

pub fn mutation_fixtures() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = std::fs::read_dir(fixture_dir("mutations"))
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .map(|p| (p.file_stem().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    out
}

pub fn corpus_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Library, lexicon and script for story tests.
pub fn story_kit() -> (
    almkit_core::sema::ResolvedLibrary,
    almkit_core::lexmap::Lexicon,
    almkit_core::reason::ActivityScript,
) {
    (
        almkit_core::reason::theory_library(),
        almkit_core::lexmap::Lexicon::builtin().unwrap(),
        almkit_core::reason::ActivityScript::restaurant(),
    )
}

pub fn logic_form(story: &str) -> almkit_core::ingest::LogicForm {
    let (lib, lex, _) = story_kit();
    let text = std::fs::read_to_string(corpus_root().join(story).join("story.json")).unwrap();
    let a = almkit_core::ingest::parse_annotations(&text).unwrap();
    almkit_core::ingest::build_logic_form(&a, &lex, &lib).unwrap().0
}

/// The Example 1 reduction: first event only, small enough for the
/// reference solver. Returns the program and its reference models.
pub fn reduced_example1() -> (almkit_core::asp::AspProgram, Vec<AnswerSet>) {
    use almkit_core::asp::{translate_with, InitialState, Occurrences, TranslateOptions};
    let dir = fixture_dir("reduced");
    let sources: Vec<(String, String)> = ["example1_theory.alm", "example1_structure.alm"]
        .iter()
        .map(|f| (f.to_string(), std::fs::read_to_string(dir.join(f)).unwrap()))
        .collect();
    let sd = almkit_core::syntax::parse_system_description(&sources).unwrap();
    let lib = almkit_core::sema::resolve(&sd).unwrap();
    let opts = TranslateOptions { horizon: 1, initial: InitialState::Closed, occurrences: Occurrences::External };
    let p = translate_with(&lib, &opts).unwrap();
    let g = ground(&p).unwrap().simplified();
    let models = solve_reference(&expand_choices(&g), 16).unwrap();
    assert!(models.iter().all(|m| is_stable(&g, m)));
    (p, models)
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/goldens")
}

/// Golden translations of the move rules and the two request laws:
/// (file stem, module, text locating the axiom).
pub const GOLDEN_CASES: &[(&str, &str, &str)] = &[
    ("move_causes", "motion", "occurs(X) causes at(A) = D if instance(X, move)"),
    ("move_impossible", "motion", "impossible occurs(X) if instance(X, move), actor(X) = A, dest(X) = D, at(A) = D."),
    ("request_informs", "communication", "occurs(X) causes informed(R, T, A)\n      if instance(X, request)"),
    ("request_garbled", "communication", "occurs(X) causes 1 { informed(R, T1, A) : instance(T1, things), T1 != T } 1\n      if instance(X, request)"),
];

fn source_line(module: &str, needle: &str) -> usize {
    let src = almkit_core::restkb::MODULES.iter().find(|(m, _)| *m == module).unwrap().1;
    let at = src.find(needle).unwrap_or_else(|| panic!("axiom not found in {}", module));
    src[..at].matches('\n').count() + 1
}

pub fn render_golden(module: &str, needle: &str) -> String {
    let (lib, d) = almkit_core::restkb::load_library();
    assert!(d.is_empty());
    let p = almkit_core::asp::translate(&lib.unwrap(), 2).unwrap();
    let tag = format!("at {}:{}", almkit_core::restkb::file_name(module), source_line(module, needle));
    let mut out = String::new();
    for r in p.rules.iter().filter(|r| r.comment.as_deref().is_some_and(|c| c.ends_with(&tag))) {
        out.push_str(&format!("% {}\n{}\n", r.comment.as_deref().unwrap(), r));
    }
    out
}

/// A small dining room where `o1` orders soup from the waiter, who passes
/// the order on to the cook with `r1`.
fn order_structure(extra: &str, initially: &str, history: &str) -> String {
    format!(
        r#"structure orders
  "ann" in customers
  "wes" in waiters
  "coco" in cooks
  "soup" in foods
  "pasta" in foods
  "the dining room" in restaurants
  "the kitchen" in areas
  o1 in order
    actor = "ann"
    recipient = "wes"
    item = "soup"
  i1 in interference
  r1 in communicate
    actor = "wes"
    recipient = "coco"
{extra}
  initially
    has_read_menu("ann")
    available("ann")
    available("wes")
    available("coco")
    at("ann") = "the dining room"
    at("coco") = "the dining room"
{initially}
  history
{history}
"#
    )
}

fn order_models(extra: &str, initially: &str, history: &str, solver: &SolverConfig) -> Vec<BTreeSet<String>> {
    use almkit_core::asp::{emit_text, translate_with, InitialState, Occurrences, TranslateOptions};
    let text = order_structure(extra, initially, history);
    let structure = almkit_core::syntax::parse_structure(&text).unwrap();
    let (lib, d) = almkit_core::restkb::Theory::bundled().load_with_structure(structure, "orders.alm");
    assert!(!d.has_errors(), "{}", d.render_text());
    let opts = TranslateOptions { horizon: 2, initial: InitialState::Closed, occurrences: Occurrences::External };
    let p = translate_with(&lib.unwrap(), &opts).unwrap();
    let out = solve_external_text(&emit_text(&p), solver).unwrap();
    assert!(out.complete);
    out.models.iter().map(AnswerSet::to_strings).collect()
}

/// Behaviours `order` gets from the `request` and `communicate` axioms,
/// each checked with the solver: (behaviour, holds).
pub fn order_behaviours(solver: &SolverConfig) -> Vec<(&'static str, bool)> {
    let wes_here = "    at(\"wes\") = \"the dining room\"";
    let every = |ms: &[BTreeSet<String>], atoms: &[&str], absent: &[&str]| {
        !ms.is_empty()
            && ms.iter().all(|m| atoms.iter().all(|a| m.contains(*a)) && absent.iter().all(|a| !m.contains(*a)))
    };
    let told = order_models("", wes_here, "    occurs(o1, 0)\n    occurs(r1, 1)", solver);
    let garbled = order_models("", wes_here, "    occurs(o1, 0)\n    occurs(i1, 0)", solver);
    let to_self = order_models(
        "  o2 in order\n    actor = \"ann\"\n    recipient = \"ann\"\n    item = \"soup\"\n",
        wes_here,
        "    occurs(o2, 0)",
        solver,
    );
    let apart = order_models("", "    at(\"wes\") = \"the kitchen\"", "    occurs(o1, 0)", solver);
    let twice = order_models(
        "  o2 in order\n    actor = \"ann\"\n    recipient = \"wes\"\n    item = \"soup\"\n",
        wes_here,
        "    occurs(o1, 0)\n    occurs(o2, 1)",
        solver,
    );
    vec![
        ("the recipient learns the item", every(&told, &["val_informed(wes,soup,ann,true,1)"], &[])),
        (
            "interference garbles the item",
            every(&garbled, &[], &["val_informed(wes,soup,ann,true,1)"])
                && garbled.iter().all(|m| m.iter().any(|a| a.starts_with("val_informed(wes,") && a.ends_with(",ann,true,1)")))
                && garbled.iter().any(|m| m.contains("val_informed(wes,pasta,ann,true,1)")),
        ),
        ("the recipient can pass it on", every(&told, &["val_informed(coco,soup,ann,true,2)"], &[])),
        ("the item counts as requested", every(&told, &["val_requested(ann,soup,true,1)"], &[])),
        ("nobody orders from themselves", to_self.is_empty()),
        ("both must be in the same area", apart.is_empty()),
        ("an item is ordered once", twice.is_empty()),
    ]
}

/// Library axioms that mention the `order` class.
pub fn order_axioms() -> Vec<String> {
    let (lib, _) = almkit_core::restkb::load_library();
    let lib = lib.unwrap();
    let re = regex::Regex::new(r"instance\(\s*\w+\s*,\s*order\s*\)").unwrap();
    lib.axioms.iter().map(|a| almkit_core::syntax::print_axiom(&a.axiom)).filter(|t| re.is_match(t)).collect()
}
