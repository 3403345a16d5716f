use super::*;

const BASE: &str = "
module base
  agents, things, points :: universe
  areas :: points
  persons :: agents, things
  foods :: things
  restaurants :: areas
  move :: actions
    attributes
      actor : agents
      origin, dest : points
  communicate :: actions
    attributes
      actor, recipient : agents
  request :: communicate
    attributes
      item : things
  order :: request
  interference :: actions
  fluents
    basic
      at : things -> points
      informed : agents * things * agents -> booleans
    defined
      requested : agents * things -> booleans
  axioms
    occurs(X) causes at(A) = D if instance(X, move), actor(X) = A, dest(X) = D.
    impossible occurs(X) if instance(X, move), actor(X) = A, dest(X) = D, at(A) = D.
    occurs(X) causes 1 { informed(R, T1, A) : instance(T1, things), T1 != T } 1
      if instance(X, request), recipient(X) = R, item(X) = T, actor(X) = A, occurs(interference).
    requested(A, T) if informed(R, T, A).
    impossible occurs(X) if instance(X, communicate), origin(X) = P.
";

fn lib_of(src: &[&str]) -> Result<ResolvedLibrary, Diagnostics> {
    let sources: Vec<(String, String)> = src
        .iter()
        .enumerate()
        .map(|(i, s)| (format!("f{}.alm", i), s.to_string()))
        .collect();
    resolve(&parse_system_description(&sources).unwrap())
}

fn codes(d: &Diagnostics) -> Vec<&str> {
    d.iter().map(|x| x.code.as_str()).collect()
}

fn base_without_last_axiom() -> String {
    BASE.lines()
        .filter(|l| !l.contains("origin(X) = P"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn hierarchy_and_closure() {
    let lib = lib_of(&[&base_without_last_axiom()]).unwrap();
    assert!(lib.is_subclass("order", "request"));
    assert!(lib.is_subclass("order", "communicate"));
    assert!(lib.is_subclass("order", "actions"));
    assert!(lib.is_subclass("restaurants", "points"));
    assert!(!lib.is_subclass("request", "order"));
    assert_eq!(lib.class_depth("order"), 3);
    assert_eq!(lib.class_depth("persons"), 2);
    let attrs: Vec<&str> = lib.attributes_of("order").iter().map(|(_, a)| a.name.as_str()).collect();
    assert_eq!(attrs.len(), 3);
    assert!(attrs.contains(&"item") && attrs.contains(&"actor") && attrs.contains(&"recipient"));
}

#[test]
fn valid_and_invalid_attributes() {
    let lib = lib_of(&[&base_without_last_axiom()]).unwrap();
    assert!(check_valid_attributes(&lib).is_empty());

    let no_instance = format!(
        "{}\n    impossible occurs(X) if actor(X) = A, at(A) = P.\n",
        base_without_last_axiom()
    );
    let d = check_valid_attributes(&lib_of(&[&no_instance]).unwrap());
    assert_eq!(codes(&d), vec!["VA2"]);

    let dup = base_without_last_axiom().replace("      item : things", "      item : things\n      item : foods");
    let d = check_valid_attributes(&lib_of(&[&dup]).unwrap());
    assert_eq!(codes(&d), vec!["VA1"]);
}

#[test]
fn instance_atom_of_unrelated_class_warns() {
    let d = check_valid_attributes(&lib_of(&[BASE]).unwrap());
    assert_eq!(codes(&d), vec!["VA2-CLASS"]);
    assert!(!d.has_errors());
}

#[test]
fn import_cycles_and_visibility() {
    let err = lib_of(&["module a\n  import a"]).unwrap_err();
    assert_eq!(codes(&err), vec!["IMPORT-CYCLE"]);
    let err = lib_of(&["module a\n  import b", "module b\n  import a"]).unwrap_err();
    assert_eq!(codes(&err), vec!["IMPORT-CYCLE", "IMPORT-CYCLE"]);
    let err = lib_of(&["module a\n  x :: universe", "module b\n  y :: x"]).unwrap_err();
    assert_eq!(codes(&err), vec!["UNKNOWN-CLASS"]);
    assert!(err.0[0].message.contains("does not import"));
    assert!(lib_of(&["module a\n  x :: universe", "module b\n  import a\n  y :: x"]).is_ok());
    let err = lib_of(&["module a\n  x :: y\n  y :: x"]).unwrap_err();
    assert_eq!(codes(&err), vec!["CLASS-CYCLE", "CLASS-CYCLE"]);
}

#[test]
fn foreign_defined_fluent_head() {
    let src = format!(
        "{}\nmodule other\n  import base\n  axioms\n    requested(A, T) if at(T) = A.\n",
        base_without_last_axiom()
    );
    let err = lib_of(&[&src.split("\nmodule other").next().unwrap().to_string(), &format!("module other{}", src.split("\nmodule other").nth(1).unwrap())])
        .unwrap_err();
    assert!(codes(&err).contains(&"DEF-FOREIGN"));
}

#[test]
fn structure_typing() {
    let ok = "structure s
  \"a vegetarian restaurant\" in restaurants
  \"Nicole\" in persons
  e1 in move
    actor = \"Nicole\"
    dest = \"a vegetarian restaurant\"";
    let lib = lib_of(&[&base_without_last_axiom(), ok]).unwrap();
    assert!(typecheck(&lib).is_empty(), "{}", typecheck(&lib).render_text());
    assert_eq!(lib.constants_of("points").len(), 1);
    assert_eq!(lib.constants_of("actions").len(), 1);

    let bad = ok.replace("\"a vegetarian restaurant\" in restaurants", "\"a vegetarian restaurant\" in foods");
    let d = typecheck(&lib_of(&[&base_without_last_axiom(), &bad]).unwrap());
    assert_eq!(codes(&d), vec!["TYPE"]);
    assert!(d.0[0].message.contains("not of sort `points`"));

    let conflict = format!("{}\n  \"Nicole\" in foods", ok);
    let err = lib_of(&[&base_without_last_axiom(), &conflict]).unwrap_err();
    assert_eq!(codes(&err), vec!["CONST-SORTS"]);
}

#[test]
fn choice_over_defined_fluent_rejected() {
    let src = format!(
        "{}\n    occurs(X) causes 1 {{ requested(A, T) : instance(T, things) }} 1 if instance(X, request), actor(X) = A.\n",
        base_without_last_axiom()
    );
    let d = typecheck(&lib_of(&[&src]).unwrap());
    assert_eq!(codes(&d), vec!["CHOICE-DEFINED"]);
}

#[test]
fn variable_sorts() {
    let lib = lib_of(&[&base_without_last_axiom()]).unwrap();
    let ax = &lib.axioms[0].axiom;
    let sorts = axiom_variable_sorts(&lib, ax).unwrap();
    assert_eq!(sorts["X"], vec!["move"]);
    // A is an agent (actor) and a thing (argument of at): both guards stay
    assert_eq!(sorts["A"], vec!["agents", "things"]);
    assert_eq!(sorts["D"], vec!["points"]);

    let bad = format!(
        "{}\n    impossible occurs(X) if instance(X, move), actor(X) = A, at(A) = A.\n",
        base_without_last_axiom().replace("  persons :: agents, things\n", "")
    );
    let d = typecheck(&lib_of(&[&bad]).unwrap());
    assert!(d.iter().any(|x| x.message.contains("incompatible sorts")), "{}", d.render_text());
}

#[test]
fn lints() {
    let deep = "module d
  a :: actions
  b :: a
  c :: b
  e :: c";
    let d = lint_kr_principles(&lib_of(&[deep]).unwrap(), &LintConfig::default());
    assert_eq!(codes(&d), vec!["LINT-DEPTH"]);

    let prep = "module p
  things, persons :: universe
  prepare :: actions
    attributes
      actor : persons
      instrument : things
  fluents
    basic
      ready : things -> booleans
  axioms
    occurs(X) causes ready(T) if instance(X, prepare), actor(X) = A, instance(T, things).";
    let d = lint_kr_principles(&lib_of(&[prep]).unwrap(), &LintConfig::default());
    assert_eq!(codes(&d), vec!["LINT-UNUSED-ATTR"]);
    assert!(d.0[0].message.contains("instrument"));

    let body = format!(
        "{}\n    occurs(X) causes at(A) = D if instance(X, move), actor(X) = A, dest(X) = D, origin(X) = O, at(A) = O, O != D, dom_at(A).\n",
        base_without_last_axiom()
    );
    let d = lint_kr_principles(&lib_of(&[&body]).unwrap(), &LintConfig::default());
    assert!(codes(&d).contains(&"LINT-BODY"));
}

#[test]
fn diagnostic_line_format() {
    let d = Diagnostic::error("VA2", "x.alm", Span::new(3, 5), "bad\tthing");
    assert_eq!(d.to_line(), "error\tVA2\tx.alm\t3\t5\tbad thing");
}
