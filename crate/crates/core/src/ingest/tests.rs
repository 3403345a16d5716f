use super::*;

const EXAMPLE1: &str = include_str!("../../../../corpus/example1/story.json");

fn example1() -> (LogicForm, Diagnostics) {
    let (lib, _) = restkb::load_library();
    build_logic_form(&parse_annotations(EXAMPLE1).unwrap(), &Lexicon::builtin().unwrap(), &lib.unwrap()).unwrap()
}

fn binds(i: &ActionInstance) -> Vec<(&str, &str)> {
    i.bindings.iter().map(|b| (b.attribute.as_str(), b.value.as_str())).collect()
}

#[test]
fn example1_instances() {
    let (lf, warnings) = example1();
    let got: Vec<(&str, &str, Vec<(&str, &str)>)> =
        lf.instances.iter().map(|i| (i.name.as_str(), i.class.as_str(), binds(i))).collect();
    assert_eq!(
        got,
        vec![
            ("e1", "move", vec![("actor", "Nicole"), ("dest", "a vegetarian restaurant")]),
            ("e2", "order", vec![("actor", "Nicole"), ("item", "a lentil soup")]),
            ("e3", "put_on", vec![("actor", "the waitress"), ("object", "a lentil soup"), ("on", "the table")]),
            ("e4", "leave", vec![("actor", "Nicole")]),
        ]
    );
    assert_eq!(lf.instance("e2").unwrap().predicate, "order.02");
    assert_eq!(warnings.len(), 1);
    assert!(warnings.0[0].message.contains("enjoy.01"));
    assert_eq!(lf.to_facts(), "st_hpd(e1,true,0).\nst_hpd(e2,true,1).\nst_hpd(e3,true,2).\nst_hpd(e4,true,3).\n");
}

#[test]
fn example1_sorts() {
    let (lf, _) = example1();
    assert_eq!(lf.sort_of("Nicole"), Some("persons"));
    assert_eq!(lf.sort_of("the waitress"), Some("persons"));
    assert_eq!(lf.sort_of("a vegetarian restaurant"), Some("points"));
    assert_eq!(lf.sort_of("the table"), Some("points"));
    assert_eq!(lf.sort_of("a lentil soup"), Some("things"));
    assert!(validate_logic_form(&lf).is_empty(), "{}", validate_logic_form(&lf).render_text());
}

#[test]
fn serialization_is_deterministic() {
    let a = example1().0;
    let b = example1().0;
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert_eq!(a.to_structure_text("s"), b.to_structure_text("s"));
    let text = a.to_structure_text("story");
    assert!(text.contains("e3 in put_on\n    actor = \"the waitress\""), "{}", text);
}

#[test]
fn bad_sorts_are_reported() {
    let (mut lf, _) = example1();
    lf.constants.push(ConstantDecl { name: "the kitchen door".into(), sort: "points".into() });
    lf.instances[1].bindings[1].value = "the kitchen door".into();
    let d = validate_logic_form(&lf);
    assert!(d.has_errors());
    assert!(validate_logic_form(&LogicForm::default()).is_empty());
}

#[test]
fn omitted_roles_stay_unbound() {
    let doc = r#"{"sentences": ["She left."], "predicates": [{"sentence": 0, "predicate": "leave.01", "roles": {"A0": "She"}}]}"#;
    let (lib, _) = restkb::load_library();
    let (lf, _) = build_logic_form(&parse_annotations(doc).unwrap(), &Lexicon::builtin().unwrap(), &lib.unwrap()).unwrap();
    assert_eq!(binds(&lf.instances[0]), vec![("actor", "she")]);
    assert_eq!(lf.instances.len(), 1);
}

#[test]
fn malformed_inputs() {
    let (lib, _) = restkb::load_library();
    let lib = lib.unwrap();
    let lex = Lexicon::builtin().unwrap();
    let run = |doc: &str| build_logic_form(&parse_annotations(doc).unwrap(), &lex, &lib);
    assert!(matches!(
        run(r#"{"sentences": [], "predicates": [{"sentence": 0, "predicate": "go.01"}]}"#),
        Err(IngestError::BadSentence { .. })
    ));
    assert!(matches!(
        run(r#"{"sentences": ["x"], "predicates": [{"sentence": 0, "predicate": "go"}]}"#),
        Err(IngestError::MissingSense(_))
    ));
    assert!(matches!(
        run(r#"{"sentences": ["Bob went."], "predicates": [{"sentence": 0, "predicate": "go.01", "roles": {"A1": "Alice"}}]}"#),
        Err(IngestError::MentionNotFound { .. })
    ));
    // a food that also has to be a place
    let conflict = r#"{"sentences": ["Bob put the cake on the pie.", "Bob ate the pie."],
        "predicates": [{"sentence": 0, "predicate": "put.01", "roles": {"A0": "Bob", "A1": "the cake", "A2": "on the pie"}},
                       {"sentence": 1, "predicate": "eat.01", "roles": {"A0": "Bob", "A1": "the pie"}}],
        "coref": [[{"sentence": 0, "text": "the pie"}, {"sentence": 1, "text": "the pie"}]]}"#;
    assert!(matches!(run(conflict), Err(IngestError::SortConflict { .. })));
    assert!(parse_annotations("{").is_err());
}
