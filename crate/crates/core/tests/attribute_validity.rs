mod common;

use common::*;

#[test]
fn library_has_valid_attributes() {
    let (lib, _) = almkit_core::restkb::load_library();
    let d = almkit_core::sema::check_valid_attributes(&lib.unwrap());
    assert!(!d.has_errors(), "{}", d.render_text());
}

#[test]
fn mutations_are_rejected() {
    let fixtures = mutation_fixtures();
    assert!(fixtures.iter().any(|(n, _)| n.starts_with("va1_")));
    assert!(fixtures.iter().any(|(n, _)| n.starts_with("va2_")));
    for (name, src) in fixtures {
        let expected = name.split('_').next().unwrap().to_uppercase();
        let codes = mutation_codes(&src);
        assert!(!codes.is_empty() && codes.iter().all(|c| *c == expected), "{}: {:?}", name, codes);
    }
}
