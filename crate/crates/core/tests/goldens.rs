//! Golden translations of the move rules and the two request laws.
//! Regenerate with `UPDATE_GOLDENS=1 cargo test --test goldens`.

mod common;

use common::{golden_dir, render_golden, GOLDEN_CASES};

#[test]
fn translations_match_goldens() {
    let dir = golden_dir();
    let update = std::env::var_os("UPDATE_GOLDENS").is_some();
    for (name, module, needle) in GOLDEN_CASES {
        let text = render_golden(module, needle);
        assert!(!text.is_empty(), "{} produced no rules", name);
        assert_eq!(text, render_golden(module, needle), "{} is not deterministic", name);
        let path = dir.join(format!("{}.lp", name));
        if update {
            std::fs::write(&path, &text).unwrap();
        }
        let golden = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden {}", path.display()));
        assert_eq!(text, golden, "{} differs from its golden", name);
    }
}
