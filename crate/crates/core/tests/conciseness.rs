//! `order` needs no axioms of its own for what it shares with `request`.

mod common;

use almkit_core::solve::{detect_solver, SolverConfig};

use common::*;

#[test]
fn order_behaviours_come_from_request() {
    let Some(cmd) = detect_solver() else {
        eprintln!("no ASP solver found; skipping");
        return;
    };
    let solver = SolverConfig { command: Some(cmd), ..SolverConfig::default() };
    let behaviours = order_behaviours(&solver);
    assert!(behaviours.len() >= 5);
    for (what, holds) in behaviours {
        assert!(holds, "{}", what);
    }
}

#[test]
fn order_has_only_its_menu_precondition() {
    let own = order_axioms();
    assert_eq!(own.len(), 1, "{:#?}", own);
    assert!(own[0].contains("has_read_menu"), "{}", own[0]);
    for banned in ["informed", "requested", "interference", "in("] {
        assert!(own.iter().all(|a| !a.contains(banned)), "{}: {:#?}", banned, own);
    }
}
