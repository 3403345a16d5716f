//! Model and stability checks, kept independent of the enumerator in
//! `reference.rs`: they work on atom values and recompute the reduct from
//! scratch.

use std::collections::HashSet;

use super::*;

fn truth_of<'a>(g: &'a GroundProgram, m: &'a AnswerSet) -> impl Fn(usize) -> bool + 'a {
    move |i| m.contains(&g.atoms[i])
}

fn body_holds(r: &GroundRule, t: &impl Fn(usize) -> bool) -> bool {
    r.pos.iter().all(|&a| t(a)) && r.neg.iter().all(|&a| !t(a)) && r.aggregates.iter().all(|agg| agg.holds(t))
}

fn element_holds(e: &GroundElement, t: &impl Fn(usize) -> bool) -> bool {
    e.pos.iter().all(|&a| t(a)) && e.neg.iter().all(|&a| !t(a))
}

/// `m` satisfies every rule of `g` classically, including choice bounds.
pub fn is_model(g: &GroundProgram, m: &AnswerSet) -> bool {
    let t = truth_of(g, m);
    g.rules.iter().all(|r| {
        if !body_holds(r, &t) {
            return true;
        }
        match &r.head {
            GroundHead::None => false,
            GroundHead::Atom(a) => t(*a),
            GroundHead::Choice { lower, upper, elements } => {
                let chosen: HashSet<usize> = elements
                    .iter()
                    .filter(|e| element_holds(e, &t) && t(e.atom))
                    .map(|e| e.atom)
                    .collect();
                let n = chosen.len() as u32;
                lower.map_or(true, |l| n >= l) && upper.map_or(true, |u| n <= u)
            }
        }
    })
}

/// `m` is a model of `g` and equals the least model of its reduct.
///
/// In the reduct a choice rule whose body holds yields `a :- pos` for each
/// chosen element atom `a`.
pub fn is_stable(g: &GroundProgram, m: &AnswerSet) -> bool {
    if m.atoms.iter().any(|a| g.lookup(a).is_none()) || !is_model(g, m) {
        return false;
    }
    let t = truth_of(g, m);
    let mut definite: Vec<(usize, Vec<usize>)> = Vec::new();
    for r in &g.rules {
        if r.neg.iter().any(|&a| t(a)) || !r.aggregates.iter().all(|agg| agg.holds(&t)) {
            continue;
        }
        match &r.head {
            GroundHead::None => {}
            GroundHead::Atom(a) => definite.push((*a, r.pos.clone())),
            GroundHead::Choice { elements, .. } => {
                for e in elements {
                    if t(e.atom) && e.neg.iter().all(|&a| !t(a)) {
                        let mut pos = r.pos.clone();
                        pos.extend_from_slice(&e.pos);
                        definite.push((e.atom, pos));
                    }
                }
            }
        }
    }
    let mut least: HashSet<usize> = HashSet::new();
    loop {
        let before = least.len();
        for (h, pos) in &definite {
            if pos.iter().all(|a| least.contains(a)) {
                least.insert(*h);
            }
        }
        if least.len() == before {
            break;
        }
    }
    let expected: HashSet<usize> = m.atoms.iter().filter_map(|a| g.lookup(a)).collect();
    least == expected
}
