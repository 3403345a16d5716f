//! Rewriting choice rules into normal rules and constraints.

use super::*;

/// Prefix of the complement atoms introduced for general choice bounds.
pub const COMPLEMENT_PREFIX: &str = "choice_compl_";

fn rule(head: GroundHead, pos: Vec<usize>, neg: Vec<usize>, aggregates: Vec<GroundAggregate>, origin: usize) -> GroundRule {
    GroundRule { head, pos, neg, aggregates, origin }
}

/// Choice-free program with the same stable models, up to complement atoms.
pub fn expand_choices(g: &GroundProgram) -> GroundProgram {
    let mut out = GroundProgram::new(g.atoms.clone(), Vec::new());
    let mut rules = Vec::new();
    for r in &g.rules {
        let GroundHead::Choice { lower, upper, elements } = &r.head else {
            rules.push(r.clone());
            continue;
        };
        let body = |extra_pos: &[usize], extra_neg: &[usize]| {
            let mut pos = r.pos.clone();
            pos.extend_from_slice(extra_pos);
            let mut neg = r.neg.clone();
            neg.extend_from_slice(extra_neg);
            (pos, neg)
        };
        let plain = elements.iter().all(|e| e.pos.is_empty() && e.neg.is_empty());
        if *lower == Some(1) && *upper == Some(1) && plain {
            let mut atoms: Vec<usize> = elements.iter().map(|e| e.atom).collect();
            atoms.sort();
            atoms.dedup();
            for &a in &atoms {
                let others: Vec<usize> = atoms.iter().copied().filter(|&b| b != a).collect();
                let (pos, neg) = body(&[], &others);
                rules.push(rule(GroundHead::Atom(a), pos, neg, r.aggregates.clone(), r.origin));
            }
            let (pos, neg) = body(&[], &atoms);
            rules.push(rule(GroundHead::None, pos, neg, r.aggregates.clone(), r.origin));
            for (i, &a) in atoms.iter().enumerate() {
                for &b in &atoms[i + 1..] {
                    let (pos, neg) = body(&[a, b], &[]);
                    rules.push(rule(GroundHead::None, pos, neg, r.aggregates.clone(), r.origin));
                }
            }
            continue;
        }
        let mut count_elements = Vec::new();
        for e in elements {
            let atom = out.atoms[e.atom].clone();
            let compl = out.intern(GroundAtom::new(format!("{}{}", COMPLEMENT_PREFIX, atom.pred), atom.args));
            let (mut pos, mut neg) = body(&e.pos, &e.neg);
            neg.push(compl);
            rules.push(rule(GroundHead::Atom(e.atom), pos.clone(), neg.clone(), r.aggregates.clone(), r.origin));
            neg.pop();
            neg.push(e.atom);
            rules.push(rule(GroundHead::Atom(compl), pos.clone(), neg, r.aggregates.clone(), r.origin));
            pos.truncate(r.pos.len());
            let mut cpos = vec![e.atom];
            cpos.extend_from_slice(&e.pos);
            count_elements.push(GroundAggElement {
                tuple: vec![Value::Int(e.atom as i64)],
                pos: cpos,
                neg: e.neg.clone(),
            });
        }
        let bound_rule = |op: CmpOp, k: u32| {
            let mut aggs = r.aggregates.clone();
            aggs.push(GroundAggregate {
                elements: count_elements.clone(),
                op,
                bound: k as i64,
            });
            rule(GroundHead::None, r.pos.clone(), r.neg.clone(), aggs, r.origin)
        };
        if let Some(l) = lower {
            if *l > 0 {
                rules.push(bound_rule(CmpOp::Lt, *l));
            }
        }
        if let Some(u) = upper {
            rules.push(bound_rule(CmpOp::Gt, *u));
        }
    }
    out.rules = rules;
    out
}
