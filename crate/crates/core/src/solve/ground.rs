//! Bottom-up instantiation with an over-approximated atom universe.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::asp::{AspProgram, AspTerm, Atom, ChoiceElement, CmpOp, Head, Literal, Rule};

use super::*;

pub const DEFAULT_ATOM_CAP: usize = 200_000;

type Subst = HashMap<String, Value>;

#[derive(Default)]
struct Relations {
    by_pred: HashMap<(String, usize), Vec<Vec<Value>>>,
    set: HashSet<GroundAtom>,
}

impl Relations {
    fn insert(&mut self, a: GroundAtom) -> bool {
        if self.set.contains(&a) {
            return false;
        }
        self.by_pred.entry((a.pred.clone(), a.args.len())).or_default().push(a.args.clone());
        self.set.insert(a);
        true
    }

    fn tuples(&self, pred: &str, arity: usize) -> &[Vec<Value>] {
        self.by_pred
            .get(&(pred.to_string(), arity))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    fn contains(&self, a: &GroundAtom) -> bool {
        self.set.contains(a)
    }
}

fn eval(t: &AspTerm, s: &Subst) -> Option<Value> {
    match t {
        AspTerm::Var(v) => s.get(v).cloned(),
        AspTerm::Sym(x) => Some(Value::Sym(x.clone())),
        AspTerm::Int(i) => Some(Value::Int(*i)),
        AspTerm::Add(inner, k) => match eval(inner, s)? {
            Value::Int(i) => Some(Value::Int(i + k)),
            Value::Sym(_) => None,
        },
        AspTerm::Interval(..) => None,
    }
}

/// Unify pattern `t` with `v`, extending `s`. New bindings are recorded in `trail`.
fn unify(t: &AspTerm, v: &Value, s: &mut Subst, trail: &mut Vec<String>) -> bool {
    match t {
        AspTerm::Var(x) => match s.get(x) {
            Some(b) => b == v,
            None => {
                s.insert(x.clone(), v.clone());
                trail.push(x.clone());
                true
            }
        },
        AspTerm::Add(inner, k) => match v {
            Value::Int(i) => unify(inner, &Value::Int(i - k), s, trail),
            Value::Sym(_) => false,
        },
        other => eval(other, s).as_ref() == Some(v),
    }
}

fn undo(s: &mut Subst, trail: &mut Vec<String>, mark: usize) {
    for x in trail.drain(mark..) {
        s.remove(&x);
    }
}

fn ground_atom(a: &Atom, s: &Subst) -> Option<GroundAtom> {
    let args = a.args.iter().map(|t| eval(t, s)).collect::<Option<Vec<_>>>()?;
    Some(GroundAtom::new(a.pred.clone(), args))
}

fn compare(l: &AspTerm, op: CmpOp, r: &AspTerm, s: &mut Subst, trail: &mut Vec<String>) -> Option<bool> {
    match (eval(l, s), eval(r, s)) {
        (Some(a), Some(b)) => Some(op.holds(&a, &b)),
        (None, Some(b)) if op == CmpOp::Eq => Some(unify(l, &b, s, trail)),
        (Some(a), None) if op == CmpOp::Eq => Some(unify(r, &a, s, trail)),
        _ => None,
    }
}

/// Order positive atoms so that each one shares as many bound variables as possible.
fn order_atoms(atoms: Vec<&Atom>, bound: &BTreeSet<String>) -> Vec<Atom> {
    let mut rest: Vec<&Atom> = atoms;
    let mut bound = bound.clone();
    let mut out = Vec::new();
    while !rest.is_empty() {
        let score = |a: &Atom| {
            let mut vs = BTreeSet::new();
            a.vars(&mut vs);
            let free = vs.difference(&bound).count();
            (free, std::cmp::Reverse(vs.len()))
        };
        let (i, _) = rest
            .iter()
            .enumerate()
            .min_by_key(|(_, a)| score(a))
            .expect("non-empty");
        let a = rest.remove(i);
        a.vars(&mut bound);
        out.push(a.clone());
    }
    out
}

/// Enumerate substitutions satisfying `pos` (against `rel`) and the comparisons in `cmps`.
fn enumerate(
    pos: &[Atom],
    cmps: &[(AspTerm, CmpOp, AspTerm)],
    rel: &Relations,
    s: &mut Subst,
    trail: &mut Vec<String>,
    f: &mut dyn FnMut(&Subst),
) {
    let Some((first, rest)) = pos.split_first() else {
        let mark = trail.len();
        let mut pending: Vec<&(AspTerm, CmpOp, AspTerm)> = cmps.iter().collect();
        loop {
            let before = pending.len();
            let mut still = Vec::new();
            for c in pending {
                match compare(&c.0, c.1, &c.2, s, trail) {
                    Some(true) => {}
                    Some(false) => {
                        undo(s, trail, mark);
                        return;
                    }
                    None => still.push(c),
                }
            }
            pending = still;
            if pending.is_empty() {
                break;
            }
            if pending.len() == before {
                // unbound comparison: cannot hold
                undo(s, trail, mark);
                return;
            }
        }
        f(s);
        undo(s, trail, mark);
        return;
    };
    if let Some(g) = ground_atom(first, s) {
        if rel.contains(&g) {
            enumerate(rest, cmps, rel, s, trail, f);
        }
        return;
    }
    for tuple in rel.tuples(&first.pred, first.args.len()) {
        let mark = trail.len();
        if first.args.iter().zip(tuple).all(|(t, v)| unify(t, v, s, trail)) {
            enumerate(rest, cmps, rel, s, trail, f);
        }
        undo(s, trail, mark);
    }
}

struct Prepared {
    rule: Rule,
    pos: Vec<Atom>,
    cmps: Vec<(AspTerm, CmpOp, AspTerm)>,
    /// Predicates whose atoms can enable new instances.
    deps: BTreeSet<String>,
}

fn split(lits: &[Literal], bound: &BTreeSet<String>) -> (Vec<Atom>, Vec<(AspTerm, CmpOp, AspTerm)>) {
    let pos: Vec<&Atom> = lits
        .iter()
        .filter_map(|l| match l {
            Literal::Pos(a) => Some(a),
            _ => None,
        })
        .collect();
    let cmps = lits
        .iter()
        .filter_map(|l| match l {
            Literal::Cmp(a, op, b) => Some((a.clone(), *op, b.clone())),
            _ => None,
        })
        .collect();
    (order_atoms(pos, bound), cmps)
}

fn prepare(rule: &Rule) -> Result<Prepared, GroundError> {
    let unsafe_vars = rule.unsafe_vars();
    if !unsafe_vars.is_empty() {
        return Err(GroundError::Unsafe {
            rule: rule.to_string(),
            vars: unsafe_vars.into_iter().collect(),
        });
    }
    let has_agg = rule.body.iter().any(|l| matches!(l, Literal::Count(_)));
    if has_agg && !matches!(rule.head, Head::None) {
        return Err(GroundError::Unsupported(format!(
            "aggregates are only supported in constraints: {}",
            rule
        )));
    }
    let rule = &split_choice_intervals(rule);
    let (pos, cmps) = split(&rule.body, &BTreeSet::new());
    let mut deps: BTreeSet<String> = pos.iter().map(|a| a.pred.clone()).collect();
    if let Head::Choice { elements, .. } = &rule.head {
        for e in elements {
            for c in &e.conditions {
                if let Literal::Pos(a) = c {
                    deps.insert(a.pred.clone());
                }
            }
        }
    }
    Ok(Prepared { rule: rule.clone(), pos, cmps, deps })
}

/// `{ p(1..3) : c }` becomes `{ p(1) : c; p(2) : c; p(3) : c }`.
fn split_choice_intervals(rule: &Rule) -> Rule {
    let Head::Choice { lower, upper, elements } = &rule.head else {
        return rule.clone();
    };
    let mut out = Vec::new();
    for e in elements {
        let mut atoms = vec![e.atom.clone()];
        for (i, t) in e.atom.args.iter().enumerate() {
            if let AspTerm::Interval(x, y) = t {
                atoms = atoms
                    .into_iter()
                    .flat_map(|a| {
                        (*x..=*y).map(move |v| {
                            let mut a = a.clone();
                            a.args[i] = AspTerm::Int(v);
                            a
                        })
                    })
                    .collect();
            }
        }
        out.extend(atoms.into_iter().map(|atom| ChoiceElement { atom, conditions: e.conditions.clone() }));
    }
    Rule { head: Head::Choice { lower: *lower, upper: *upper, elements: out }, ..rule.clone() }
}

fn expand_intervals(a: &Atom) -> Vec<GroundAtom> {
    let mut out: Vec<Vec<Value>> = vec![vec![]];
    for t in &a.args {
        let vals: Vec<Value> = match t {
            AspTerm::Interval(x, y) => (*x..=*y).map(Value::Int).collect(),
            other => match eval(other, &Subst::new()) {
                Some(v) => vec![v],
                None => return vec![],
            },
        };
        out = out
            .into_iter()
            .flat_map(|prefix| {
                vals.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v.clone());
                    p
                })
            })
            .collect();
    }
    out.into_iter().map(|args| GroundAtom::new(a.pred.clone(), args)).collect()
}

/// Ground instances of a choice element or aggregate element under `outer`.
fn local_instances(
    conds: &[Literal],
    outer: &Subst,
    rel: &Relations,
    f: &mut dyn FnMut(&Subst),
) {
    let bound: BTreeSet<String> = outer.keys().cloned().collect();
    let (pos, cmps) = split(conds, &bound);
    let mut s = outer.clone();
    let mut trail = Vec::new();
    enumerate(&pos, &cmps, rel, &mut s, &mut trail, f);
}

pub fn ground(p: &AspProgram) -> Result<GroundProgram, GroundError> {
    ground_with_cap(p, DEFAULT_ATOM_CAP)
}

pub fn ground_with_cap(p: &AspProgram, cap: usize) -> Result<GroundProgram, GroundError> {
    let mut rel = Relations::default();
    let mut prepared = Vec::new();
    for (i, r) in p.rules.iter().enumerate() {
        if r.is_fact() {
            if let Head::Atom(a) = &r.head {
                let atoms = expand_intervals(a);
                if atoms.is_empty() {
                    return Err(GroundError::Unsafe { rule: r.to_string(), vars: vec![] });
                }
                for g in atoms {
                    rel.insert(g);
                }
            }
        } else {
            prepared.push((i, prepare(r)?));
        }
    }

    // possible atoms: fixpoint ignoring negation and bounds
    let mut changed: Option<BTreeSet<String>> = None;
    loop {
        let mut fresh: Vec<GroundAtom> = Vec::new();
        for (_, pr) in &prepared {
            if let Some(ch) = &changed {
                if pr.deps.is_disjoint(ch) {
                    continue;
                }
            }
            let mut s = Subst::new();
            let mut trail = Vec::new();
            enumerate(&pr.pos, &pr.cmps, &rel, &mut s, &mut trail, &mut |s| match &pr.rule.head {
                Head::Atom(a) => {
                    if let Some(g) = ground_atom(a, s) {
                        if !rel.contains(&g) {
                            fresh.push(g);
                        }
                    }
                }
                Head::Choice { elements, .. } => {
                    for e in elements {
                        local_instances(&e.conditions, s, &rel, &mut |s2| {
                            if let Some(g) = ground_atom(&e.atom, s2) {
                                if !rel.contains(&g) {
                                    fresh.push(g);
                                }
                            }
                        });
                    }
                }
                Head::None => {}
            });
        }
        let mut new_preds = BTreeSet::new();
        for g in fresh {
            let pred = g.pred.clone();
            if rel.insert(g) {
                new_preds.insert(pred);
            }
        }
        if rel.set.len() > cap {
            return Err(GroundError::AtomCap { cap });
        }
        if new_preds.is_empty() {
            break;
        }
        changed = Some(new_preds);
    }

    let mut atoms: Vec<GroundAtom> = rel.set.iter().cloned().collect();
    atoms.sort();
    let index: HashMap<GroundAtom, usize> = atoms.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();

    let mut rules = Vec::new();
    for (i, r) in p.rules.iter().enumerate() {
        if r.is_fact() {
            if let Head::Atom(a) = &r.head {
                for g in expand_intervals(a) {
                    rules.push(GroundRule::fact(index[&g], i));
                }
            }
        }
    }
    for (origin, pr) in &prepared {
        let mut s = Subst::new();
        let mut trail = Vec::new();
        enumerate(&pr.pos, &pr.cmps, &rel, &mut s, &mut trail, &mut |s| {
            if let Some(r) = instantiate(&pr.rule, s, &rel, &index, *origin) {
                rules.push(r);
            }
        });
    }
    Ok(GroundProgram::new(atoms, rules).simplified())
}

/// Literals of a condition list under `s`; `None` when some literal is false.
fn ground_conditions(
    conds: &[Literal],
    s: &Subst,
    rel: &Relations,
    index: &HashMap<GroundAtom, usize>,
) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for l in conds {
        match l {
            Literal::Pos(a) => {
                let g = ground_atom(a, s)?;
                pos.push(*index.get(&g)?);
            }
            Literal::Not(a) => {
                let g = ground_atom(a, s)?;
                if rel.contains(&g) {
                    neg.push(index[&g]);
                }
            }
            Literal::Cmp(..) | Literal::Count(_) => {}
        }
    }
    Some((pos, neg))
}

fn instantiate(
    rule: &Rule,
    s: &Subst,
    rel: &Relations,
    index: &HashMap<GroundAtom, usize>,
    origin: usize,
) -> Option<GroundRule> {
    let (pos, neg) = ground_conditions(&rule.body, s, rel, index)?;
    let mut aggregates = Vec::new();
    for l in &rule.body {
        if let Literal::Count(agg) = l {
            let mut elements = Vec::new();
            for e in &agg.elements {
                local_instances(&e.conditions, s, rel, &mut |s2| {
                    let tuple = e.terms.iter().map(|t| eval(t, s2)).collect::<Option<Vec<_>>>();
                    if let (Some(tuple), Some((p, n))) = (tuple, ground_conditions(&e.conditions, s2, rel, index)) {
                        elements.push(GroundAggElement { tuple, pos: p, neg: n });
                    }
                });
            }
            let bound = match eval(&agg.bound, s)? {
                Value::Int(i) => i,
                Value::Sym(_) => return None,
            };
            aggregates.push(GroundAggregate { elements, op: agg.op, bound });
        }
    }
    let head = match &rule.head {
        Head::None => GroundHead::None,
        Head::Atom(a) => GroundHead::Atom(index[&ground_atom(a, s)?]),
        Head::Choice { lower, upper, elements } => {
            let mut out = Vec::new();
            for e in elements {
                local_instances(&e.conditions, s, rel, &mut |s2| {
                    if let (Some(g), Some((p, n))) = (ground_atom(&e.atom, s2), ground_conditions(&e.conditions, s2, rel, index)) {
                        out.push(GroundElement { atom: index[&g], pos: p, neg: n });
                    }
                });
            }
            out.sort();
            out.dedup();
            GroundHead::Choice {
                lower: *lower,
                upper: *upper,
                elements: out,
            }
        }
    };
    Some(GroundRule { head, pos, neg, aggregates, origin })
}
