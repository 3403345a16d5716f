//! ALM system description to relational ASP.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::*;
use crate::sema::{axiom_variable_sorts, AxiomInfo, ResolvedLibrary};
use crate::syntax::{
    Axiom, AxiomKind, CausalHead, Condition, FunctionDecl, FunctionKind, FunctionLiteral, Relation, Term, BOOLEANS,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("{file}:{line}: {message}")]
    Axiom { file: String, line: u32, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialState {
    /// Basic boolean fluents start false, other fluents undefined, unless the
    /// structure says otherwise.
    #[default]
    Closed,
    /// Every basic fluent may take any value, or none, at step 0.
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Occurrences {
    /// Any set of action instances may occur at every step.
    #[default]
    Free,
    /// Occurrences are supplied from outside (history facts or extra rules).
    External,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TranslateOptions {
    pub horizon: u32,
    pub initial: InitialState,
    pub occurrences: Occurrences,
}

impl TranslateOptions {
    pub fn new(horizon: u32) -> Self {
        TranslateOptions {
            horizon,
            initial: InitialState::Closed,
            occurrences: Occurrences::Free,
        }
    }
}

const STEP: &str = "I";

fn step() -> AspTerm {
    AspTerm::var(STEP)
}

fn next_step() -> AspTerm {
    AspTerm::Add(Box::new(step()), 1)
}

fn pos(pred: &str, args: Vec<AspTerm>) -> Literal {
    Literal::Pos(Atom::new(pred, args))
}

/// Program for `lib` with the default options and the given horizon.
pub fn translate(lib: &ResolvedLibrary, horizon: u32) -> Result<AspProgram, TranslateError> {
    translate_with(lib, &TranslateOptions::new(horizon))
}

pub fn translate_with(lib: &ResolvedLibrary, opts: &TranslateOptions) -> Result<AspProgram, TranslateError> {
    if opts.horizon == 0 {
        return Err(TranslateError::ZeroHorizon);
    }
    let mut symbols = SymbolTable::new();
    for name in lib.constants.keys() {
        symbols.intern(name);
    }
    let ctx = Ctx { lib, symbols: &symbols };

    let outs = crate::par::map(&lib.axioms, |info| ctx.axiom(info));
    let mut needs = Needs::default();
    let mut axiom_rules = Vec::new();
    for out in outs {
        let (rules, n) = out?;
        axiom_rules.extend(rules);
        needs.merge(n);
    }

    let mut p = AspProgram {
        rules: Vec::new(),
        horizon: opts.horizon,
        symbols: symbols.clone(),
        functions: shapes(lib),
    };
    p.extend(ctx.facts(opts.horizon));
    p.extend(axiom_rules);
    p.extend(ctx.function_rules(&needs, opts.initial));
    p.extend(occurrence_rules(&needs, opts.occurrences));
    Ok(p)
}

fn shapes(lib: &ResolvedLibrary) -> BTreeMap<String, FunctionShape> {
    let mut out = BTreeMap::new();
    for f in lib.functions.values() {
        out.insert(
            f.decl.name.clone(),
            FunctionShape {
                arity: f.decl.arg_sorts.len(),
                fluent: f.decl.kind == FunctionKind::Fluent,
            },
        );
    }
    for c in lib.user_classes() {
        for a in &c.attributes {
            out.entry(a.name.clone()).or_insert(FunctionShape {
                arity: 1 + a.arg_sorts.len(),
                fluent: false,
            });
        }
    }
    out
}

/// Auxiliary rules the axioms ask for.
#[derive(Default)]
struct Needs {
    dom: BTreeSet<String>,
    undef: BTreeSet<String>,
    chosen: BTreeSet<String>,
    occurs_classes: BTreeSet<String>,
}

impl Needs {
    fn merge(&mut self, o: Needs) {
        self.dom.extend(o.dom);
        self.undef.extend(o.undef);
        self.chosen.extend(o.chosen);
        self.occurs_classes.extend(o.occurs_classes);
    }
}

struct Ctx<'a> {
    lib: &'a ResolvedLibrary,
    symbols: &'a SymbolTable,
}

/// Per-axiom translation state.
struct AxiomCx {
    rename: BTreeMap<String, String>,
    used: BTreeSet<String>,
    needs: Needs,
}

impl AxiomCx {
    fn fresh(&mut self, base: &str) -> String {
        let mut n = 1;
        loop {
            let v = format!("{}_{}", base, n);
            if self.used.insert(v.clone()) {
                return v;
            }
            n += 1;
        }
    }

    fn var(&self, v: &str) -> String {
        self.rename.get(v).cloned().unwrap_or_else(|| v.to_string())
    }
}

impl Ctx<'_> {
    fn err(&self, info: &AxiomInfo, message: impl Into<String>) -> TranslateError {
        TranslateError::Axiom {
            file: info.file.clone(),
            line: info.axiom.span.line,
            message: message.into(),
        }
    }

    fn term(&self, cx: &AxiomCx, t: &Term) -> AspTerm {
        match t {
            Term::Var(v) => AspTerm::Var(cx.var(v)),
            Term::Int(i) => AspTerm::Int(*i),
            Term::Ident(s) | Term::Quoted(s) => self.constant(s),
        }
    }

    fn constant(&self, s: &str) -> AspTerm {
        AspTerm::Sym(self.symbols.get(s).map(str::to_string).unwrap_or_else(|| mangle(s)))
    }

    fn decl(&self, f: &str) -> Option<&FunctionDecl> {
        self.lib.function(f)
    }

    fn is_fluent(&self, f: &str) -> bool {
        self.decl(f).is_some_and(|d| d.kind == FunctionKind::Fluent)
    }

    fn is_defined(&self, f: &str) -> bool {
        self.decl(f).is_some_and(|d| d.basicness == crate::syntax::Basicness::Defined)
    }

    fn val_atom(&self, f: &str, mut args: Vec<AspTerm>, value: AspTerm, at: &AspTerm) -> Atom {
        args.push(value);
        if self.is_fluent(f) {
            args.push(at.clone());
        }
        Atom::new(format!("val_{}", f), args)
    }

    fn uses_fluents(&self, ax: &Axiom) -> bool {
        ax.all_conditions().iter().any(|c| match c {
            Condition::Function(l) => self.is_fluent(&l.function),
            Condition::Dom { function, .. } => self.is_fluent(function),
            Condition::Occurs(_) => true,
            _ => false,
        })
    }

    fn condition(&self, cx: &mut AxiomCx, c: &Condition, at: &AspTerm) -> Vec<Literal> {
        match c {
            Condition::Function(l) => self.function_condition(cx, l, at),
            Condition::Dom { positive, function, args } => {
                cx.needs.dom.insert(function.clone());
                let mut xs: Vec<AspTerm> = args.iter().map(|a| self.term(cx, a)).collect();
                if self.is_fluent(function) {
                    xs.push(at.clone());
                }
                let a = Atom::new(format!("dom_{}", function), xs);
                vec![if *positive { Literal::Pos(a) } else { Literal::Not(a) }]
            }
            Condition::Instance { object, class } => {
                vec![pos("instance", vec![self.term(cx, object), AspTerm::sym(class.clone())])]
            }
            Condition::Compare { lhs, relation, rhs } => {
                let op = match relation {
                    Relation::Eq => CmpOp::Eq,
                    Relation::Neq => CmpOp::Neq,
                };
                vec![Literal::Cmp(self.term(cx, lhs), op, self.term(cx, rhs))]
            }
            Condition::Occurs(o) => {
                let a = match &o.action {
                    Term::Ident(c) if self.lib.is_class(c) => {
                        cx.needs.occurs_classes.insert(c.clone());
                        Atom::new(format!("occurs_{}", c), vec![at.clone()])
                    }
                    t => Atom::new("occurs", vec![self.term(cx, t), at.clone()]),
                };
                vec![if o.positive { Literal::Pos(a) } else { Literal::Not(a) }]
            }
        }
    }

    fn function_condition(&self, cx: &mut AxiomCx, l: &FunctionLiteral, at: &AspTerm) -> Vec<Literal> {
        let args: Vec<AspTerm> = l.args.iter().map(|a| self.term(cx, a)).collect();
        if self.is_defined(&l.function) {
            // closed world: only `true` is ever derived
            let truth = match (l.relation, l.value.is_boolean()) {
                (Relation::Eq, Some(b)) => Some(b),
                (Relation::Neq, Some(b)) => Some(!b),
                _ => None,
            };
            if let Some(b) = truth {
                let a = self.val_atom(&l.function, args, AspTerm::sym("true"), at);
                return vec![if b { Literal::Pos(a) } else { Literal::Not(a) }];
            }
        }
        match l.relation {
            Relation::Eq => {
                let v = self.term(cx, &l.value);
                vec![Literal::Pos(self.val_atom(&l.function, args, v, at))]
            }
            Relation::Neq => {
                let w = AspTerm::Var(cx.fresh("V"));
                let v = self.term(cx, &l.value);
                vec![
                    Literal::Pos(self.val_atom(&l.function, args, w.clone(), at)),
                    Literal::Cmp(w, CmpOp::Neq, v),
                ]
            }
        }
    }

    fn axiom(&self, info: &AxiomInfo) -> Result<(Vec<Rule>, Needs), TranslateError> {
        let ax = &info.axiom;
        let sorts = axiom_variable_sorts(self.lib, ax).map_err(|m| self.err(info, m.join("; ")))?;

        let mut vars = BTreeSet::new();
        for v in sorts.keys() {
            vars.insert(v.clone());
        }
        let mut cx = AxiomCx {
            rename: BTreeMap::new(),
            used: vars.clone(),
            needs: Needs::default(),
        };
        for v in &vars {
            if v == STEP {
                let r = cx.fresh("I");
                cx.rename.insert(v.clone(), r);
            }
        }
        cx.used.insert(STEP.to_string());

        let explicit: BTreeSet<(String, String)> = ax
            .all_conditions()
            .iter()
            .filter_map(|c| match c {
                Condition::Instance { object: Term::Var(v), class } => Some((v.clone(), class.clone())),
                _ => None,
            })
            .collect();
        let guards_for = |cx: &AxiomCx, vs: &BTreeSet<String>| -> Vec<Literal> {
            let mut out = Vec::new();
            for v in vs {
                for s in sorts.get(v).into_iter().flatten() {
                    if !explicit.contains(&(v.clone(), s.clone())) {
                        out.push(pos("instance", vec![AspTerm::Var(cx.var(v)), AspTerm::sym(s.clone())]));
                    }
                }
            }
            out
        };

        // variables of the choice element that the body does not bind
        let mut local = BTreeSet::new();
        if let AxiomKind::DynamicCausalLaw { action, head: CausalHead::Choice(c), conditions } = &ax.kind {
            let mut outer = BTreeSet::new();
            collect_vars(action, &mut outer);
            for cond in conditions {
                for t in cond.terms() {
                    collect_vars(t, &mut outer);
                }
            }
            let mut inner = BTreeSet::new();
            for t in c.element.terms() {
                collect_vars(t, &mut inner);
            }
            for cond in &c.element_conditions {
                for t in cond.terms() {
                    collect_vars(t, &mut inner);
                }
            }
            local = inner.difference(&outer).cloned().collect();
        }
        let global: BTreeSet<String> = vars.difference(&local).cloned().collect();

        let comment = format!(
            "{}: {} at {}:{}",
            info.module,
            ax.kind_name(),
            info.file,
            ax.span.line
        );
        let now = step();
        let mut rules = Vec::new();
        match &ax.kind {
            AxiomKind::DynamicCausalLaw { action, head, conditions } => {
                let mut body = vec![pos("occurs", vec![self.term(&cx, action), now.clone()])];
                for c in conditions {
                    body.extend(self.condition(&mut cx, c, &now));
                }
                body.extend(guards_for(&cx, &global));
                body.push(pos("astep", vec![now.clone()]));
                let head = match head {
                    CausalHead::Literal(l) => {
                        if l.relation != Relation::Eq {
                            return Err(self.err(info, "causal law head must be an equality"));
                        }
                        let args = l.args.iter().map(|a| self.term(&cx, a)).collect();
                        Head::Atom(self.val_atom(&l.function, args, self.term(&cx, &l.value), &next_step()))
                    }
                    CausalHead::Undefine { function, args } => {
                        cx.needs.undef.insert(function.clone());
                        let mut xs: Vec<AspTerm> = args.iter().map(|a| self.term(&cx, a)).collect();
                        xs.push(next_step());
                        Head::Atom(Atom::new(format!("undef_{}", function), xs))
                    }
                    CausalHead::Choice(c) => {
                        let l = &c.element;
                        if l.relation != Relation::Eq {
                            return Err(self.err(info, "choice element must be an equality"));
                        }
                        cx.needs.chosen.insert(l.function.clone());
                        let mut args: Vec<AspTerm> = l.args.iter().map(|a| self.term(&cx, a)).collect();
                        args.push(self.term(&cx, &l.value));
                        args.push(next_step());
                        let atom = Atom::new(format!("chosen_{}", l.function), args);
                        let mut conds = Vec::new();
                        for ec in &c.element_conditions {
                            conds.extend(self.condition(&mut cx, ec, &now));
                        }
                        conds.extend(guards_for(&cx, &local));
                        Head::Choice {
                            lower: Some(c.lower),
                            upper: Some(c.upper),
                            elements: vec![ChoiceElement { atom, conditions: conds }],
                        }
                    }
                };
                rules.push(Rule { head, body, comment: Some(comment) });
            }
            AxiomKind::ExecutabilityCondition { action, conditions } => {
                let mut body = Vec::new();
                for c in conditions {
                    body.extend(self.condition(&mut cx, c, &now));
                }
                body.extend(guards_for(&cx, &global));
                body.push(pos("astep", vec![now.clone()]));
                let head = Head::Atom(Atom::new("neg_occurs", vec![self.term(&cx, action), now.clone()]));
                rules.push(Rule { head, body, comment: Some(comment) });
            }
            AxiomKind::StateConstraint { head, conditions } => {
                let timed = self.uses_fluents(ax) || head.as_ref().is_some_and(|h| self.is_fluent(&h.function));
                let mut body = Vec::new();
                for c in conditions {
                    body.extend(self.condition(&mut cx, c, &now));
                }
                body.extend(guards_for(&cx, &global));
                if timed {
                    body.push(pos("step", vec![now.clone()]));
                }
                let head = match head {
                    None => Head::None,
                    Some(l) => {
                        if l.relation != Relation::Eq {
                            return Err(self.err(info, "state constraint head must be an equality"));
                        }
                        if !self.is_fluent(&l.function) && timed {
                            return Err(self.err(info, "a static cannot depend on fluents"));
                        }
                        let args = l.args.iter().map(|a| self.term(&cx, a)).collect();
                        Head::Atom(self.val_atom(&l.function, args, self.term(&cx, &l.value), &now))
                    }
                };
                rules.push(Rule { head, body, comment: Some(comment) });
            }
            AxiomKind::FunctionDefinition { head, conditions } => {
                let timed = self.is_fluent(&head.function);
                let mut body = Vec::new();
                for c in conditions {
                    body.extend(self.condition(&mut cx, c, &now));
                }
                body.extend(guards_for(&cx, &global));
                if timed {
                    body.push(pos("step", vec![now.clone()]));
                }
                let args = head.args.iter().map(|a| self.term(&cx, a)).collect();
                let h = Head::Atom(self.val_atom(&head.function, args, self.term(&cx, &head.value), &now));
                rules.push(Rule { head: h, body, comment: Some(comment) });
            }
        }
        Ok((rules, cx.needs))
    }

    fn facts(&self, horizon: u32) -> Vec<Rule> {
        let lib = self.lib;
        let mut out = Vec::new();
        for i in 0..=horizon {
            out.push(Rule::fact(Atom::new("step", vec![AspTerm::Int(i as i64)])));
        }
        for i in 0..horizon {
            out.push(Rule::fact(Atom::new("astep", vec![AspTerm::Int(i as i64)])));
        }
        for c in lib.classes.keys() {
            for a in lib.ancestors(c) {
                out.push(Rule::fact(Atom::new("subclass", vec![AspTerm::sym(c.clone()), AspTerm::sym(a)])));
            }
        }
        for b in ["true", "false"] {
            out.push(Rule::fact(Atom::new("instance", vec![AspTerm::sym(b), AspTerm::sym(BOOLEANS)])));
        }
        for (name, info) in &lib.constants {
            let mut classes = BTreeSet::new();
            for s in &info.sorts {
                classes.extend(lib.ancestors(s));
            }
            for c in classes {
                out.push(Rule::fact(Atom::new("instance", vec![self.constant(name), AspTerm::sym(c)])));
            }
        }
        let cx = AxiomCx {
            rename: BTreeMap::new(),
            used: BTreeSet::new(),
            needs: Needs::default(),
        };
        for inst in &lib.instances {
            let x = self.term(&cx, &inst.name);
            for b in &inst.bindings {
                let mut args = vec![x.clone()];
                args.extend(b.args.iter().map(|a| self.term(&cx, a)));
                args.push(self.term(&cx, &b.value));
                out.push(Rule::fact(Atom::new(format!("val_{}", b.name), args)));
            }
        }
        if let Some(s) = &lib.structure {
            let zero = AspTerm::Int(0);
            for v in s.statics.iter().chain(&s.initially) {
                let l = &v.literal;
                let args = l.args.iter().map(|a| self.term(&cx, a)).collect();
                out.push(Rule::fact(self.val_atom(&l.function, args, self.term(&cx, &l.value), &zero)));
            }
            for h in &s.history {
                out.push(Rule::fact(Atom::new(
                    "occurs",
                    vec![self.term(&cx, &h.action), AspTerm::Int(h.step as i64)],
                )));
            }
        }
        out
    }

    /// Inertia, uniqueness, domains, totality and the initial state.
    fn function_rules(&self, needs: &Needs, initial: InitialState) -> Vec<Rule> {
        let mut out = Vec::new();
        let value = AspTerm::var("V");
        let other = AspTerm::var("W");
        let shapes = shapes(self.lib);
        for (name, shape) in &shapes {
            let decl = self.decl(name);
            let basic_fluent = decl.is_some_and(|d| d.is_basic_fluent());
            let defined = decl.is_some_and(|d| d.basicness == crate::syntax::Basicness::Defined);
            let xs: Vec<AspTerm> = (1..=shape.arity).map(|i| AspTerm::var(format!("X{}", i))).collect();
            let with = |v: &AspTerm, t: Option<AspTerm>| {
                let mut a = xs.clone();
                a.push(v.clone());
                a.extend(t);
                Atom::new(format!("val_{}", name), a)
            };
            let dom = |t: Option<AspTerm>| {
                let mut a = xs.clone();
                a.extend(t);
                Atom::new(format!("dom_{}", name), a)
            };
            let arg_guards: Vec<Literal> = match decl {
                Some(d) => xs
                    .iter()
                    .zip(&d.arg_sorts)
                    .map(|(x, s)| pos("instance", vec![x.clone(), AspTerm::sym(s.clone())]))
                    .collect(),
                None => Vec::new(),
            };
            let t = if shape.fluent { Some(step()) } else { None };
            let tag = |what: &str| format!("{}: {}", what, name);

            if basic_fluent {
                let mut inertia_body = vec![
                    Literal::Pos(with(&value, Some(step()))),
                    pos("astep", vec![step()]),
                    Literal::Not({
                        let mut a = xs.clone();
                        a.push(value.clone());
                        a.push(next_step());
                        Atom::new(format!("other_{}", name), a)
                    }),
                ];
                if needs.undef.contains(name) {
                    let mut a = xs.clone();
                    a.push(next_step());
                    inertia_body.push(Literal::Not(Atom::new(format!("undef_{}", name), a)));
                }
                out.push(Rule::new(Head::Atom(with(&value, Some(next_step()))), inertia_body).with_comment(tag("inertia")));
                let mut oa = xs.clone();
                oa.push(value.clone());
                oa.push(next_step());
                out.push(
                    Rule::new(
                        Head::Atom(Atom::new(format!("other_{}", name), oa)),
                        vec![
                            Literal::Pos(with(&value, Some(step()))),
                            Literal::Pos(with(&other, Some(next_step()))),
                            Literal::Cmp(value.clone(), CmpOp::Neq, other.clone()),
                            pos("astep", vec![step()]),
                        ],
                    )
                    .with_comment(tag("inertia")),
                );
                if needs.undef.contains(name) {
                    let mut a = xs.clone();
                    a.push(step());
                    out.push(
                        Rule::new(
                            Head::None,
                            vec![Literal::Pos(Atom::new(format!("undef_{}", name), a)), Literal::Pos(dom(Some(step())))],
                        )
                        .with_comment(tag("undefined after")),
                    );
                }
                if needs.chosen.contains(name) {
                    let mut a = xs.clone();
                    a.push(value.clone());
                    a.push(step());
                    out.push(
                        Rule::new(
                            Head::Atom(with(&value, Some(step()))),
                            vec![Literal::Pos(Atom::new(format!("chosen_{}", name), a))],
                        )
                        .with_comment(tag("choice effect")),
                    );
                }
                match initial {
                    InitialState::Closed => {
                        if decl.is_some_and(|d| d.is_boolean()) {
                            let zero = Some(AspTerm::Int(0));
                            let mut body = arg_guards.clone();
                            body.push(Literal::Not(with(&AspTerm::sym("true"), zero.clone())));
                            out.push(
                                Rule::new(Head::Atom(with(&AspTerm::sym("false"), zero)), body)
                                    .with_comment(tag("closed initial state")),
                            );
                        }
                    }
                    InitialState::Open => {
                        let range = decl.map(|d| d.range.clone()).unwrap_or_default();
                        out.push(
                            Rule::new(
                                Head::Choice {
                                    lower: None,
                                    upper: Some(1),
                                    elements: vec![ChoiceElement {
                                        atom: with(&value, Some(AspTerm::Int(0))),
                                        conditions: vec![pos("instance", vec![value.clone(), AspTerm::sym(range)])],
                                    }],
                                },
                                arg_guards.clone(),
                            )
                            .with_comment(tag("open initial state")),
                        );
                    }
                }
            }
            if !defined {
                // uniqueness
                let mut body = vec![Literal::Pos(with(&value, t.clone())), Literal::Pos(with(&other, t.clone()))];
                body.push(Literal::Cmp(value.clone(), CmpOp::Neq, other.clone()));
                out.push(Rule::new(Head::None, body).with_comment(tag("uniqueness")));
            }
            let total = decl.is_some_and(|d| d.total);
            if basic_fluent || needs.dom.contains(name) || total {
                if defined {
                    let mut body = arg_guards.clone();
                    body.extend(t.clone().map(|s| pos("step", vec![s])));
                    out.push(Rule::new(Head::Atom(dom(t.clone())), body).with_comment(tag("domain")));
                } else {
                    out.push(
                        Rule::new(Head::Atom(dom(t.clone())), vec![Literal::Pos(with(&value, t.clone()))])
                            .with_comment(tag("domain")),
                    );
                }
            }
            if total {
                let mut body = arg_guards.clone();
                body.extend(t.clone().map(|s| pos("step", vec![s])));
                body.push(Literal::Not(dom(t.clone())));
                out.push(Rule::new(Head::None, body).with_comment(tag("totality")));
            }
        }
        out
    }
}

fn occurrence_rules(needs: &Needs, occ: Occurrences) -> Vec<Rule> {
    let x = AspTerm::var("X");
    let mut out = vec![Rule::new(
        Head::None,
        vec![pos("occurs", vec![x.clone(), step()]), pos("neg_occurs", vec![x.clone(), step()])],
    )
    .with_comment("executability")];
    for c in &needs.occurs_classes {
        out.push(
            Rule::new(
                Head::Atom(Atom::new(format!("occurs_{}", c), vec![step()])),
                vec![pos("occurs", vec![x.clone(), step()]), pos("instance", vec![x.clone(), AspTerm::sym(c.clone())])],
            )
            .with_comment(format!("occurrence of some {}", c)),
        );
    }
    if occ == Occurrences::Free {
        out.push(
            Rule::new(
                Head::Choice {
                    lower: None,
                    upper: None,
                    elements: vec![ChoiceElement {
                        atom: Atom::new("occurs", vec![x.clone(), step()]),
                        conditions: vec![pos("instance", vec![x, AspTerm::sym("actions")])],
                    }],
                },
                vec![pos("astep", vec![step()])],
            )
            .with_comment("free occurrences"),
        );
    }
    out
}

fn collect_vars(t: &Term, out: &mut BTreeSet<String>) {
    if let Term::Var(v) = t {
        out.insert(v.clone());
    }
}
