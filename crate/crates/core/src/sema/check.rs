use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::*;

/// Thresholds for the knowledge-engineering lints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct LintConfig {
    pub max_depth: usize,
    pub max_body_conditions: usize,
}

impl Default for LintConfig {
    fn default() -> Self {
        LintConfig {
            max_depth: 3,
            max_body_conditions: 6,
        }
    }
}

/// Resolve, then run every check. The library is returned when resolution succeeded.
pub fn analyze(
    ast: &SystemDescriptionAst,
    names: &SourceNames,
    lints: &LintConfig,
) -> (Option<ResolvedLibrary>, Diagnostics) {
    match resolve_named(ast, names) {
        Err(d) => (None, d),
        Ok(lib) => {
            let mut d = check_valid_attributes(&lib);
            d.extend(typecheck(&lib));
            d.extend(lint_kr_principles(&lib, lints));
            d.sort();
            (Some(lib), d)
        }
    }
}

/// Every function literal of an axiom, including heads and choice elements.
fn literals(ax: &Axiom) -> Vec<&FunctionLiteral> {
    let mut out = Vec::new();
    match &ax.kind {
        AxiomKind::DynamicCausalLaw { head, .. } => match head {
            CausalHead::Literal(l) => out.push(l),
            CausalHead::Choice(c) => out.push(&c.element),
            CausalHead::Undefine { .. } => {}
        },
        AxiomKind::StateConstraint { head: Some(l), .. } | AxiomKind::FunctionDefinition { head: l, .. } => {
            out.push(l)
        }
        _ => {}
    }
    for c in ax.all_conditions() {
        if let Condition::Function(l) = c {
            out.push(l);
        }
    }
    out
}

/// Classes named in `instance(X, c)` atoms, per variable.
fn instance_classes(ax: &Axiom) -> BTreeMap<String, Vec<String>> {
    let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for c in ax.all_conditions() {
        if let Condition::Instance { object: Term::Var(v), class } = c {
            out.entry(v.clone()).or_default().push(class.clone());
        }
    }
    out
}

fn is_attribute_name(lib: &ResolvedLibrary, name: &str) -> bool {
    lib.function(name).is_none() && lib.is_attribute(name)
}

/// Attribute validity: one declaration per attribute per class, and an `instance(X, c)`
/// atom next to every attribute literal `a(X, ...)`.
pub fn check_valid_attributes(lib: &ResolvedLibrary) -> Diagnostics {
    let mut d = Diagnostics::new();
    for c in lib.user_classes() {
        let file = lib.modules[c.module.as_deref().unwrap()].file.clone();
        let mut seen = BTreeSet::new();
        for a in &c.attributes {
            if !seen.insert(&a.name) {
                d.push(Diagnostic::error(
                    "VA1",
                    &file,
                    a.span,
                    format!("attribute `{}` is declared more than once in class `{}`", a.name, c.name),
                ));
            }
        }
    }
    for info in &lib.axioms {
        let ax = &info.axiom;
        let classes = instance_classes(ax);
        for l in literals(ax) {
            if !is_attribute_name(lib, &l.function) {
                continue;
            }
            let Some(Term::Var(x)) = l.args.first() else { continue };
            match classes.get(x) {
                None => d.push(Diagnostic::error(
                    "VA2",
                    &info.file,
                    ax.span,
                    format!(
                        "attribute literal `{}({}, ...)` needs an `instance({}, c)` atom in the same axiom",
                        l.function, x, x
                    ),
                )),
                Some(cs) => {
                    if !cs.iter().any(|c| lib.attribute(c, &l.function).is_some()) {
                        d.push(Diagnostic::warning(
                            "VA2-CLASS",
                            &info.file,
                            ax.span,
                            format!(
                                "no class among {} (or their ancestors) declares attribute `{}`",
                                cs.join(", "),
                                l.function
                            ),
                        ));
                    }
                }
            }
        }
    }
    d.sort();
    d
}

struct Sorter<'a> {
    lib: &'a ResolvedLibrary,
    classes: BTreeMap<String, Vec<String>>,
    vars: BTreeMap<String, BTreeSet<String>>,
    errors: Vec<String>,
}

impl<'a> Sorter<'a> {
    fn constrain(&mut self, t: &Term, sort: &str) {
        match t {
            Term::Var(v) => {
                self.vars.entry(v.clone()).or_default().insert(sort.to_string());
            }
            Term::Int(i) => self.errors.push(format!("integer {} used where sort `{}` is expected", i, sort)),
            _ => {
                let name = t.constant_name().unwrap();
                if self.lib.constant(&name).is_none() && t.is_boolean().is_none() {
                    self.errors.push(format!("unknown constant `{}`", t));
                } else if !self.lib.constant_in(&name, sort) {
                    self.errors.push(format!("constant `{}` is not of sort `{}`", t, sort));
                }
            }
        }
    }

    fn action(&mut self, t: &Term) {
        match t {
            Term::Ident(name) if self.lib.is_class(name) => {}
            _ => self.constrain(t, ACTIONS),
        }
    }

    /// Sorts of an attribute applied to `subject`, or `None` when it cannot be told.
    fn attribute_decl(&self, name: &str, subject: &Term) -> Option<AttributeDecl> {
        let classes: Vec<String> = match subject {
            Term::Var(v) => self.classes.get(v).cloned().unwrap_or_default(),
            t => t
                .constant_name()
                .and_then(|n| self.lib.constant(&n))
                .map(|c| c.sorts.clone())
                .unwrap_or_default(),
        };
        if let Some(a) = classes.iter().find_map(|c| self.lib.attribute(c, name)) {
            return Some(a.clone());
        }
        let decls: Vec<&AttributeDecl> = self
            .lib
            .attribute_owners(name)
            .into_iter()
            .flat_map(|o| self.lib.classes[o].attributes.iter().filter(|a| a.name == name))
            .collect();
        let first = decls.first()?;
        decls
            .iter()
            .all(|a| a.arg_sorts == first.arg_sorts && a.range == first.range)
            .then(|| (*first).clone())
    }

    /// Argument sorts and range of function or attribute `name`; attributes include their subject.
    fn signature(&mut self, name: &str, args: &[Term]) -> Option<(Vec<String>, String)> {
        if let Some(f) = self.lib.function(name) {
            if f.arg_sorts.len() != args.len() {
                self.errors.push(format!(
                    "`{}` takes {} argument(s), found {}",
                    name,
                    f.arg_sorts.len(),
                    args.len()
                ));
                return None;
            }
            return Some((f.arg_sorts.clone(), f.range.clone()));
        }
        if !self.lib.is_attribute(name) {
            return None;
        }
        let Some(subject) = args.first() else {
            self.errors.push(format!("attribute `{}` needs an action argument", name));
            return None;
        };
        let decl = self.attribute_decl(name, subject)?;
        if decl.arg_sorts.len() + 1 != args.len() {
            self.errors.push(format!(
                "attribute `{}` takes {} argument(s) after the action, found {}",
                name,
                decl.arg_sorts.len(),
                args.len() - 1
            ));
            return None;
        }
        let mut sorts = vec![ACTIONS.to_string()];
        sorts.extend(decl.arg_sorts);
        Some((sorts, decl.range))
    }

    fn literal(&mut self, l: &FunctionLiteral) {
        if let Some((arg_sorts, range)) = self.signature(&l.function, &l.args) {
            for (t, s) in l.args.iter().zip(&arg_sorts) {
                self.constrain(t, s);
            }
            if range != BOOLEANS && l.value.is_boolean().is_some() && l.relation == Relation::Eq {
                self.errors.push(format!("`{}` is not boolean-valued", l.function));
            } else {
                self.constrain(&l.value, &range);
            }
        }
    }

    fn dom(&mut self, function: &str, args: &[Term]) {
        if let Some((arg_sorts, _)) = self.signature(function, args) {
            for (t, s) in args.iter().zip(&arg_sorts) {
                self.constrain(t, s);
            }
        }
    }

    fn condition(&mut self, c: &Condition) {
        match c {
            Condition::Function(l) => self.literal(l),
            Condition::Dom { function, args, .. } => self.dom(function, args),
            Condition::Instance { object, class } => self.constrain(object, class),
            Condition::Occurs(o) => self.action(&o.action),
            Condition::Compare { .. } => {}
        }
    }
}

fn all_vars(ax: &Axiom) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut add = |t: &Term| {
        if let Term::Var(v) = t {
            out.insert(v.clone());
        }
    };
    match &ax.kind {
        AxiomKind::DynamicCausalLaw { action, head, .. } => {
            add(action);
            match head {
                CausalHead::Literal(l) => l.terms().for_each(&mut add),
                CausalHead::Choice(c) => c.element.terms().for_each(&mut add),
                CausalHead::Undefine { args, .. } => args.iter().for_each(&mut add),
            }
        }
        AxiomKind::ExecutabilityCondition { action, .. } => add(action),
        AxiomKind::StateConstraint { head: Some(l), .. } | AxiomKind::FunctionDefinition { head: l, .. } => {
            l.terms().for_each(&mut add)
        }
        _ => {}
    }
    for c in ax.all_conditions() {
        c.terms().into_iter().for_each(&mut add);
    }
    out
}

/// Most specific sorts of every variable of an axiom, or the typing errors found.
pub fn axiom_variable_sorts(lib: &ResolvedLibrary, ax: &Axiom) -> Result<BTreeMap<String, Vec<String>>, Vec<String>> {
    let mut s = Sorter {
        lib,
        classes: instance_classes(ax),
        vars: BTreeMap::new(),
        errors: Vec::new(),
    };
    match &ax.kind {
        AxiomKind::DynamicCausalLaw { action, head, .. } => {
            s.action(action);
            match head {
                CausalHead::Literal(l) => s.literal(l),
                CausalHead::Choice(c) => s.literal(&c.element),
                CausalHead::Undefine { function, args } => s.dom(function, args),
            }
        }
        AxiomKind::ExecutabilityCondition { action, .. } => s.action(action),
        AxiomKind::StateConstraint { head: Some(l), .. } | AxiomKind::FunctionDefinition { head: l, .. } => {
            s.literal(l)
        }
        AxiomKind::StateConstraint { head: None, .. } => {}
    }
    for c in ax.all_conditions() {
        s.condition(c);
    }
    let mut out = BTreeMap::new();
    for v in all_vars(ax) {
        match s.vars.get(&v) {
            None => s.errors.push(format!("cannot determine the sort of variable `{}`", v)),
            Some(sorts) => {
                if !lib.has_common_lower_bound(sorts.iter().map(String::as_str)) {
                    s.errors.push(format!(
                        "variable `{}` is used with incompatible sorts {}",
                        v,
                        sorts.iter().cloned().collect::<Vec<_>>().join(", ")
                    ));
                } else {
                    out.insert(v, lib.most_specific(sorts));
                }
            }
        }
    }
    if s.errors.is_empty() {
        Ok(out)
    } else {
        Err(s.errors)
    }
}

/// Sort discipline for declarations, axioms and the structure.
pub fn typecheck(lib: &ResolvedLibrary) -> Diagnostics {
    let mut d = Diagnostics::new();
    for f in lib.functions.values() {
        if f.decl.basicness == Basicness::Defined && f.decl.range != BOOLEANS {
            d.push(Diagnostic::error(
                "TYPE",
                &lib.modules[&f.module].file,
                f.decl.span,
                format!("defined fluent `{}` must be boolean-valued", f.decl.name),
            ));
        }
    }

    for info in &lib.axioms {
        let ax = &info.axiom;
        let mut err = |code: &str, msg: String| d.push(Diagnostic::error(code, &info.file, ax.span, msg));
        if let Err(msgs) = axiom_variable_sorts(lib, ax) {
            for m in msgs {
                err("TYPE", m);
            }
        }
        match &ax.kind {
            AxiomKind::DynamicCausalLaw { head, .. } => {
                let name = head.function();
                match lib.function(name) {
                    None => err("DCL-HEAD", format!("attribute `{}` cannot be changed by an action", name)),
                    Some(f) if f.is_defined_fluent() && matches!(head, CausalHead::Choice(_)) => err(
                        "CHOICE-DEFINED",
                        format!("choice head over defined fluent `{}`; the choice must concern a basic fluent", name),
                    ),
                    Some(f) if !f.is_basic_fluent() => err(
                        "DCL-HEAD",
                        format!("head of a dynamic causal law must be a basic fluent, `{}` is not", name),
                    ),
                    Some(f) if f.total && matches!(head, CausalHead::Undefine { .. }) => {
                        err("TYPE", format!("total fluent `{}` cannot become undefined", name))
                    }
                    _ => {}
                }
            }
            AxiomKind::StateConstraint { head: Some(l), .. } => {
                if lib.function(&l.function).is_none() {
                    err("TYPE", format!("attribute `{}` cannot be the head of a state constraint", l.function));
                }
            }
            AxiomKind::FunctionDefinition { head, .. } => {
                if head.value.is_boolean() != Some(true) || head.relation != Relation::Eq {
                    err("TYPE", format!("definition of `{}` must have a positive head", head.function));
                }
            }
            _ => {}
        }
    }

    if let Some(s) = &lib.structure {
        let file = &lib.structure_file;
        let sort_of = |t: &Term, sort: &str| -> Option<String> {
            let name = t.constant_name()?;
            if lib.constant(&name).is_none() && t.is_boolean().is_none() {
                return Some(format!("undeclared constant `{}`", t));
            }
            (!lib.constant_in(&name, sort)).then(|| format!("constant `{}` is not of sort `{}`", t, sort))
        };
        for def in &s.instances {
            if !lib.is_class(&def.class) {
                continue;
            }
            for b in &def.bindings {
                let Some(a) = lib.attribute(&def.class, &b.name) else {
                    d.push(Diagnostic::error(
                        "TYPE",
                        file,
                        def.span,
                        format!("class `{}` has no attribute `{}`", def.class, b.name),
                    ));
                    continue;
                };
                if a.arg_sorts.len() != b.args.len() {
                    d.push(Diagnostic::error(
                        "TYPE",
                        file,
                        def.span,
                        format!("attribute `{}` takes {} argument(s)", b.name, a.arg_sorts.len()),
                    ));
                    continue;
                }
                let pairs = b.args.iter().zip(&a.arg_sorts).chain(std::iter::once((&b.value, &a.range)));
                for (t, sort) in pairs {
                    if let Some(msg) = sort_of(t, sort) {
                        d.push(Diagnostic::error(
                            "TYPE",
                            file,
                            def.span,
                            format!("{} in `{} = {}` of `{}`", msg, b.name, b.value, def.name),
                        ));
                    }
                }
            }
        }
        for (section, defs) in [("statics", &s.statics), ("initially", &s.initially)] {
            for v in defs {
                let l = &v.literal;
                let Some(f) = lib.function(&l.function) else {
                    d.push(Diagnostic::error("UNKNOWN-FN", file, v.span, format!("unknown function `{}`", l.function)));
                    continue;
                };
                let ok_kind = match section {
                    "statics" => f.kind == FunctionKind::Static,
                    _ => f.is_basic_fluent(),
                };
                if !ok_kind {
                    d.push(Diagnostic::error(
                        "TYPE",
                        file,
                        v.span,
                        format!("`{}` cannot be given a value under `{}`", l.function, section),
                    ));
                }
                if f.arg_sorts.len() != l.args.len() {
                    d.push(Diagnostic::error(
                        "TYPE",
                        file,
                        v.span,
                        format!("`{}` takes {} argument(s)", l.function, f.arg_sorts.len()),
                    ));
                    continue;
                }
                for (t, sort) in l.args.iter().zip(&f.arg_sorts).chain(std::iter::once((&l.value, &f.range))) {
                    if t.is_var() {
                        d.push(Diagnostic::error("TYPE", file, v.span, format!("variable `{}` in a structure", t)));
                    } else if let Some(msg) = sort_of(t, sort) {
                        d.push(Diagnostic::error("TYPE", file, v.span, msg));
                    }
                }
            }
        }
        for h in &s.history {
            let ok = h.action.constant_name().is_some_and(|n| lib.instance(&n).is_some());
            if !ok {
                d.push(Diagnostic::error(
                    "TYPE",
                    file,
                    h.span,
                    format!("`{}` in the history is not an action instance", h.action),
                ));
            }
        }
    }
    d.sort();
    d
}

/// Classes a literal's subject is known to belong to; `None` when unconstrained.
fn subject_classes(lib: &ResolvedLibrary, ax: &Axiom, l: &FunctionLiteral) -> Option<Vec<String>> {
    match l.args.first()? {
        Term::Var(v) => instance_classes(ax).get(v).cloned(),
        t => t.constant_name().and_then(|n| lib.constant(&n)).map(|c| c.sorts.clone()),
    }
}

/// Warnings for knowledge-engineering principles: shallow hierarchy, attributes low
/// in the hierarchy, no unused attributes, short causal-law bodies.
pub fn lint_kr_principles(lib: &ResolvedLibrary, cfg: &LintConfig) -> Diagnostics {
    let mut d = Diagnostics::new();
    for c in lib.user_classes() {
        let depth = lib.class_depth(&c.name);
        if depth > cfg.max_depth {
            d.push(Diagnostic::warning(
                "LINT-DEPTH",
                &lib.modules[c.module.as_deref().unwrap()].file,
                c.span,
                format!(
                    "class `{}` is {} subclass links below a built-in class (limit {})",
                    c.name, depth, cfg.max_depth
                ),
            ));
        }
    }

    // attribute uses: (attribute name) -> subject classes per use (None = unconstrained)
    let mut uses: BTreeMap<String, Vec<Option<Vec<String>>>> = BTreeMap::new();
    for info in &lib.axioms {
        let ax = &info.axiom;
        for l in literals(ax) {
            if is_attribute_name(lib, &l.function) {
                uses.entry(l.function.clone()).or_default().push(subject_classes(lib, ax, l));
            }
        }
        for c in ax.all_conditions() {
            if let Condition::Dom { function, args, .. } = c {
                if is_attribute_name(lib, function) {
                    let probe = FunctionLiteral::boolean(function.clone(), args.clone(), true);
                    uses.entry(function.clone()).or_default().push(subject_classes(lib, ax, &probe));
                }
        }
        }
        if let AxiomKind::DynamicCausalLaw { conditions, .. } = &ax.kind {
            if conditions.len() > cfg.max_body_conditions {
                d.push(Diagnostic::warning(
                    "LINT-BODY",
                    &info.file,
                    ax.span,
                    format!(
                        "dynamic causal law has {} body conditions (limit {}); move conditions to executability conditions",
                        conditions.len(),
                        cfg.max_body_conditions
                    ),
                ));
            }
        }
    }

    for c in lib.user_classes() {
        let file = &lib.modules[c.module.as_deref().unwrap()].file;
        for a in &c.attributes {
            let related = |cls: &String| lib.is_subclass(cls, &c.name) || lib.is_subclass(&c.name, cls);
            let relevant: Vec<&Option<Vec<String>>> = uses
                .get(&a.name)
                .map(|u| {
                    u.iter()
                        .filter(|subj| subj.as_ref().is_none_or(|cs| cs.iter().any(related)))
                        .collect()
                })
                .unwrap_or_default();
            if relevant.is_empty() {
                d.push(Diagnostic::warning(
                    "LINT-UNUSED-ATTR",
                    file,
                    a.span,
                    format!("attribute `{}` of `{}` appears in no axiom", a.name, c.name),
                ));
                continue;
            }
            let only_lower = relevant.iter().all(|subj| {
                subj.as_ref()
                    .is_some_and(|cs| cs.iter().all(|s| s != &c.name && lib.is_subclass(s, &c.name)))
            });
            if only_lower {
                d.push(Diagnostic::warning(
                    "LINT-ATTR-HIGH",
                    file,
                    a.span,
                    format!(
                        "attribute `{}` of `{}` is only used by axioms about its subclasses; declare it lower",
                        a.name, c.name
                    ),
                ));
            }
        }
    }
    d.sort();
    d
}
