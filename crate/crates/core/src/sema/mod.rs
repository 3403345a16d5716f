//! Name resolution, class hierarchy, validity checks and typing for ALM.
//!
//! [`resolve`] binds every name in a parsed system description and builds the
//! module graph and class DAG. The checks in [`check`] then run over the
//! resolved library and only report diagnostics.

mod check;
mod diagnostics;

use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexMap;
use serde::Serialize;

use crate::syntax::*;

pub use check::{
    analyze, axiom_variable_sorts, check_valid_attributes, lint_kr_principles, typecheck,
    LintConfig,
};
pub use diagnostics::{Diagnostic, Diagnostics, Severity};

pub const UNIVERSE: &str = "universe";
pub const ACTIONS: &str = "actions";
pub const BUILTIN_CLASSES: [&str; 3] = [UNIVERSE, ACTIONS, BOOLEANS];

/// File names used in diagnostics. Modules default to `<name>.alm`.
#[derive(Debug, Clone, Default)]
pub struct SourceNames {
    pub modules: BTreeMap<String, String>,
    pub structure: Option<String>,
}

impl SourceNames {
    pub fn module(&self, name: &str) -> String {
        self.modules
            .get(name)
            .cloned()
            .unwrap_or_else(|| format!("{}.alm", name))
    }

    pub fn structure(&self) -> String {
        self.structure.clone().unwrap_or_else(|| "structure.alm".into())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ModuleInfo {
    pub name: String,
    pub file: String,
    pub imports: Vec<String>,
    #[serde(skip)]
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct ClassInfo {
    pub name: String,
    pub parents: Vec<String>,
    /// `None` for built-in classes.
    pub module: Option<String>,
    pub attributes: Vec<AttributeDecl>,
    pub span: Span,
}

impl ClassInfo {
    pub fn is_builtin(&self) -> bool {
        self.module.is_none()
    }
}

#[derive(Debug, Clone)]
pub struct FunctionInfo {
    pub decl: FunctionDecl,
    pub module: String,
}

#[derive(Debug, Clone)]
pub struct AxiomInfo {
    pub axiom: Axiom,
    pub module: String,
    pub file: String,
}

/// A constant introduced by the structure: an object (`c in sort`) or an action instance.
#[derive(Debug, Clone)]
pub struct ConstantInfo {
    pub term: Term,
    /// Declared sorts, most specific first.
    pub sorts: Vec<String>,
    /// Index into `ResolvedLibrary::instances` for action instances.
    pub instance: Option<usize>,
    pub span: Span,
}

impl ConstantInfo {
    pub fn sort(&self) -> &str {
        &self.sorts[0]
    }
}

/// A name-resolved system description.
#[derive(Debug, Clone)]
pub struct ResolvedLibrary {
    pub modules: IndexMap<String, ModuleInfo>,
    pub classes: IndexMap<String, ClassInfo>,
    pub functions: IndexMap<String, FunctionInfo>,
    pub axioms: Vec<AxiomInfo>,
    pub structure: Option<StructureAst>,
    pub structure_file: String,
    pub constants: IndexMap<String, ConstantInfo>,
    /// Action instances of the structure.
    pub instances: Vec<InstanceDef>,
    ancestors: BTreeMap<String, BTreeSet<String>>,
}

impl ResolvedLibrary {
    pub fn class(&self, name: &str) -> Option<&ClassInfo> {
        self.classes.get(name)
    }

    pub fn is_class(&self, name: &str) -> bool {
        self.classes.contains_key(name)
    }

    /// Reflexive-transitive superclasses of `class` (empty for unknown names).
    pub fn ancestors(&self, class: &str) -> BTreeSet<String> {
        self.ancestors.get(class).cloned().unwrap_or_default()
    }

    /// `sub ⊑ sup` (reflexive).
    pub fn is_subclass(&self, sub: &str, sup: &str) -> bool {
        self.ancestors.get(sub).is_some_and(|a| a.contains(sup))
    }

    /// Reflexive-transitive subclasses of `class`.
    pub fn descendants(&self, class: &str) -> BTreeSet<String> {
        self.ancestors
            .iter()
            .filter(|(_, anc)| anc.contains(class))
            .map(|(c, _)| c.clone())
            .collect()
    }

    pub fn is_action_class(&self, class: &str) -> bool {
        self.is_subclass(class, ACTIONS)
    }

    /// Classes declared by modules (built-ins excluded), in declaration order.
    pub fn user_classes(&self) -> impl Iterator<Item = &ClassInfo> {
        self.classes.values().filter(|c| !c.is_builtin())
    }

    pub fn action_classes(&self) -> impl Iterator<Item = &ClassInfo> {
        self.user_classes().filter(|c| self.is_action_class(&c.name))
    }

    pub fn inertial_fluents(&self) -> impl Iterator<Item = &FunctionInfo> {
        self.functions.values().filter(|f| f.decl.is_basic_fluent())
    }

    pub fn function(&self, name: &str) -> Option<&FunctionDecl> {
        self.functions.get(name).map(|f| &f.decl)
    }

    /// Attributes visible on `class`: own and inherited, nearest declaration first.
    pub fn attributes_of(&self, class: &str) -> Vec<(&str, &AttributeDecl)> {
        let mut out: Vec<(&str, &AttributeDecl)> = Vec::new();
        let mut order: Vec<&str> = self.ancestors(class).iter().map(|c| self.class_key(c)).collect();
        // nearest first: sort by depth distance
        order.sort_by_key(|c| (std::cmp::Reverse(self.ancestors(c).len()), *c));
        for owner in order {
            for a in &self.classes[owner].attributes {
                if !out.iter().any(|(_, b)| b.name == a.name) {
                    out.push((owner, a));
                }
            }
        }
        out
    }

    fn class_key(&self, name: &str) -> &str {
        self.classes.get_key_value(name).map(|(k, _)| k.as_str()).unwrap_or("")
    }

    pub fn attribute(&self, class: &str, attr: &str) -> Option<&AttributeDecl> {
        self.attributes_of(class)
            .into_iter()
            .find(|(_, a)| a.name == attr)
            .map(|(_, a)| a)
    }

    /// Classes that declare an attribute with this name.
    pub fn attribute_owners(&self, attr: &str) -> Vec<&str> {
        self.classes
            .values()
            .filter(|c| c.attributes.iter().any(|a| a.name == attr))
            .map(|c| c.name.as_str())
            .collect()
    }

    pub fn is_attribute(&self, name: &str) -> bool {
        !self.attribute_owners(name).is_empty()
    }

    pub fn constant(&self, name: &str) -> Option<&ConstantInfo> {
        self.constants.get(name)
    }

    /// Constants whose sort is `class` or a subclass (the closed `instance` relation).
    pub fn constants_of(&self, class: &str) -> Vec<&ConstantInfo> {
        self.constants
            .values()
            .filter(|c| c.sorts.iter().any(|s| self.is_subclass(s, class)))
            .collect()
    }

    pub fn instance(&self, name: &str) -> Option<&InstanceDef> {
        self.constant(name)
            .and_then(|c| c.instance)
            .map(|i| &self.instances[i])
    }

    /// Longest chain of subclass links from `class` to the first built-in class.
    pub fn class_depth(&self, class: &str) -> usize {
        fn go(lib: &ResolvedLibrary, c: &str, memo: &mut BTreeMap<String, usize>) -> usize {
            if let Some(d) = memo.get(c) {
                return *d;
            }
            let info = &lib.classes[c];
            let d = if info.is_builtin() {
                0
            } else {
                info.parents
                    .iter()
                    .map(|p| if lib.classes[p.as_str()].is_builtin() { 1 } else { 1 + go(lib, p, memo) })
                    .max()
                    .unwrap_or(0)
            };
            memo.insert(c.to_string(), d);
            d
        }
        if !self.classes.contains_key(class) {
            return 0;
        }
        go(self, class, &mut BTreeMap::new())
    }

    pub fn depth(&self) -> usize {
        self.user_classes()
            .map(|c| self.class_depth(&c.name))
            .max()
            .unwrap_or(0)
    }

    /// Direct imports per module.
    pub fn module_graph(&self) -> BTreeMap<String, Vec<String>> {
        self.modules
            .values()
            .map(|m| {
                let mut deps = m.imports.clone();
                deps.sort();
                (m.name.clone(), deps)
            })
            .collect()
    }

    /// Modules reachable through imports, including `module` itself.
    pub fn visible_modules(&self, module: &str) -> BTreeSet<String> {
        reachable(module, |m| self.modules.get(m).map(|i| i.imports.clone()).unwrap_or_default())
    }

    /// True when some class is a subclass of every sort in `sorts`.
    pub fn has_common_lower_bound<'a>(&self, sorts: impl IntoIterator<Item = &'a str> + Clone) -> bool {
        self.classes
            .keys()
            .any(|c| sorts.clone().into_iter().all(|s| self.is_subclass(c, s)))
    }

    /// Drops sorts that are strict superclasses of another sort in the set.
    pub fn most_specific(&self, sorts: &BTreeSet<String>) -> Vec<String> {
        sorts
            .iter()
            .filter(|s| !sorts.iter().any(|t| t != *s && self.is_subclass(t, s)))
            .cloned()
            .collect()
    }

    /// Does constant `name` belong to sort `sort`? Booleans are built in.
    pub fn constant_in(&self, name: &str, sort: &str) -> bool {
        if sort == BOOLEANS {
            return name == "true" || name == "false";
        }
        self.constant(name)
            .is_some_and(|c| c.sorts.iter().any(|s| self.is_subclass(s, sort)))
    }
}

fn reachable(start: &str, next: impl Fn(&str) -> Vec<String>) -> BTreeSet<String> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![start.to_string()];
    while let Some(m) = stack.pop() {
        if seen.insert(m.clone()) {
            stack.extend(next(&m));
        }
    }
    seen
}

/// Resolve names with default file names.
pub fn resolve(ast: &SystemDescriptionAst) -> Result<ResolvedLibrary, Diagnostics> {
    resolve_named(ast, &SourceNames::default())
}

pub fn resolve_named(ast: &SystemDescriptionAst, names: &SourceNames) -> Result<ResolvedLibrary, Diagnostics> {
    let mut diags = Diagnostics::new();
    let mut lib = ResolvedLibrary {
        modules: IndexMap::new(),
        classes: IndexMap::new(),
        functions: IndexMap::new(),
        axioms: Vec::new(),
        structure: ast.structure.clone(),
        structure_file: names.structure(),
        constants: IndexMap::new(),
        instances: Vec::new(),
        ancestors: BTreeMap::new(),
    };

    // modules and imports
    for m in &ast.theory {
        let file = names.module(&m.name);
        if lib.modules.contains_key(&m.name) {
            diags.push(Diagnostic::error("DUP-MOD", &file, m.span, format!("duplicate module `{}`", m.name)));
            continue;
        }
        let mut seen = BTreeSet::new();
        for i in &m.imports {
            if !seen.insert(i) {
                diags.push(Diagnostic::error(
                    "DUP-IMPORT",
                    &file,
                    m.span,
                    format!("module `{}` imports `{}` more than once", m.name, i),
                ));
            }
        }
        lib.modules.insert(
            m.name.clone(),
            ModuleInfo {
                name: m.name.clone(),
                file,
                imports: m.imports.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect(),
                span: m.span,
            },
        );
    }
    for m in lib.modules.values() {
        for i in &m.imports {
            if !lib.modules.contains_key(i) {
                diags.push(Diagnostic::error(
                    "IMPORT-UNKNOWN",
                    &m.file,
                    m.span,
                    format!("module `{}` imports unknown module `{}`", m.name, i),
                ));
            }
        }
        let graph = |n: &str| lib.modules.get(n).map(|x| x.imports.clone()).unwrap_or_default();
        let via_imports: BTreeSet<String> = m.imports.iter().flat_map(|i| reachable(i, graph)).collect();
        if via_imports.contains(&m.name) {
            diags.push(Diagnostic::error(
                "IMPORT-CYCLE",
                &m.file,
                m.span,
                format!("module `{}` imports itself (directly or transitively)", m.name),
            ));
        }
    }

    // classes
    for b in BUILTIN_CLASSES {
        lib.classes.insert(
            b.to_string(),
            ClassInfo {
                name: b.to_string(),
                parents: Vec::new(),
                module: None,
                attributes: Vec::new(),
                span: Span::default(),
            },
        );
    }
    for m in &ast.theory {
        let file = names.module(&m.name);
        for c in &m.class_decls {
            if let Some(prev) = lib.classes.get(&c.name) {
                let where_ = prev.module.as_deref().map_or("built in".to_string(), |p| format!("declared in `{}`", p));
                diags.push(Diagnostic::error(
                    "DUP-CLASS",
                    &file,
                    c.span,
                    format!("class `{}` is already {}", c.name, where_),
                ));
                continue;
            }
            lib.classes.insert(
                c.name.clone(),
                ClassInfo {
                    name: c.name.clone(),
                    parents: c.parents.clone(),
                    module: Some(m.name.clone()),
                    attributes: c.attributes.clone(),
                    span: c.span,
                },
            );
        }
    }

    let visible: BTreeMap<String, BTreeSet<String>> = lib
        .modules
        .keys()
        .map(|m| (m.clone(), lib.visible_modules(m)))
        .collect();
    let class_visible = |lib: &ResolvedLibrary, module: &str, class: &str| -> Result<(), String> {
        match lib.classes.get(class) {
            None => Err(format!("unknown class `{}`", class)),
            Some(info) => match &info.module {
                Some(owner) if !visible[module].contains(owner) => Err(format!(
                    "class `{}` is declared in module `{}`, which `{}` does not import",
                    class, owner, module
                )),
                _ => Ok(()),
            },
        }
    };

    for c in lib.user_classes() {
        let module = c.module.clone().unwrap();
        let file = names.module(&module);
        for p in &c.parents {
            if let Err(msg) = class_visible(&lib, &module, p) {
                diags.push(Diagnostic::error("UNKNOWN-CLASS", &file, c.span, msg));
            }
        }
        for a in &c.attributes {
            for s in a.arg_sorts.iter().chain(std::iter::once(&a.range)) {
                if let Err(msg) = class_visible(&lib, &module, s) {
                    diags.push(Diagnostic::error(
                        "UNKNOWN-SORT",
                        &file,
                        a.span,
                        format!("attribute `{}` of `{}`: {}", a.name, c.name, msg),
                    ));
                }
            }
        }
    }
    if diags.has_errors() {
        diags.sort();
        return Err(diags);
    }

    // ancestors; cycles make the closure contain the class through a parent
    for name in lib.classes.keys() {
        let up = reachable(name, |c| lib.classes.get(c).map(|i| i.parents.clone()).unwrap_or_default());
        lib.ancestors.insert(name.clone(), up);
    }
    for c in lib.user_classes() {
        let through_parents: BTreeSet<&String> = c.parents.iter().flat_map(|p| lib.ancestors[p].iter()).collect();
        if through_parents.contains(&c.name) {
            diags.push(Diagnostic::error(
                "CLASS-CYCLE",
                &names.module(c.module.as_deref().unwrap()),
                c.span,
                format!("class `{}` is its own ancestor", c.name),
            ));
        }
    }
    if diags.has_errors() {
        diags.sort();
        return Err(diags);
    }

    // inherited attribute conflicts
    for c in lib.user_classes() {
        let mut by_name: BTreeMap<&str, Vec<(&str, &AttributeDecl)>> = BTreeMap::new();
        for anc in &lib.ancestors[&c.name] {
            for a in &lib.classes[anc.as_str()].attributes {
                by_name.entry(&a.name).or_default().push((anc, a));
            }
        }
        for (attr, decls) in by_name {
            for (i, (o1, a1)) in decls.iter().enumerate() {
                for (o2, a2) in &decls[i + 1..] {
                    let same = a1.arg_sorts == a2.arg_sorts && a1.range == a2.range;
                    if o1 != o2 && !same {
                        diags.push(Diagnostic::error(
                            "ATTR-CONFLICT",
                            &names.module(c.module.as_deref().unwrap()),
                            c.span,
                            format!(
                                "class `{}` inherits conflicting declarations of attribute `{}` from `{}` and `{}`",
                                c.name, attr, o1, o2
                            ),
                        ));
                    }
                }
            }
        }
    }

    // functions
    for m in &ast.theory {
        let file = names.module(&m.name);
        for f in &m.function_decls {
            if let Some(prev) = lib.functions.get(&f.name) {
                diags.push(Diagnostic::error(
                    "DUP-FN",
                    &file,
                    f.span,
                    format!("function `{}` is already declared in `{}`", f.name, prev.module),
                ));
                continue;
            }
            if lib.is_attribute(&f.name) {
                diags.push(Diagnostic::error(
                    "DUP-FN",
                    &file,
                    f.span,
                    format!("function `{}` has the same name as an attribute", f.name),
                ));
            }
            for s in f.arg_sorts.iter().chain(std::iter::once(&f.range)) {
                if let Err(msg) = class_visible(&lib, &m.name, s) {
                    diags.push(Diagnostic::error(
                        "UNKNOWN-SORT",
                        &file,
                        f.span,
                        format!("function `{}`: {}", f.name, msg),
                    ));
                }
            }
            lib.functions.insert(
                f.name.clone(),
                FunctionInfo {
                    decl: f.clone(),
                    module: m.name.clone(),
                },
            );
        }
    }

    // axioms
    let mut axioms = Vec::new();
    for m in &ast.theory {
        let file = names.module(&m.name);
        let vis = &visible[&m.name];
        let fn_visible = |name: &str| -> Result<(), String> {
            if let Some(f) = lib.functions.get(name) {
                return if vis.contains(&f.module) {
                    Ok(())
                } else {
                    Err(format!(
                        "function `{}` is declared in module `{}`, which `{}` does not import",
                        name, f.module, m.name
                    ))
                };
            }
            let owners = lib.attribute_owners(name);
            if owners.is_empty() {
                Err(format!("unknown function or attribute `{}`", name))
            } else if owners
                .iter()
                .any(|o| lib.classes[*o].module.as_ref().is_some_and(|om| vis.contains(om)))
            {
                Ok(())
            } else {
                Err(format!("attribute `{}` is not declared in any module `{}` imports", name, m.name))
            }
        };
        for ax in &m.axioms {
            let mut report = |code: &str, msg: String| diags.push(Diagnostic::error(code, &file, ax.span, msg));
            let check_lit = |l: &FunctionLiteral, report: &mut dyn FnMut(&str, String)| {
                if let Err(msg) = fn_visible(&l.function) {
                    report("UNKNOWN-FN", msg);
                }
            };
            match &ax.kind {
                AxiomKind::DynamicCausalLaw { head, .. } => match head {
                    CausalHead::Literal(l) => check_lit(l, &mut report),
                    CausalHead::Choice(c) => check_lit(&c.element, &mut report),
                    CausalHead::Undefine { function, .. } => {
                        if let Err(msg) = fn_visible(function) {
                            report("UNKNOWN-FN", msg);
                        }
                    }
                },
                AxiomKind::StateConstraint { head: Some(l), .. } => {
                    check_lit(l, &mut report);
                    if let Some(f) = lib.functions.get(&l.function) {
                        if f.decl.is_defined_fluent() && f.module != m.name {
                            report(
                                "DEF-FOREIGN",
                                format!(
                                    "defined fluent `{}` of module `{}` can only be defined in its own module",
                                    l.function, f.module
                                ),
                            );
                        }
                    }
                }
                AxiomKind::FunctionDefinition { head, .. } => check_lit(head, &mut report),
                _ => {}
            }
            for c in ax.all_conditions() {
                match c {
                    Condition::Function(l) => check_lit(l, &mut report),
                    Condition::Dom { function, .. } => {
                        if let Err(msg) = fn_visible(function) {
                            report("UNKNOWN-FN", msg);
                        }
                    }
                    Condition::Instance { class, .. } => {
                        if let Err(msg) = class_visible(&lib, &m.name, class) {
                            report("UNKNOWN-CLASS", msg);
                        }
                    }
                    Condition::Occurs(o) => {
                        if let Term::Ident(name) = &o.action {
                            if lib.is_class(name) {
                                if let Err(msg) = class_visible(&lib, &m.name, name) {
                                    report("UNKNOWN-CLASS", msg);
                                } else if !lib.is_action_class(name) {
                                    report("TYPE", format!("`occurs({})`: `{}` is not an action class", name, name));
                                }
                            }
                        }
                    }
                    Condition::Compare { .. } => {}
                }
            }
            axioms.push(AxiomInfo {
                axiom: ax.clone(),
                module: m.name.clone(),
                file: file.clone(),
            });
        }
    }

    lib.axioms = axioms;

    // structure constants
    if let Some(s) = &ast.structure {
        let file = names.structure();
        let mut declared: IndexMap<String, (Term, Vec<String>, Option<usize>, Span)> = IndexMap::new();
        for def in &s.instances {
            let Some(name) = def.name.constant_name() else { continue };
            if !lib.is_class(&def.class) {
                diags.push(Diagnostic::error(
                    "UNKNOWN-CLASS",
                    &file,
                    def.span,
                    format!("`{}` is declared in unknown class `{}`", def.name, def.class),
                ));
                continue;
            }
            let entry = declared
                .entry(name.clone())
                .or_insert_with(|| (def.name.clone(), Vec::new(), None, def.span));
            if lib.is_action_class(&def.class) {
                if entry.2.is_some() {
                    diags.push(Diagnostic::error(
                        "DUP-INSTANCE",
                        &file,
                        def.span,
                        format!("action instance `{}` is defined twice", def.name),
                    ));
                    continue;
                }
                entry.2 = Some(lib.instances.len());
                lib.instances.push(def.clone());
            }
            if !entry.1.contains(&def.class) {
                entry.1.push(def.class.clone());
            }
        }
        for (name, (term, mut sorts, instance, span)) in declared {
            // one hierarchy path: every pair comparable
            let on_path = sorts.iter().all(|a| {
                sorts
                    .iter()
                    .all(|b| lib.is_subclass(a, b) || lib.is_subclass(b, a))
            });
            if !on_path {
                diags.push(Diagnostic::error(
                    "CONST-SORTS",
                    &file,
                    span,
                    format!(
                        "constant `{}` is declared in sorts {} that do not lie on one hierarchy path",
                        term,
                        sorts.join(", ")
                    ),
                ));
            }
            sorts.sort_by_key(|s| std::cmp::Reverse(lib.ancestors(s).len()));
            lib.constants.insert(
                name,
                ConstantInfo {
                    term,
                    sorts,
                    instance,
                    span,
                },
            );
        }
    }

    if diags.has_errors() {
        diags.sort();
        Err(diags)
    } else {
        Ok(lib)
    }
}

#[cfg(test)]
mod tests;
