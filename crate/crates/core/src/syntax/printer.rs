use std::fmt::Write;

use super::ast::*;

const WRAP_AT: usize = 90;

/// Canonical text of a whole system description: modules in order, then the structure.
pub fn pretty_print(sd: &SystemDescriptionAst) -> String {
    let mut parts: Vec<String> = sd.theory.iter().map(print_module).collect();
    if let Some(s) = &sd.structure {
        parts.push(print_structure(s));
    }
    parts.join("\n")
}

pub fn print_module(m: &ModuleAst) -> String {
    let mut out = format!("module {}\n", m.name);
    if !m.imports.is_empty() {
        let _ = writeln!(out, "  import {}", m.imports.join(", "));
    }
    if !m.class_decls.is_empty() {
        out.push('\n');
    }
    for c in &m.class_decls {
        let _ = writeln!(out, "  {} :: {}", c.name, c.parents.join(", "));
        if !c.attributes.is_empty() {
            out.push_str("    attributes\n");
            for a in &c.attributes {
                let _ = writeln!(out, "      {} : {}", a.name, signature(&a.arg_sorts, &a.range));
            }
        }
    }

    let mut current: Option<(FunctionKind, Basicness)> = None;
    for f in &m.function_decls {
        let key = (f.kind, f.basicness);
        if current != Some(key) {
            out.push('\n');
            match key {
                (FunctionKind::Static, _) => out.push_str("  statics\n"),
                (FunctionKind::Fluent, b) => {
                    if !matches!(current, Some((FunctionKind::Fluent, _))) {
                        out.push_str("  fluents\n");
                    }
                    out.push_str(match b {
                        Basicness::Basic => "    basic\n",
                        Basicness::Defined => "    defined\n",
                    });
                }
            }
            current = Some(key);
        }
        let _ = writeln!(
            out,
            "      {}{} : {}",
            if f.total { "total " } else { "" },
            f.name,
            signature(&f.arg_sorts, &f.range)
        );
    }

    if !m.axioms.is_empty() {
        out.push_str("\n  axioms\n");
        for ax in &m.axioms {
            for line in print_axiom(ax).lines() {
                let _ = writeln!(out, "    {}", line);
            }
        }
    }
    out
}

fn signature(args: &[String], range: &str) -> String {
    if args.is_empty() {
        range.to_string()
    } else {
        format!("{} -> {}", args.join(" * "), range)
    }
}

fn args(terms: &[Term]) -> String {
    if terms.is_empty() {
        String::new()
    } else {
        let inner: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
        format!("({})", inner.join(", "))
    }
}

fn literal(l: &FunctionLiteral) -> String {
    let base = format!("{}{}", l.function, args(&l.args));
    match (l.relation, l.value.is_boolean()) {
        (Relation::Eq, Some(true)) => base,
        (Relation::Eq, Some(false)) => format!("-{}", base),
        (Relation::Eq, None) => format!("{} = {}", base, l.value),
        (Relation::Neq, _) => format!("{} != {}", base, l.value),
    }
}

fn relation(r: Relation) -> &'static str {
    match r {
        Relation::Eq => "=",
        Relation::Neq => "!=",
    }
}

pub fn print_condition(c: &Condition) -> String {
    match c {
        Condition::Function(l) => literal(l),
        Condition::Dom {
            positive,
            function,
            args: a,
        } => format!("{}dom_{}{}", if *positive { "" } else { "-" }, function, args(a)),
        Condition::Instance { object, class } => format!("instance({}, {})", object, class),
        Condition::Compare { lhs, relation: r, rhs } => format!("{} {} {}", lhs, relation(*r), rhs),
        Condition::Occurs(o) => format!("{}occurs({})", if o.positive { "" } else { "-" }, o.action),
    }
}

fn head(h: &CausalHead) -> String {
    match h {
        CausalHead::Literal(l) => literal(l),
        CausalHead::Undefine { function, args: a } => format!("-dom_{}{}", function, args(a)),
        CausalHead::Choice(c) => {
            let mut el = literal(&c.element);
            if !c.element_conditions.is_empty() {
                let conds: Vec<String> = c.element_conditions.iter().map(print_condition).collect();
                el = format!("{} : {}", el, conds.join(", "));
            }
            format!("{} {{ {} }} {}", c.lower, el, c.upper)
        }
    }
}

/// One axiom, terminated by `.`; long bodies wrap one condition per line.
pub fn print_axiom(ax: &Axiom) -> String {
    let lead = match &ax.kind {
        AxiomKind::DynamicCausalLaw { action, head: h, .. } => {
            format!("occurs({}) causes {}", action, head(h))
        }
        AxiomKind::ExecutabilityCondition { action, .. } => format!("impossible occurs({})", action),
        AxiomKind::StateConstraint { head: None, .. } => "false".to_string(),
        AxiomKind::StateConstraint { head: Some(l), .. }
        | AxiomKind::FunctionDefinition { head: l, .. } => literal(l),
    };
    let conds: Vec<String> = ax.conditions().iter().map(print_condition).collect();
    if conds.is_empty() {
        return format!("{}.", lead);
    }
    let flat = format!("{} if {}.", lead, conds.join(", "));
    if flat.len() <= WRAP_AT {
        return flat;
    }
    let mut out = format!("{}\n  if {}", lead, conds[0]);
    for c in &conds[1..] {
        let _ = write!(out, ",\n     {}", c);
    }
    out.push('.');
    out
}

pub fn print_structure(s: &StructureAst) -> String {
    let mut out = format!("structure {}\n", s.name);
    if !s.instances.is_empty() {
        out.push('\n');
    }
    for i in &s.instances {
        let _ = writeln!(out, "  {} in {}", i.name, i.class);
        for b in &i.bindings {
            let _ = writeln!(out, "    {}{} = {}", b.name, args(&b.args), b.value);
        }
    }
    for (title, defs) in [("statics", &s.statics), ("initially", &s.initially)] {
        if defs.is_empty() {
            continue;
        }
        let _ = writeln!(out, "\n  {}", title);
        for d in defs {
            let _ = writeln!(out, "    {}", literal(&d.literal));
        }
    }
    if !s.history.is_empty() {
        out.push_str("\n  history\n");
        for h in &s.history {
            let _ = writeln!(out, "    occurs({}, {})", h.action, h.step);
        }
    }
    out
}
