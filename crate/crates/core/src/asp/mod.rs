//! Relational answer-set programs: the compilation target for ALM.
//!
//! Function atoms `f(x̄) = v` are lowered to `val_f(x̄, v[, step])`. Programs
//! are plain values; [`emit_text`] renders them in gringo syntax and
//! [`parse_program`] reads the same subset back.

mod parse;
mod translate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

pub use parse::{parse_atom, parse_program, AspParseError};
pub use translate::{translate, translate_with, InitialState, Occurrences, TranslateError, TranslateOptions};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum AspTerm {
    Var(String),
    Sym(String),
    Int(i64),
    /// `t + k` (or `t - k` for negative `k`).
    Add(Box<AspTerm>, i64),
    /// `a..b`, only meaningful in facts.
    Interval(i64, i64),
}

impl AspTerm {
    pub fn var(v: impl Into<String>) -> Self {
        AspTerm::Var(v.into())
    }

    pub fn sym(s: impl Into<String>) -> Self {
        AspTerm::Sym(s.into())
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            AspTerm::Var(v) => {
                out.insert(v.clone());
            }
            AspTerm::Add(t, _) => t.vars(out),
            _ => {}
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            AspTerm::Var(_) => false,
            AspTerm::Add(t, _) => t.is_ground(),
            _ => true,
        }
    }
}

impl fmt::Display for AspTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AspTerm::Var(v) | AspTerm::Sym(v) => f.write_str(v),
            AspTerm::Int(i) => write!(f, "{}", i),
            AspTerm::Add(t, k) if *k < 0 => write!(f, "{}-{}", t, -k),
            AspTerm::Add(t, k) => write!(f, "{}+{}", t, k),
            AspTerm::Interval(a, b) => write!(f, "{}..{}", a, b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<AspTerm>,
}

impl Atom {
    pub fn new(pred: impl Into<String>, args: Vec<AspTerm>) -> Self {
        Atom { pred: pred.into(), args }
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        for a in &self.args {
            a.vars(out);
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pred)?;
        if !self.args.is_empty() {
            write!(f, "({})", join(&self.args, ","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CmpOp {
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn holds<T: Ord>(self, a: &T, b: &T) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Neq => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CmpOp::Eq => "=",
            CmpOp::Neq => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        })
    }
}

/// `#count { t̄ : conds; ... } op bound`
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Aggregate {
    pub elements: Vec<AggElement>,
    pub op: CmpOp,
    pub bound: AspTerm,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AggElement {
    pub terms: Vec<AspTerm>,
    pub conditions: Vec<Literal>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Literal {
    Pos(Atom),
    Not(Atom),
    Cmp(AspTerm, CmpOp, AspTerm),
    Count(Aggregate),
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Pos(a) => write!(f, "{}", a),
            Literal::Not(a) => write!(f, "not {}", a),
            Literal::Cmp(l, op, r) => write!(f, "{}{}{}", l, op, r),
            Literal::Count(agg) => {
                let els: Vec<String> = agg
                    .elements
                    .iter()
                    .map(|e| {
                        let t = join(&e.terms, ",");
                        if e.conditions.is_empty() {
                            t
                        } else {
                            format!("{}:{}", t, join(&e.conditions, ","))
                        }
                    })
                    .collect();
                write!(f, "#count{{{}}}{}{}", els.join(";"), agg.op, agg.bound)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ChoiceElement {
    pub atom: Atom,
    pub conditions: Vec<Literal>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Head {
    /// Integrity constraint.
    None,
    Atom(Atom),
    Choice {
        lower: Option<u32>,
        upper: Option<u32>,
        elements: Vec<ChoiceElement>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Rule {
    pub head: Head,
    pub body: Vec<Literal>,
    /// Origin of the rule, emitted as a `%` comment.
    pub comment: Option<String>,
}

impl Rule {
    pub fn fact(atom: Atom) -> Self {
        Rule { head: Head::Atom(atom), body: vec![], comment: None }
    }

    pub fn new(head: Head, body: Vec<Literal>) -> Self {
        Rule { head, body, comment: None }
    }

    pub fn with_comment(mut self, c: impl Into<String>) -> Self {
        self.comment = Some(c.into());
        self
    }

    pub fn is_fact(&self) -> bool {
        matches!(self.head, Head::Atom(_)) && self.body.is_empty()
    }

    pub fn head_pred(&self) -> &str {
        match &self.head {
            Head::None => "",
            Head::Atom(a) => &a.pred,
            Head::Choice { elements, .. } => elements.first().map(|e| e.atom.pred.as_str()).unwrap_or(""),
        }
    }

    /// Variables occurring in positive body atoms (the ones that bind).
    pub fn bound_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for l in &self.body {
            if let Literal::Pos(a) = l {
                a.vars(&mut out);
            }
        }
        // `V = t` with t ground under the others also binds, as in gringo
        loop {
            let before = out.len();
            for l in &self.body {
                if let Literal::Cmp(AspTerm::Var(v), CmpOp::Eq, t) | Literal::Cmp(t, CmpOp::Eq, AspTerm::Var(v)) = l {
                    let mut tv = BTreeSet::new();
                    t.vars(&mut tv);
                    if tv.is_subset(&out) {
                        out.insert(v.clone());
                    }
                }
            }
            if out.len() == before {
                return out;
            }
        }
    }

    /// Global variables that are not bound by a positive body atom.
    pub fn unsafe_vars(&self) -> BTreeSet<String> {
        let bound = self.bound_vars();
        let mut used = BTreeSet::new();
        match &self.head {
            Head::Atom(a) => a.vars(&mut used),
            Head::Choice { elements, .. } => {
                for e in elements {
                    let mut local_bound = bound.clone();
                    for c in &e.conditions {
                        if let Literal::Pos(a) = c {
                            a.vars(&mut local_bound);
                        }
                    }
                    let mut ev = BTreeSet::new();
                    e.atom.vars(&mut ev);
                    used.extend(ev.difference(&local_bound).cloned());
                }
            }
            Head::None => {}
        }
        for l in &self.body {
            match l {
                Literal::Not(a) => a.vars(&mut used),
                Literal::Cmp(x, _, y) => {
                    x.vars(&mut used);
                    y.vars(&mut used);
                }
                Literal::Count(agg) => agg.bound.vars(&mut used),
                Literal::Pos(_) => {}
            }
        }
        used.difference(&bound).cloned().collect()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.head {
            Head::None => {}
            Head::Atom(a) => write!(f, "{}", a)?,
            Head::Choice { lower, upper, elements } => {
                if let Some(l) = lower {
                    write!(f, "{} ", l)?;
                }
                let els: Vec<String> = elements
                    .iter()
                    .map(|e| {
                        if e.conditions.is_empty() {
                            e.atom.to_string()
                        } else {
                            format!("{} : {}", e.atom, join(&e.conditions, ", "))
                        }
                    })
                    .collect();
                write!(f, "{{ {} }}", els.join("; "))?;
                if let Some(u) = upper {
                    write!(f, " {}", u)?;
                }
            }
        }
        if !self.body.is_empty() {
            if !matches!(self.head, Head::None) {
                f.write_str(" ")?;
            }
            write!(f, ":- {}", join(&self.body, ", "))?;
        }
        f.write_str(".")
    }
}

fn join<T: fmt::Display>(items: &[T], sep: &str) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

/// Reversible map from program constants to the ALM names they stand for.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SymbolTable {
    to_alm: BTreeMap<String, String>,
    #[serde(skip)]
    to_asp: BTreeMap<String, String>,
}

const ASP_RESERVED: [&str; 3] = ["not", "inf", "sup"];

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Mangled name for `name`, allocating one on first use.
    pub fn intern(&mut self, name: &str) -> String {
        if let Some(m) = self.to_asp.get(name) {
            return m.clone();
        }
        let base = mangle(name);
        let mut candidate = base.clone();
        let mut n = 2;
        while self.to_alm.contains_key(&candidate) {
            candidate = format!("{}_{}", base, n);
            n += 1;
        }
        self.to_alm.insert(candidate.clone(), name.to_string());
        self.to_asp.insert(name.to_string(), candidate.clone());
        candidate
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.to_asp.get(name).map(String::as_str)
    }

    pub fn alm_name(&self, mangled: &str) -> Option<&str> {
        self.to_alm.get(mangled).map(String::as_str)
    }

    /// ALM name when known, the mangled name otherwise.
    pub fn display(&self, mangled: &str) -> String {
        self.alm_name(mangled).unwrap_or(mangled).to_string()
    }

    pub fn len(&self) -> usize {
        self.to_alm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to_alm.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.to_alm.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }
}

fn is_plain_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_lowercase())
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !ASP_RESERVED.contains(&s)
}

/// Lower-case snake-case identifier for an arbitrary entity name.
pub fn mangle(name: &str) -> String {
    if is_plain_ident(name) {
        return name.to_string();
    }
    let mut out = String::new();
    for c in name.chars().flat_map(char::to_lowercase) {
        if c.is_ascii_alphanumeric() {
            out.push(c);
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    let out = out.trim_matches('_').to_string();
    if out.is_empty() || !out.starts_with(|c: char| c.is_ascii_lowercase()) || ASP_RESERVED.contains(&out.as_str()) {
        format!("c_{}", out)
    } else {
        out
    }
}

/// How a function is encoded, for rendering and model decoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FunctionShape {
    pub arity: usize,
    pub fluent: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AspProgram {
    pub rules: Vec<Rule>,
    pub horizon: u32,
    pub symbols: SymbolTable,
    /// `val_` encodings, keyed by ALM function or attribute name.
    pub functions: BTreeMap<String, FunctionShape>,
}

impl AspProgram {
    pub fn new(rules: Vec<Rule>) -> Self {
        AspProgram { rules, ..Default::default() }
    }

    pub fn push(&mut self, r: Rule) {
        self.rules.push(r);
    }

    pub fn extend(&mut self, rules: impl IntoIterator<Item = Rule>) {
        self.rules.extend(rules);
    }

    pub fn facts(&self) -> impl Iterator<Item = &Rule> {
        self.rules.iter().filter(|r| r.is_fact())
    }
}

/// Gringo text: facts first, then rules ordered by head predicate and text.
pub fn emit_text(p: &AspProgram) -> String {
    let mut facts: Vec<&Atom> = p
        .rules
        .iter()
        .filter_map(|r| match (&r.head, r.body.is_empty()) {
            (Head::Atom(a), true) => Some(a),
            _ => None,
        })
        .collect();
    facts.sort();
    facts.dedup();
    let mut rules: Vec<(String, String, &Rule)> = p
        .rules
        .iter()
        .filter(|r| !r.is_fact())
        .map(|r| (r.head_pred().to_string(), r.to_string(), r))
        .collect();
    rules.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
    rules.dedup_by(|a, b| a.1 == b.1);

    let mut out = String::new();
    if !facts.is_empty() {
        out.push_str("% facts\n");
        for a in facts {
            out.push_str(&format!("{}.\n", a));
        }
    }
    if !rules.is_empty() {
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str("% rules\n");
        for (_, text, r) in rules {
            if let Some(c) = &r.comment {
                out.push_str(&format!("% {}\n", c));
            }
            out.push_str(&text);
            out.push('\n');
        }
    }
    out
}

/// Documentation rendering in the functional notation: `val_f(x̄, v, I)` is
/// shown as `f(x̄, I) = v`, `neg_occurs` as `¬occurs`, `:-` as `←`.
pub fn render_aspf(p: &AspProgram) -> String {
    let mut out = String::new();
    for r in p.rules.iter().filter(|r| !r.is_fact()) {
        if let Some(c) = &r.comment {
            out.push_str(&format!("% {}\n", c));
        }
        out.push_str(&aspf_rule(p, r));
        out.push('\n');
    }
    out
}

fn aspf_rule(p: &AspProgram, r: &Rule) -> String {
    let head = match &r.head {
        Head::None => String::new(),
        Head::Atom(a) => aspf_atom(p, a),
        Head::Choice { lower, upper, elements } => {
            let els: Vec<String> = elements
                .iter()
                .map(|e| {
                    let conds: Vec<String> = e.conditions.iter().map(|c| aspf_lit(p, c)).collect();
                    if conds.is_empty() {
                        aspf_atom(p, &e.atom)
                    } else {
                        format!("{} : {}", aspf_atom(p, &e.atom), conds.join(", "))
                    }
                })
                .collect();
            format!(
                "{}{{{}}}{}",
                lower.map(|l| l.to_string()).unwrap_or_default(),
                els.join("; "),
                upper.map(|u| u.to_string()).unwrap_or_default()
            )
        }
    };
    let body: Vec<String> = r.body.iter().map(|l| aspf_lit(p, l)).collect();
    match (head.is_empty(), body.is_empty()) {
        (_, true) => format!("{}.", head),
        (true, false) => format!("← {}.", body.join(", ")),
        (false, false) => format!("{} ← {}.", head, body.join(", ")),
    }
}

fn aspf_lit(p: &AspProgram, l: &Literal) -> String {
    match l {
        Literal::Pos(a) => aspf_atom(p, a),
        Literal::Not(a) => format!("not {}", aspf_atom(p, a)),
        Literal::Cmp(a, CmpOp::Neq, b) => format!("{} ≠ {}", a, b),
        Literal::Cmp(a, op, b) => format!("{} {} {}", a, op, b),
        Literal::Count(_) => l.to_string(),
    }
}

fn aspf_atom(p: &AspProgram, a: &Atom) -> String {
    let args = |xs: &[AspTerm]| xs.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ");
    if a.pred == "neg_occurs" {
        return format!("¬occurs({})", args(&a.args));
    }
    for prefix in ["val_", "chosen_"] {
        if let Some(f) = a.pred.strip_prefix(prefix) {
            if let Some(shape) = p.functions.get(f) {
                let vpos = shape.arity;
                if a.args.len() == shape.arity + 1 + usize::from(shape.fluent) {
                    let mut xs: Vec<AspTerm> = a.args[..vpos].to_vec();
                    xs.extend(a.args[vpos + 1..].iter().cloned());
                    let lhs = format!("{}({})", f, args(&xs));
                    return match &a.args[vpos] {
                        AspTerm::Sym(s) if s == "true" => lhs,
                        AspTerm::Sym(s) if s == "false" => format!("¬{}", lhs),
                        v => format!("{} = {}", lhs, v),
                    };
                }
            }
        }
    }
    if a.args.is_empty() {
        a.pred.clone()
    } else {
        format!("{}({})", a.pred, args(&a.args))
    }
}
