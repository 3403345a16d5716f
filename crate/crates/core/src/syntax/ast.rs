//! Abstract syntax for ALM theories and structures.
//!
//! Every node that diagnostics point at carries a [`Span`]. Spans compare
//! equal unconditionally, so two ASTs are structurally equal exactly when
//! they differ at most in source positions.

use std::fmt;

/// A source position (1-based line and column).
#[derive(Debug, Clone, Copy, Default, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl PartialEq for Span {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl Span {
    pub fn new(line: u32, col: u32) -> Self {
        Span { line, col }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A term appearing in an axiom, binding or value definition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// Capitalised identifier.
    Var(String),
    /// Lower-case identifier: a constant, a class name (inside `occurs`) or `true`/`false`.
    Ident(String),
    /// Double-quoted multi-word entity constant, e.g. `"a vegetarian restaurant"`.
    Quoted(String),
    Int(i64),
}

impl Term {
    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    /// Name of the constant this term denotes, if it is not a variable.
    pub fn constant_name(&self) -> Option<String> {
        match self {
            Term::Var(_) => None,
            Term::Ident(s) | Term::Quoted(s) => Some(s.clone()),
            Term::Int(i) => Some(i.to_string()),
        }
    }

    pub fn truth(value: bool) -> Term {
        Term::Ident(if value { "true" } else { "false" }.to_string())
    }

    pub fn is_boolean(&self) -> Option<bool> {
        match self {
            Term::Ident(s) if s == "true" => Some(true),
            Term::Ident(s) if s == "false" => Some(false),
            _ => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) | Term::Ident(v) => f.write_str(v),
            Term::Quoted(s) => write!(f, "\"{}\"", s),
            Term::Int(i) => write!(f, "{}", i),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Eq,
    Neq,
}

/// `f(x̄) = o` or `f(x̄) ≠ o`. Boolean sugar `f(x̄)` / `¬f(x̄)` is stored as `= true` / `= false`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FunctionLiteral {
    pub function: String,
    pub args: Vec<Term>,
    pub relation: Relation,
    pub value: Term,
}

impl FunctionLiteral {
    pub fn boolean(function: impl Into<String>, args: Vec<Term>, value: bool) -> Self {
        FunctionLiteral {
            function: function.into(),
            args,
            relation: Relation::Eq,
            value: Term::truth(value),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.args.iter().chain(std::iter::once(&self.value))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OccurrenceLiteral {
    pub positive: bool,
    /// Variable, action-instance constant, or action-class name.
    pub action: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Condition {
    Function(FunctionLiteral),
    /// `dom_f(x̄)` / `¬dom_f(x̄)`.
    Dom { positive: bool, function: String, args: Vec<Term> },
    Instance { object: Term, class: String },
    Compare { lhs: Term, relation: Relation, rhs: Term },
    Occurs(OccurrenceLiteral),
}

impl Condition {
    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Condition::Function(l) => l.terms().collect(),
            Condition::Dom { args, .. } => args.iter().collect(),
            Condition::Instance { object, .. } => vec![object],
            Condition::Compare { lhs, rhs, .. } => vec![lhs, rhs],
            Condition::Occurs(o) => vec![&o.action],
        }
    }
}

/// `L { f(x̄) = o : cond } U`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChoiceHead {
    pub lower: u32,
    pub upper: u32,
    pub element: FunctionLiteral,
    pub element_conditions: Vec<Condition>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CausalHead {
    Literal(FunctionLiteral),
    /// `¬dom_f(x̄)`: the action makes `f(x̄)` undefined.
    Undefine { function: String, args: Vec<Term> },
    Choice(ChoiceHead),
}

impl CausalHead {
    pub fn function(&self) -> &str {
        match self {
            CausalHead::Literal(l) => &l.function,
            CausalHead::Undefine { function, .. } => function,
            CausalHead::Choice(c) => &c.element.function,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AxiomKind {
    DynamicCausalLaw {
        action: Term,
        head: CausalHead,
        conditions: Vec<Condition>,
    },
    ExecutabilityCondition {
        action: Term,
        conditions: Vec<Condition>,
    },
    /// `head if cond.`; `head = None` is the falsity constraint `false if cond.`
    StateConstraint {
        head: Option<FunctionLiteral>,
        conditions: Vec<Condition>,
    },
    FunctionDefinition {
        head: FunctionLiteral,
        conditions: Vec<Condition>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Axiom {
    pub kind: AxiomKind,
    pub span: Span,
}

impl Axiom {
    pub fn conditions(&self) -> &[Condition] {
        match &self.kind {
            AxiomKind::DynamicCausalLaw { conditions, .. }
            | AxiomKind::ExecutabilityCondition { conditions, .. }
            | AxiomKind::StateConstraint { conditions, .. }
            | AxiomKind::FunctionDefinition { conditions, .. } => conditions,
        }
    }

    /// Conditions including those attached to choice elements.
    pub fn all_conditions(&self) -> Vec<&Condition> {
        let mut out: Vec<&Condition> = self.conditions().iter().collect();
        if let AxiomKind::DynamicCausalLaw {
            head: CausalHead::Choice(c),
            ..
        } = &self.kind
        {
            out.extend(c.element_conditions.iter());
        }
        out
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            AxiomKind::DynamicCausalLaw { .. } => "dynamic causal law",
            AxiomKind::ExecutabilityCondition { .. } => "executability condition",
            AxiomKind::StateConstraint { .. } => "state constraint",
            AxiomKind::FunctionDefinition { .. } => "function definition",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AttributeDecl {
    pub name: String,
    pub arg_sorts: Vec<String>,
    pub range: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassDecl {
    pub name: String,
    pub parents: Vec<String>,
    pub attributes: Vec<AttributeDecl>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FunctionKind {
    Static,
    Fluent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basicness {
    Basic,
    Defined,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FunctionDecl {
    pub name: String,
    pub kind: FunctionKind,
    pub basicness: Basicness,
    pub total: bool,
    pub arg_sorts: Vec<String>,
    pub range: String,
    pub span: Span,
}

impl FunctionDecl {
    pub fn is_basic_fluent(&self) -> bool {
        self.kind == FunctionKind::Fluent && self.basicness == Basicness::Basic
    }

    pub fn is_defined_fluent(&self) -> bool {
        self.kind == FunctionKind::Fluent && self.basicness == Basicness::Defined
    }

    pub fn is_boolean(&self) -> bool {
        self.range == crate::syntax::BOOLEANS
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModuleAst {
    pub name: String,
    pub imports: Vec<String>,
    pub class_decls: Vec<ClassDecl>,
    pub function_decls: Vec<FunctionDecl>,
    pub axioms: Vec<Axiom>,
    pub span: Span,
}

impl ModuleAst {
    pub fn empty(name: impl Into<String>) -> Self {
        ModuleAst {
            name: name.into(),
            imports: Vec::new(),
            class_decls: Vec::new(),
            function_decls: Vec::new(),
            axioms: Vec::new(),
            span: Span::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AttributeBinding {
    pub name: String,
    pub args: Vec<Term>,
    pub value: Term,
}

/// `name in class` followed by attribute bindings. For non-action classes
/// this is a constant sort declaration.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InstanceDef {
    pub name: Term,
    pub class: String,
    pub bindings: Vec<AttributeBinding>,
    pub span: Span,
}

impl InstanceDef {
    pub fn new(name: Term, class: impl Into<String>) -> Self {
        InstanceDef {
            name,
            class: class.into(),
            bindings: Vec::new(),
            span: Span::default(),
        }
    }

    pub fn bind(mut self, attribute: impl Into<String>, value: Term) -> Self {
        self.bindings.push(AttributeBinding {
            name: attribute.into(),
            args: Vec::new(),
            value,
        });
        self
    }

    pub fn binding(&self, attribute: &str) -> Option<&Term> {
        self.bindings
            .iter()
            .find(|b| b.name == attribute && b.args.is_empty())
            .map(|b| &b.value)
    }
}

/// A ground value assignment `f(c̄) = v` in a structure.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ValueDef {
    pub literal: FunctionLiteral,
    pub span: Span,
}

/// An action occurrence `occurs(e, step)` recorded in a structure's history.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HistoryEntry {
    pub action: Term,
    pub step: u32,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StructureAst {
    pub name: String,
    pub instances: Vec<InstanceDef>,
    pub statics: Vec<ValueDef>,
    pub initially: Vec<ValueDef>,
    pub history: Vec<HistoryEntry>,
    pub span: Span,
}

impl StructureAst {
    pub fn empty(name: impl Into<String>) -> Self {
        StructureAst {
            name: name.into(),
            instances: Vec::new(),
            statics: Vec::new(),
            initially: Vec::new(),
            history: Vec::new(),
            span: Span::default(),
        }
    }
}

/// A theory (modules) plus an optional structure.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SystemDescriptionAst {
    pub theory: Vec<ModuleAst>,
    pub structure: Option<StructureAst>,
}

impl SystemDescriptionAst {
    pub fn module(&self, name: &str) -> Option<&ModuleAst> {
        self.theory.iter().find(|m| m.name == name)
    }
}

/// One parsed `.alm` file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceFile {
    Module(ModuleAst),
    Structure(StructureAst),
}
