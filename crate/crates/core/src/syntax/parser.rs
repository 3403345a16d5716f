use std::collections::BTreeSet;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::SyntaxError;

const MODULE_KEYWORDS: &[&str] = &[
    "import",
    "attributes",
    "statics",
    "fluents",
    "basic",
    "defined",
    "total",
    "axioms",
];

const STRUCTURE_SECTIONS: &[&str] = &["statics", "initially", "history"];

pub(crate) struct Parser<'a> {
    file: &'a str,
    toks: Vec<Token>,
    pos: usize,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Classes,
    Attributes,
    Statics,
    Basic,
    Defined,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(file: &'a str, src: &str) -> Result<Self, SyntaxError> {
        Ok(Parser {
            file,
            toks: tokenize(file, src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T, SyntaxError> {
        Err(SyntaxError::new(
            self.file,
            self.span(),
            expected.iter().map(|s| s.to_string()).collect(),
            &self.peek().to_string(),
        ))
    }

    fn expect(&mut self, tok: Tok, name: &str) -> Result<Token, SyntaxError> {
        if *self.peek() == tok {
            Ok(self.next())
        } else {
            self.error(&[name])
        }
    }

    fn is_ident(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    fn keyword(&mut self, word: &str) -> Result<Span, SyntaxError> {
        if self.is_ident(word) {
            Ok(self.next().span)
        } else {
            self.error(&[&format!("`{}`", word)])
        }
    }

    fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            _ => self.error(&["identifier"]),
        }
    }

    fn ident_list(&mut self) -> Result<Vec<String>, SyntaxError> {
        let mut out = vec![self.ident()?];
        while *self.peek() == Tok::Comma {
            self.next();
            out.push(self.ident()?);
        }
        Ok(out)
    }

    pub(crate) fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub(crate) fn finish(&self) -> Result<(), SyntaxError> {
        if self.at_eof() {
            Ok(())
        } else {
            self.error(&["end of input"])
        }
    }

    pub(crate) fn source_file(&mut self) -> Result<SourceFile, SyntaxError> {
        if self.is_ident("module") {
            self.module().map(SourceFile::Module)
        } else if self.is_ident("structure") {
            self.structure().map(SourceFile::Structure)
        } else {
            self.error(&["`module`", "`structure`"])
        }
    }

    pub(crate) fn module(&mut self) -> Result<ModuleAst, SyntaxError> {
        let span = self.keyword("module")?;
        let name = self.ident()?;
        let mut m = ModuleAst::empty(name);
        m.span = span;
        let mut section = Section::Classes;
        let mut total_next = false;
        let mut defined: BTreeSet<String> = BTreeSet::new();

        loop {
            match self.peek().clone() {
                Tok::Eof => break,
                Tok::Ident(word) if word == "module" || word == "structure" => break,
                Tok::Ident(word) if word == "import" => {
                    self.next();
                    m.imports.extend(self.ident_list()?);
                }
                Tok::Ident(word) if word == "attributes" => {
                    if !matches!(section, Section::Classes | Section::Attributes) {
                        return self.error(&["class declaration before `attributes`"]);
                    }
                    self.next();
                    section = Section::Attributes;
                }
                Tok::Ident(word) if word == "statics" => {
                    self.next();
                    section = Section::Statics;
                }
                Tok::Ident(word) if word == "fluents" => {
                    self.next();
                    section = Section::Basic;
                }
                Tok::Ident(word) if word == "basic" => {
                    self.next();
                    section = Section::Basic;
                }
                Tok::Ident(word) if word == "defined" => {
                    self.next();
                    section = Section::Defined;
                }
                Tok::Ident(word) if word == "total" => {
                    self.next();
                    total_next = true;
                }
                Tok::Ident(word) if word == "axioms" => {
                    self.next();
                    while *self.peek() != Tok::Eof
                        && !self.is_ident("module")
                        && !self.is_ident("structure")
                    {
                        let ax = self.axiom(&defined)?;
                        m.axioms.push(ax);
                    }
                    break;
                }
                Tok::Ident(_) => {
                    let span = self.span();
                    let names = self.ident_list()?;
                    match self.peek() {
                        Tok::DoubleColon => {
                            if total_next {
                                return self.error(&["function declaration after `total`"]);
                            }
                            self.next();
                            let parents = self.ident_list()?;
                            for name in names {
                                m.class_decls.push(ClassDecl {
                                    name,
                                    parents: parents.clone(),
                                    attributes: Vec::new(),
                                    span,
                                });
                            }
                            section = Section::Classes;
                        }
                        Tok::Colon => {
                            self.next();
                            let (arg_sorts, range) = self.signature()?;
                            match section {
                                Section::Classes => {
                                    return Err(SyntaxError::new(
                                        self.file,
                                        span,
                                        vec!["`::`".into(), "section keyword".into()],
                                        "`:`",
                                    ))
                                }
                                Section::Attributes => {
                                    let class = m.class_decls.last_mut().expect("checked");
                                    for name in names {
                                        class.attributes.push(AttributeDecl {
                                            name,
                                            arg_sorts: arg_sorts.clone(),
                                            range: range.clone(),
                                            span,
                                        });
                                    }
                                }
                                Section::Statics | Section::Basic | Section::Defined => {
                                    let (kind, basicness) = match section {
                                        Section::Statics => (FunctionKind::Static, Basicness::Basic),
                                        Section::Basic => (FunctionKind::Fluent, Basicness::Basic),
                                        _ => (FunctionKind::Fluent, Basicness::Defined),
                                    };
                                    for name in names {
                                        if basicness == Basicness::Defined {
                                            defined.insert(name.clone());
                                        }
                                        m.function_decls.push(FunctionDecl {
                                            name,
                                            kind,
                                            basicness,
                                            total: total_next,
                                            arg_sorts: arg_sorts.clone(),
                                            range: range.clone(),
                                            span,
                                        });
                                    }
                                    total_next = false;
                                }
                            }
                        }
                        _ => return self.error(&["`::`", "`:`", "`,`"]),
                    }
                }
                _ => return self.error(&["declaration", "section keyword"]),
            }
        }
        if total_next {
            return self.error(&["function declaration after `total`"]);
        }
        Ok(m)
    }

    /// `[s1 * s2 ->] range`
    fn signature(&mut self) -> Result<(Vec<String>, String), SyntaxError> {
        let mut sorts = vec![self.ident()?];
        while *self.peek() == Tok::Star {
            self.next();
            sorts.push(self.ident()?);
        }
        if *self.peek() == Tok::Arrow {
            self.next();
            let range = self.ident()?;
            Ok((sorts, range))
        } else if sorts.len() == 1 {
            Ok((Vec::new(), sorts.pop().unwrap()))
        } else {
            self.error(&["`->`"])
        }
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        let t = match self.peek().clone() {
            Tok::Var(v) => Term::Var(v),
            Tok::Ident(s) => Term::Ident(s),
            Tok::Quoted(s) => Term::Quoted(s),
            Tok::Int(i) => Term::Int(i),
            _ => return self.error(&["term"]),
        };
        self.next();
        Ok(t)
    }

    fn args(&mut self) -> Result<Vec<Term>, SyntaxError> {
        self.expect(Tok::LParen, "`(`")?;
        let mut out = Vec::new();
        if *self.peek() != Tok::RParen {
            out.push(self.term()?);
            while *self.peek() == Tok::Comma {
                self.next();
                out.push(self.term()?);
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(out)
    }

    fn opt_args(&mut self) -> Result<Vec<Term>, SyntaxError> {
        if *self.peek() == Tok::LParen {
            self.args()
        } else {
            Ok(Vec::new())
        }
    }

    fn axiom(&mut self, defined: &BTreeSet<String>) -> Result<Axiom, SyntaxError> {
        let span = self.span();
        let kind = if self.is_ident("occurs") {
            self.next();
            let action = self.single_arg()?;
            self.keyword("causes")?;
            let head = self.causal_head()?;
            let conditions = self.opt_conditions(true)?;
            AxiomKind::DynamicCausalLaw {
                action,
                head,
                conditions,
            }
        } else if self.is_ident("impossible") {
            self.next();
            self.keyword("occurs")?;
            let action = self.single_arg()?;
            let conditions = self.opt_conditions(true)?;
            AxiomKind::ExecutabilityCondition { action, conditions }
        } else if self.is_ident("false") {
            self.next();
            let conditions = self.opt_conditions(false)?;
            AxiomKind::StateConstraint {
                head: None,
                conditions,
            }
        } else {
            let head = self.head_literal()?;
            let conditions = self.opt_conditions(false)?;
            if defined.contains(&head.function) {
                AxiomKind::FunctionDefinition { head, conditions }
            } else {
                AxiomKind::StateConstraint {
                    head: Some(head),
                    conditions,
                }
            }
        };
        self.expect(Tok::Dot, "`.`")?;
        Ok(Axiom { kind, span })
    }

    fn single_arg(&mut self) -> Result<Term, SyntaxError> {
        self.expect(Tok::LParen, "`(`")?;
        let t = self.term()?;
        self.expect(Tok::RParen, "`)`")?;
        Ok(t)
    }

    fn opt_conditions(&mut self, allow_occurs: bool) -> Result<Vec<Condition>, SyntaxError> {
        if self.is_ident("if") {
            self.next();
            self.conditions(allow_occurs)
        } else {
            Ok(Vec::new())
        }
    }

    fn conditions(&mut self, allow_occurs: bool) -> Result<Vec<Condition>, SyntaxError> {
        let mut out = vec![self.condition(allow_occurs)?];
        while *self.peek() == Tok::Comma {
            self.next();
            out.push(self.condition(allow_occurs)?);
        }
        Ok(out)
    }

    fn head_literal(&mut self) -> Result<FunctionLiteral, SyntaxError> {
        let negated = if *self.peek() == Tok::Neg {
            self.next();
            true
        } else {
            false
        };
        let function = self.function_name()?;
        let args = self.opt_args()?;
        if negated {
            return Ok(FunctionLiteral::boolean(function, args, false));
        }
        if *self.peek() == Tok::Eq {
            self.next();
            let value = self.term()?;
            Ok(FunctionLiteral {
                function,
                args,
                relation: Relation::Eq,
                value,
            })
        } else {
            Ok(FunctionLiteral::boolean(function, args, true))
        }
    }

    fn function_name(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_reserved_function_name(&s) => {
                self.next();
                Ok(s)
            }
            _ => self.error(&["function name"]),
        }
    }

    fn causal_head(&mut self) -> Result<CausalHead, SyntaxError> {
        match self.peek().clone() {
            Tok::Int(lower) => {
                self.next();
                self.expect(Tok::LBrace, "`{`")?;
                let element = self.head_literal()?;
                let element_conditions = if *self.peek() == Tok::Colon {
                    self.next();
                    self.conditions(false)?
                } else {
                    Vec::new()
                };
                self.expect(Tok::RBrace, "`}`")?;
                let upper = match self.peek().clone() {
                    Tok::Int(u) => {
                        self.next();
                        u
                    }
                    _ => return self.error(&["upper bound"]),
                };
                if lower < 0 || upper < lower {
                    return self.error(&["bounds with 0 <= lower <= upper"]);
                }
                Ok(CausalHead::Choice(ChoiceHead {
                    lower: lower as u32,
                    upper: upper as u32,
                    element,
                    element_conditions,
                }))
            }
            Tok::Neg if matches!(self.peek_at(1), Tok::Ident(s) if s.starts_with("dom_")) => {
                self.next();
                let name = self.ident()?;
                let args = self.opt_args()?;
                Ok(CausalHead::Undefine {
                    function: name["dom_".len()..].to_string(),
                    args,
                })
            }
            _ => Ok(CausalHead::Literal(self.head_literal()?)),
        }
    }

    fn condition(&mut self, allow_occurs: bool) -> Result<Condition, SyntaxError> {
        let negated = if *self.peek() == Tok::Neg {
            self.next();
            true
        } else {
            false
        };
        match self.peek().clone() {
            Tok::Ident(s) if s == "occurs" => {
                if !allow_occurs {
                    return self.error(&["condition without `occurs` (only allowed in causal laws and executability conditions)"]);
                }
                self.next();
                let action = self.single_arg()?;
                Ok(Condition::Occurs(OccurrenceLiteral {
                    positive: !negated,
                    action,
                }))
            }
            Tok::Ident(s) if s == "instance" && !negated => {
                self.next();
                self.expect(Tok::LParen, "`(`")?;
                let object = self.term()?;
                self.expect(Tok::Comma, "`,`")?;
                let class = self.ident()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Condition::Instance { object, class })
            }
            Tok::Ident(s) if s.starts_with("dom_") => {
                self.next();
                let args = self.opt_args()?;
                Ok(Condition::Dom {
                    positive: !negated,
                    function: s["dom_".len()..].to_string(),
                    args,
                })
            }
            Tok::Ident(s) if s == "causes" || s == "if" => self.error(&["condition"]),
            Tok::Ident(_) => {
                let function = self.function_name()?;
                let args = self.opt_args()?;
                if negated {
                    return Ok(Condition::Function(FunctionLiteral::boolean(
                        function, args, false,
                    )));
                }
                let relation = match self.peek() {
                    Tok::Eq => Some(Relation::Eq),
                    Tok::Neq => Some(Relation::Neq),
                    _ => None,
                };
                match relation {
                    Some(relation) => {
                        self.next();
                        let value = self.term()?;
                        Ok(Condition::Function(FunctionLiteral {
                            function,
                            args,
                            relation,
                            value,
                        }))
                    }
                    None => Ok(Condition::Function(FunctionLiteral::boolean(
                        function, args, true,
                    ))),
                }
            }
            Tok::Var(_) | Tok::Quoted(_) | Tok::Int(_) if !negated => {
                let lhs = self.term()?;
                let relation = match self.peek() {
                    Tok::Eq => Relation::Eq,
                    Tok::Neq => Relation::Neq,
                    _ => return self.error(&["`=`", "`!=`"]),
                };
                self.next();
                let rhs = self.term()?;
                Ok(Condition::Compare { lhs, relation, rhs })
            }
            _ => self.error(&["condition"]),
        }
    }

    pub(crate) fn structure(&mut self) -> Result<StructureAst, SyntaxError> {
        let span = self.keyword("structure")?;
        let name = self.ident()?;
        let mut s = StructureAst::empty(name);
        s.span = span;
        let mut section = "instances";
        loop {
            match self.peek().clone() {
                Tok::Eof => break,
                Tok::Ident(word) if word == "module" || word == "structure" => break,
                Tok::Ident(word) if STRUCTURE_SECTIONS.contains(&word.as_str()) => {
                    self.next();
                    section = match word.as_str() {
                        "statics" => "statics",
                        "initially" => "initially",
                        _ => "history",
                    };
                }
                _ => match section {
                    "instances" => {
                        let ispan = self.span();
                        let name = match self.peek().clone() {
                            Tok::Ident(n) => Term::Ident(n),
                            Tok::Quoted(n) => Term::Quoted(n),
                            Tok::Int(n) => Term::Int(n),
                            _ => return self.error(&["constant", "section keyword"]),
                        };
                        self.next();
                        self.keyword("in")?;
                        let class = self.ident()?;
                        let mut def = InstanceDef::new(name, class);
                        def.span = ispan;
                        // bindings: `attr [(args)] = value`
                        while let Tok::Ident(attr) = self.peek().clone() {
                            if STRUCTURE_SECTIONS.contains(&attr.as_str()) {
                                break;
                            }
                            if !matches!(self.peek_at(1), Tok::Eq | Tok::LParen) {
                                break;
                            }
                            self.next();
                            let args = self.opt_args()?;
                            self.expect(Tok::Eq, "`=`")?;
                            let value = self.term()?;
                            def.bindings.push(AttributeBinding {
                                name: attr,
                                args,
                                value,
                            });
                        }
                        s.instances.push(def);
                    }
                    "history" => {
                        let hspan = self.span();
                        self.keyword("occurs")?;
                        self.expect(Tok::LParen, "`(`")?;
                        let action = self.term()?;
                        self.expect(Tok::Comma, "`,`")?;
                        let step = match self.peek().clone() {
                            Tok::Int(i) if i >= 0 => {
                                self.next();
                                i as u32
                            }
                            _ => return self.error(&["step number"]),
                        };
                        self.expect(Tok::RParen, "`)`")?;
                        s.history.push(HistoryEntry {
                            action,
                            step,
                            span: hspan,
                        });
                    }
                    sec => {
                        let vspan = self.span();
                        let literal = self.head_literal()?;
                        let def = ValueDef {
                            literal,
                            span: vspan,
                        };
                        if sec == "statics" {
                            s.statics.push(def);
                        } else {
                            s.initially.push(def);
                        }
                    }
                },
            }
        }
        Ok(s)
    }
}

fn is_reserved_function_name(s: &str) -> bool {
    MODULE_KEYWORDS.contains(&s)
        || matches!(
            s,
            "occurs"
                | "causes"
                | "if"
                | "impossible"
                | "instance"
                | "false"
                | "true"
                | "module"
                | "structure"
        )
}
