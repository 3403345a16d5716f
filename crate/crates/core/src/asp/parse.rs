//! Reader for the gringo subset that [`super::emit_text`] produces.

use thiserror::Error;

use super::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct AspParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Var(String),
    Int(i64),
    Not,
    Count,
    Directive,
    If,
    Dot,
    DotDot,
    Comma,
    Colon,
    Semi,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Plus,
    Minus,
    Cmp(CmpOp),
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, AspParseError> {
    let mut out = Vec::new();
    let cs: Vec<char> = src.chars().collect();
    let mut i = 0;
    let mut line = 1;
    let err = |line, m: String| AspParseError { line, message: m };
    while i < cs.len() {
        let c = cs[i];
        match c {
            '\n' => {
                line += 1;
                i += 1;
            }
            c if c.is_whitespace() => i += 1,
            '%' => {
                while i < cs.len() && cs[i] != '\n' {
                    i += 1;
                }
            }
            '#' => {
                let start = i;
                i += 1;
                while i < cs.len() && cs[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let word: String = cs[start..i].iter().collect();
                if word == "#count" {
                    out.push((Tok::Count, line));
                } else {
                    // other directives (#show, #const, ...) are skipped up to their dot
                    while i < cs.len() && cs[i] != '.' {
                        if cs[i] == '\n' {
                            line += 1;
                        }
                        i += 1;
                    }
                    i += 1;
                    out.push((Tok::Directive, line));
                }
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < cs.len() && cs[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = cs[start..i].iter().collect();
                let n = s.parse().map_err(|_| err(line, format!("integer out of range: {}", s)))?;
                out.push((Tok::Int(n), line));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_' || cs[i] == '\'') {
                    i += 1;
                }
                let s: String = cs[start..i].iter().collect();
                let t = if s == "not" {
                    Tok::Not
                } else if c.is_uppercase() || c == '_' {
                    Tok::Var(s)
                } else {
                    Tok::Ident(s)
                };
                out.push((t, line));
            }
            _ => {
                let two: String = cs[i..(i + 2).min(cs.len())].iter().collect();
                let (t, n) = match two.as_str() {
                    ":-" => (Tok::If, 2),
                    ".." => (Tok::DotDot, 2),
                    "!=" => (Tok::Cmp(CmpOp::Neq), 2),
                    "<=" => (Tok::Cmp(CmpOp::Le), 2),
                    ">=" => (Tok::Cmp(CmpOp::Ge), 2),
                    _ => match c {
                        '.' => (Tok::Dot, 1),
                        ',' => (Tok::Comma, 1),
                        ':' => (Tok::Colon, 1),
                        ';' => (Tok::Semi, 1),
                        '(' => (Tok::LParen, 1),
                        ')' => (Tok::RParen, 1),
                        '{' => (Tok::LBrace, 1),
                        '}' => (Tok::RBrace, 1),
                        '+' => (Tok::Plus, 1),
                        '-' => (Tok::Minus, 1),
                        '=' => (Tok::Cmp(CmpOp::Eq), 1),
                        '<' => (Tok::Cmp(CmpOp::Lt), 1),
                        '>' => (Tok::Cmp(CmpOp::Gt), 1),
                        _ => return Err(err(line, format!("unexpected character `{}`", c))),
                    },
                };
                out.push((t, line));
                i += n;
            }
        }
    }
    Ok(out)
}

struct P {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl P {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|t| &t.0)
    }

    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|t| t.1)
            .unwrap_or(1)
    }

    fn err<T>(&self, m: impl Into<String>) -> Result<T, AspParseError> {
        Err(AspParseError { line: self.line(), message: m.into() })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), AspParseError> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.err(format!("expected {}, found {:?}", what, self.peek()))
        }
    }

    fn statement(&mut self) -> Result<Option<Rule>, AspParseError> {
        if self.eat(&Tok::Directive) {
            return Ok(None);
        }
        let head = match self.peek() {
            Some(Tok::If) => Head::None,
            Some(Tok::LBrace) => self.choice(None)?,
            Some(Tok::Int(n)) if self.peek2() == Some(&Tok::LBrace) => {
                let n = *n;
                self.pos += 1;
                self.choice(Some(n as u32))?
            }
            _ => Head::Atom(self.atom()?),
        };
        let mut body = Vec::new();
        if self.eat(&Tok::If) {
            body = self.literals(&[Tok::Dot])?;
        }
        self.expect(Tok::Dot, "`.`")?;
        Ok(Some(Rule::new(head, body)))
    }

    fn choice(&mut self, lower: Option<u32>) -> Result<Head, AspParseError> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut elements = Vec::new();
        if !self.eat(&Tok::RBrace) {
            loop {
                let atom = self.atom()?;
                let conditions = if self.eat(&Tok::Colon) {
                    self.literals(&[Tok::Semi, Tok::RBrace])?
                } else {
                    vec![]
                };
                elements.push(ChoiceElement { atom, conditions });
                if self.eat(&Tok::RBrace) {
                    break;
                }
                self.expect(Tok::Semi, "`;` or `}`")?;
            }
        }
        let upper = match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n as u32;
                self.pos += 1;
                Some(n)
            }
            _ => None,
        };
        if let (Some(l), Some(u)) = (lower, upper) {
            if l > u {
                return self.err("choice lower bound exceeds upper bound");
            }
        }
        Ok(Head::Choice { lower, upper, elements })
    }

    /// Comma-separated literals up to (not including) one of `stops`.
    fn literals(&mut self, stops: &[Tok]) -> Result<Vec<Literal>, AspParseError> {
        let mut out = Vec::new();
        loop {
            out.push(self.literal()?);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        match self.peek() {
            Some(t) if stops.contains(t) => Ok(out),
            t => self.err(format!("unexpected {:?} after literal", t)),
        }
    }

    fn literal(&mut self) -> Result<Literal, AspParseError> {
        if self.eat(&Tok::Not) {
            return Ok(Literal::Not(self.atom()?));
        }
        if self.eat(&Tok::Count) {
            return self.count();
        }
        if let (Some(Tok::Ident(_)), next) = (self.peek(), self.peek2()) {
            if !matches!(next, Some(Tok::Cmp(_)) | Some(Tok::Plus) | Some(Tok::Minus)) {
                return Ok(Literal::Pos(self.atom()?));
            }
        }
        let l = self.term()?;
        let op = match self.peek() {
            Some(Tok::Cmp(op)) => *op,
            t => return self.err(format!("expected comparison, found {:?}", t)),
        };
        self.pos += 1;
        let r = self.term()?;
        Ok(Literal::Cmp(l, op, r))
    }

    fn count(&mut self) -> Result<Literal, AspParseError> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut elements = Vec::new();
        if !self.eat(&Tok::RBrace) {
            loop {
                let mut terms = vec![self.term()?];
                while self.eat(&Tok::Comma) {
                    terms.push(self.term()?);
                }
                let conditions = if self.eat(&Tok::Colon) {
                    self.literals(&[Tok::Semi, Tok::RBrace])?
                } else {
                    vec![]
                };
                elements.push(AggElement { terms, conditions });
                if self.eat(&Tok::RBrace) {
                    break;
                }
                self.expect(Tok::Semi, "`;` or `}`")?;
            }
        }
        let op = match self.peek() {
            Some(Tok::Cmp(op)) => *op,
            t => return self.err(format!("expected comparison after #count, found {:?}", t)),
        };
        self.pos += 1;
        let bound = self.term()?;
        Ok(Literal::Count(Aggregate { elements, op, bound }))
    }

    fn atom(&mut self) -> Result<Atom, AspParseError> {
        let pred = match self.peek() {
            Some(Tok::Ident(s)) => s.clone(),
            t => return self.err(format!("expected atom, found {:?}", t)),
        };
        self.pos += 1;
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) {
            loop {
                args.push(self.term()?);
                if self.eat(&Tok::RParen) {
                    break;
                }
                self.expect(Tok::Comma, "`,` or `)`")?;
            }
        }
        Ok(Atom { pred, args })
    }

    fn term(&mut self) -> Result<AspTerm, AspParseError> {
        let mut t = match self.peek().cloned() {
            Some(Tok::Var(v)) => AspTerm::Var(v),
            Some(Tok::Ident(s)) => AspTerm::Sym(s),
            Some(Tok::Int(n)) => AspTerm::Int(n),
            Some(Tok::Minus) => {
                self.pos += 1;
                match self.peek().cloned() {
                    Some(Tok::Int(n)) => AspTerm::Int(-n),
                    t => return self.err(format!("expected integer after `-`, found {:?}", t)),
                }
            }
            t => return self.err(format!("expected term, found {:?}", t)),
        };
        self.pos += 1;
        if let AspTerm::Int(a) = t {
            if self.eat(&Tok::DotDot) {
                match self.peek().cloned() {
                    Some(Tok::Int(b)) => {
                        self.pos += 1;
                        return Ok(AspTerm::Interval(a, b));
                    }
                    t => return self.err(format!("expected interval end, found {:?}", t)),
                }
            }
        }
        loop {
            let sign = match self.peek() {
                Some(Tok::Plus) => 1,
                Some(Tok::Minus) => -1,
                _ => return Ok(t),
            };
            self.pos += 1;
            let k = match self.peek().cloned() {
                Some(Tok::Int(k)) => k,
                t => return self.err(format!("only integer offsets are supported, found {:?}", t)),
            };
            self.pos += 1;
            t = match t {
                AspTerm::Int(a) => AspTerm::Int(a + sign * k),
                AspTerm::Add(inner, j) => AspTerm::Add(inner, j + sign * k),
                other => AspTerm::Add(Box::new(other), sign * k),
            };
        }
    }
}

pub fn parse_program(src: &str) -> Result<AspProgram, AspParseError> {
    let mut p = P { toks: lex(src)?, pos: 0 };
    let mut rules = Vec::new();
    while p.peek().is_some() {
        if let Some(r) = p.statement()? {
            rules.push(r);
        }
    }
    Ok(AspProgram::new(rules))
}

/// One ground atom as printed in a solver's model line.
pub fn parse_atom(src: &str) -> Result<Atom, AspParseError> {
    let mut p = P { toks: lex(src)?, pos: 0 };
    let a = p.atom()?;
    if p.peek().is_some() {
        return p.err("trailing input after atom");
    }
    Ok(a)
}
