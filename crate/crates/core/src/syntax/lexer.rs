use std::fmt;

use super::ast::Span;
use super::SyntaxError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Var(String),
    Quoted(String),
    Int(i64),
    DoubleColon,
    Colon,
    Comma,
    Dot,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Eq,
    Neq,
    Arrow,
    Star,
    Neg,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{}`", s),
            Tok::Var(s) => write!(f, "variable `{}`", s),
            Tok::Quoted(s) => write!(f, "constant \"{}\"", s),
            Tok::Int(i) => write!(f, "integer {}", i),
            Tok::DoubleColon => f.write_str("`::`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Neq => f.write_str("`!=`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Neg => f.write_str("`-`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn tokenize(file: &str, src: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let span = Span::new(line, col);
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        let simple = match c {
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '=' => Some(Tok::Eq),
            '*' | '×' => Some(Tok::Star),
            '¬' => Some(Tok::Neg),
            '≠' => Some(Tok::Neq),
            '→' => Some(Tok::Arrow),
            _ => None,
        };
        if let Some(tok) = simple {
            bump!();
            out.push(Token { tok, span });
            continue;
        }
        match c {
            ':' => {
                bump!();
                if i < chars.len() && chars[i] == ':' {
                    bump!();
                    out.push(Token { tok: Tok::DoubleColon, span });
                } else {
                    out.push(Token { tok: Tok::Colon, span });
                }
            }
            '!' => {
                bump!();
                if i < chars.len() && chars[i] == '=' {
                    bump!();
                    out.push(Token { tok: Tok::Neq, span });
                } else {
                    return Err(SyntaxError::new(file, span, vec!["`!=`".into()], "`!`"));
                }
            }
            '-' => {
                bump!();
                if i < chars.len() && chars[i] == '>' {
                    bump!();
                    out.push(Token { tok: Tok::Arrow, span });
                } else {
                    out.push(Token { tok: Tok::Neg, span });
                }
            }
            '"' => {
                bump!();
                let mut s = String::new();
                loop {
                    if i >= chars.len() || chars[i] == '\n' {
                        return Err(SyntaxError::new(
                            file,
                            span,
                            vec!["closing `\"`".into()],
                            "end of line",
                        ));
                    }
                    if chars[i] == '"' {
                        bump!();
                        break;
                    }
                    s.push(chars[i]);
                    bump!();
                }
                out.push(Token { tok: Tok::Quoted(s), span });
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    s.push(chars[i]);
                    bump!();
                }
                let n = s.parse().map_err(|_| {
                    SyntaxError::new(file, span, vec!["integer".into()], &s)
                })?;
                out.push(Token { tok: Tok::Int(n), span });
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut s = String::new();
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    s.push(chars[i]);
                    bump!();
                }
                let tok = if s.starts_with(|c: char| c.is_uppercase()) {
                    Tok::Var(s)
                } else {
                    Tok::Ident(s)
                };
                out.push(Token { tok, span });
            }
            other => {
                return Err(SyntaxError::new(
                    file,
                    span,
                    vec!["token".into()],
                    &format!("`{}`", other),
                ));
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(line, col),
    });
    Ok(out)
}
