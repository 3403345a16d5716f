//! Concrete syntax of ALM: lexer, recursive-descent parser and canonical printer.
//!
//! One `.alm` file holds one module or one structure. [`parse_system_text`]
//! additionally accepts several units in one text, which is what
//! [`pretty_print`] produces for a whole system description.

pub mod ast;
pub mod lexer;
mod parser;
mod printer;

use std::collections::BTreeSet;

use thiserror::Error;

pub use ast::*;
pub use printer::{pretty_print, print_axiom, print_condition, print_module, print_structure};

/// Range sort of boolean functions.
pub const BOOLEANS: &str = "booleans";

/// First syntax error in a file, with the set of tokens that would have been accepted.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{file}:{line}:{col}: syntax error: expected {}, found {found}", .expected.join(" or "))]
pub struct SyntaxError {
    pub file: String,
    pub line: u32,
    pub col: u32,
    pub expected: Vec<String>,
    pub found: String,
}

impl SyntaxError {
    pub fn new(file: &str, span: Span, expected: Vec<String>, found: &str) -> Self {
        SyntaxError {
            file: file.to_string(),
            line: span.line,
            col: span.col,
            expected,
            found: found.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("no input")]
    NoInput,
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("{file}: duplicate module `{name}`")]
    DuplicateModule { file: String, name: String },
    #[error("{file}: more than one structure in the system description")]
    DuplicateStructure { file: String },
}

/// Parse a single module from `src`.
pub fn parse_module(src: &str) -> Result<ModuleAst, SyntaxError> {
    parse_module_named("<input>", src)
}

pub fn parse_module_named(file: &str, src: &str) -> Result<ModuleAst, SyntaxError> {
    let mut p = parser::Parser::new(file, src)?;
    let m = p.module()?;
    p.finish()?;
    Ok(m)
}

pub fn parse_structure(src: &str) -> Result<StructureAst, SyntaxError> {
    let mut p = parser::Parser::new("<input>", src)?;
    let s = p.structure()?;
    p.finish()?;
    Ok(s)
}

/// Parse one file holding exactly one module or structure.
pub fn parse_source(file: &str, src: &str) -> Result<SourceFile, SyntaxError> {
    let mut p = parser::Parser::new(file, src)?;
    let unit = p.source_file()?;
    p.finish()?;
    Ok(unit)
}

/// Parse and combine several files, each holding one module or structure.
pub fn parse_system_description<S: AsRef<str>>(
    sources: &[(S, S)],
) -> Result<SystemDescriptionAst, ParseError> {
    if sources.is_empty() {
        return Err(ParseError::NoInput);
    }
    let mut units = Vec::new();
    for (file, src) in sources {
        units.push((file.as_ref(), parse_source(file.as_ref(), src.as_ref())?));
    }
    combine(units)
}

/// Parse a text holding any number of modules followed by at most one structure.
pub fn parse_system_text(file: &str, src: &str) -> Result<SystemDescriptionAst, ParseError> {
    let mut p = parser::Parser::new(file, src)?;
    let mut units = Vec::new();
    while !p.at_eof() {
        units.push((file, p.source_file()?));
    }
    if units.is_empty() {
        return Err(ParseError::NoInput);
    }
    combine(units)
}

fn combine(units: Vec<(&str, SourceFile)>) -> Result<SystemDescriptionAst, ParseError> {
    let mut sd = SystemDescriptionAst::default();
    let mut seen = BTreeSet::new();
    for (file, unit) in units {
        match unit {
            SourceFile::Module(m) => {
                if !seen.insert(m.name.clone()) {
                    return Err(ParseError::DuplicateModule {
                        file: file.to_string(),
                        name: m.name,
                    });
                }
                sd.theory.push(m);
            }
            SourceFile::Structure(s) => {
                if sd.structure.is_some() {
                    return Err(ParseError::DuplicateStructure {
                        file: file.to_string(),
                    });
                }
                sd.structure = Some(s);
            }
        }
    }
    Ok(sd)
}
