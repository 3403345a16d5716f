use std::fmt;

use serde::Serialize;

use crate::syntax::{ParseError, Span, SyntaxError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: String,
    pub message: String,
    pub file: String,
    pub line: u32,
    pub col: u32,
}

impl Diagnostic {
    pub fn error(code: &str, file: &str, span: Span, message: impl Into<String>) -> Self {
        Self::new(Severity::Error, code, file, span, message)
    }

    pub fn warning(code: &str, file: &str, span: Span, message: impl Into<String>) -> Self {
        Self::new(Severity::Warning, code, file, span, message)
    }

    fn new(severity: Severity, code: &str, file: &str, span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity,
            code: code.to_string(),
            message: message.into(),
            file: file.to_string(),
            line: span.line,
            col: span.col,
        }
    }

    /// `severity\tcode\tfile\tline\tcol\tmessage`
    pub fn to_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.severity,
            self.code,
            self.file,
            self.line,
            self.col,
            self.message.replace(['\t', '\n'], " ")
        )
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}: {}[{}]: {}",
            self.file, self.line, self.col, self.severity, self.code, self.message
        )
    }
}

impl From<&SyntaxError> for Diagnostic {
    fn from(e: &SyntaxError) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code: "SYN".into(),
            message: format!("expected {}, found {}", e.expected.join(" or "), e.found),
            file: e.file.clone(),
            line: e.line,
            col: e.col,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Diagnostics(pub Vec<Diagnostic>);

impl Diagnostics {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, d: Diagnostic) {
        self.0.push(d);
    }

    pub fn extend(&mut self, other: Diagnostics) {
        self.0.extend(other.0);
    }

    pub fn iter(&self) -> impl Iterator<Item = &Diagnostic> {
        self.0.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn has_errors(&self) -> bool {
        self.0.iter().any(|d| d.severity == Severity::Error)
    }

    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.0.iter().filter(|d| d.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Diagnostic> {
        self.0.iter().filter(|d| d.severity == Severity::Warning)
    }

    pub fn with_code<'a>(&'a self, code: &'a str) -> impl Iterator<Item = &'a Diagnostic> + 'a {
        self.0.iter().filter(move |d| d.code == code)
    }

    /// Stable order: file, position, code, message.
    pub fn sort(&mut self) {
        self.0.sort_by(|a, b| {
            (&a.file, a.line, a.col, &a.code, &a.message).cmp(&(&b.file, b.line, b.col, &b.code, &b.message))
        });
        self.0.dedup();
    }

    pub fn render_text(&self) -> String {
        self.0.iter().map(|d| format!("{}\n", d)).collect()
    }

    pub fn render_lines(&self) -> String {
        self.0.iter().map(|d| format!("{}\n", d.to_line())).collect()
    }
}

impl IntoIterator for Diagnostics {
    type Item = Diagnostic;
    type IntoIter = std::vec::IntoIter<Diagnostic>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl FromIterator<Diagnostic> for Diagnostics {
    fn from_iter<T: IntoIterator<Item = Diagnostic>>(iter: T) -> Self {
        Diagnostics(iter.into_iter().collect())
    }
}

impl From<&ParseError> for Diagnostics {
    fn from(e: &ParseError) -> Self {
        let d = match e {
            ParseError::Syntax(s) => Diagnostic::from(s),
            ParseError::NoInput => Diagnostic::error("NO-INPUT", "<input>", Span::new(0, 0), "no input files"),
            ParseError::DuplicateModule { file, name } => {
                Diagnostic::error("DUP-MOD", file, Span::new(0, 0), format!("duplicate module `{}`", name))
            }
            ParseError::DuplicateStructure { file } => Diagnostic::error(
                "DUP-STRUCTURE",
                file,
                Span::new(0, 0),
                "more than one structure in the system description",
            ),
        };
        Diagnostics(vec![d])
    }
}
