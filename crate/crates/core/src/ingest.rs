//! From semantic-role annotations and coreference clusters to a logic form:
//! typed constants, action instances and ordered observations.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asp::mangle;
use crate::lexmap::Lexicon;
use crate::restkb;
use crate::sema::{Diagnostic, Diagnostics, ResolvedLibrary};
use crate::syntax::{print_structure, AttributeBinding, InstanceDef, Span, StructureAst, Term};

/// Sort given to constants whose inferred sort is this class.
const AGENT_DEFAULT: (&str, &str) = ("agents", "persons");

const FUNCTION_WORDS: &[&str] = &[
    "a", "an", "the", "this", "that", "these", "those", "some", "someone", "somebody", "he", "she", "it", "they",
    "him", "her", "them", "his", "its", "their", "i", "you", "we", "me", "us", "my", "your", "our",
];

/// One story's annotations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedText {
    pub sentences: Vec<String>,
    pub predicates: Vec<PredicateAnnotation>,
    #[serde(default)]
    pub coref: Vec<Vec<Mention>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateAnnotation {
    pub sentence: usize,
    /// Sense-suffixed PropBank predicate, e.g. `go.01`.
    pub predicate: String,
    /// Role label (`A0`..`A4`) to the text it spans in the sentence.
    #[serde(default)]
    pub roles: std::collections::BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Mention {
    pub sentence: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantDecl {
    pub name: String,
    pub sort: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Binding {
    pub attribute: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionInstance {
    pub name: String,
    pub class: String,
    pub bindings: Vec<Binding>,
    /// Predicate after sense overrides.
    pub predicate: String,
    pub sentence: usize,
}

impl ActionInstance {
    pub fn binding(&self, attribute: &str) -> Option<&str> {
        self.bindings.iter().find(|b| b.attribute == attribute).map(|b| b.value.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub instance: String,
    pub truth: bool,
    pub ordinal: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogicForm {
    pub constants: Vec<ConstantDecl>,
    pub instances: Vec<ActionInstance>,
    pub observations: Vec<Observation>,
}

impl LogicForm {
    pub fn sort_of(&self, constant: &str) -> Option<&str> {
        self.constants.iter().find(|c| c.name == constant).map(|c| c.sort.as_str())
    }

    pub fn instance(&self, name: &str) -> Option<&ActionInstance> {
        self.instances.iter().find(|i| i.name == name)
    }

    pub fn to_structure(&self, name: &str) -> StructureAst {
        let mut s = StructureAst::empty(name);
        for c in &self.constants {
            s.instances.push(InstanceDef::new(Term::Quoted(c.name.clone()), c.sort.clone()));
        }
        for i in &self.instances {
            let mut def = InstanceDef::new(Term::Ident(i.name.clone()), i.class.clone());
            def.bindings = i
                .bindings
                .iter()
                .map(|b| AttributeBinding { name: b.attribute.clone(), args: vec![], value: Term::Quoted(b.value.clone()) })
                .collect();
            s.instances.push(def);
        }
        s
    }

    pub fn to_structure_text(&self, name: &str) -> String {
        print_structure(&self.to_structure(name))
    }

    /// Observation facts `st_hpd(e, true, n).`, one per line.
    pub fn to_facts(&self) -> String {
        self.observations
            .iter()
            .map(|o| format!("st_hpd({},{},{}).\n", mangle(&o.instance), o.truth, o.ordinal))
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("invalid annotation document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("predicate {index} refers to sentence {sentence}, but there are {count} sentences")]
    BadSentence { index: usize, sentence: usize, count: usize },
    #[error("predicate `{0}` lacks a sense suffix such as `.01`")]
    MissingSense(String),
    #[error("`{text}` does not occur in sentence {sentence}")]
    MentionNotFound { sentence: usize, text: String },
    #[error("constant `{constant}` fills roles of incompatible sorts {sorts:?}")]
    SortConflict { constant: String, sorts: Vec<String> },
}

pub fn parse_annotations(json: &str) -> Result<AnnotatedText, IngestError> {
    Ok(serde_json::from_str(json)?)
}

fn mention_pos(a: &AnnotatedText, m: &Mention) -> (usize, usize) {
    let s = a.sentences[m.sentence].to_lowercase();
    (m.sentence, s.find(&m.text.to_lowercase()).unwrap_or(usize::MAX))
}

const PREPOSITIONS: &[&str] = &["on", "onto", "in", "into", "at", "to", "from", "for", "with"];

/// Role spans often include the preposition: "on the table".
fn strip_preposition(text: &str) -> &str {
    match text.split_once(' ') {
        Some((p, rest)) if PREPOSITIONS.contains(&p.to_lowercase().as_str()) => rest.trim_start(),
        _ => text,
    }
}

fn first_word(text: &str) -> &str {
    text.split_whitespace().next().unwrap_or("")
}

fn is_function_word(w: &str) -> bool {
    FUNCTION_WORDS.contains(&w.to_lowercase().as_str())
}

fn is_proper(m: &Mention) -> bool {
    let w = first_word(&m.text);
    w.starts_with(|c: char| c.is_uppercase()) && !is_function_word(w)
}

/// Surface text used as the constant name: sentence-initial capitals of
/// determiners and pronouns are dropped.
fn constant_name(m: &Mention) -> String {
    let w = first_word(&m.text);
    if is_function_word(w) {
        let mut cs = m.text.chars();
        match cs.next() {
            Some(c) => c.to_lowercase().chain(cs).collect(),
            None => String::new(),
        }
    } else {
        m.text.clone()
    }
}

fn same_mention(a: &Mention, b: &Mention) -> bool {
    a.sentence == b.sentence && a.text.eq_ignore_ascii_case(&b.text)
}

/// Most general class below every sort in `ranges`.
fn meet(lib: &ResolvedLibrary, ranges: &BTreeSet<String>) -> Option<String> {
    let candidates: Vec<&str> = lib
        .user_classes()
        .map(|c| c.name.as_str())
        .filter(|c| !lib.is_subclass(c, "actions"))
        .filter(|c| ranges.iter().all(|r| lib.is_subclass(c, r)))
        .collect();
    let top: Vec<&str> = candidates
        .iter()
        .copied()
        .filter(|c| !candidates.iter().any(|d| d != c && lib.is_subclass(c, d)))
        .collect();
    match top.as_slice() {
        [one] => Some(one.to_string()),
        _ => None,
    }
}

/// Build the logic form. Unmapped predicates are skipped with a warning.
pub fn build_logic_form(
    a: &AnnotatedText,
    lex: &Lexicon,
    lib: &ResolvedLibrary,
) -> Result<(LogicForm, Diagnostics), IngestError> {
    let mut warnings = Diagnostics::new();
    for (i, p) in a.predicates.iter().enumerate() {
        if p.sentence >= a.sentences.len() {
            return Err(IngestError::BadSentence { index: i, sentence: p.sentence, count: a.sentences.len() });
        }
        let sense_ok = p.predicate.rsplit_once('.').is_some_and(|(_, s)| !s.is_empty() && s.chars().all(|c| c.is_ascii_digit()));
        if !sense_ok {
            return Err(IngestError::MissingSense(p.predicate.clone()));
        }
        for text in p.roles.values() {
            let m = Mention { sentence: p.sentence, text: text.clone() };
            if mention_pos(a, &m).1 == usize::MAX {
                return Err(IngestError::MentionNotFound { sentence: m.sentence, text: m.text });
            }
        }
    }
    for m in a.coref.iter().flatten() {
        if m.sentence >= a.sentences.len() || mention_pos(a, m).1 == usize::MAX {
            return Err(IngestError::MentionNotFound { sentence: m.sentence, text: m.text.clone() });
        }
    }

    let representative = |m: &Mention| -> String {
        let Some(cluster) = a.coref.iter().find(|c| c.iter().any(|x| same_mention(x, m))) else {
            return constant_name(m);
        };
        let mut sorted: Vec<&Mention> = cluster.iter().collect();
        sorted.sort_by_key(|x| mention_pos(a, x));
        let pick = sorted.iter().find(|x| is_proper(x)).unwrap_or(&sorted[0]);
        constant_name(pick)
    };

    let mut lf = LogicForm::default();
    let mut ranges: Vec<(String, BTreeSet<String>)> = Vec::new();
    for p in &a.predicates {
        let pred = lex.override_sense(&p.predicate);
        let Ok(entry) = lex.lookup_propbank(pred) else {
            warnings.push(Diagnostic::warning(
                "UNMAPPED",
                "<annotations>",
                Span::new(p.sentence as u32 + 1, 0),
                format!("predicate `{}` has no RestKB action class; skipped", p.predicate),
            ));
            continue;
        };
        let class = entry.action_class().to_string();
        let roles = lex.roles_for(pred).unwrap_or_default();
        let mut bindings = Vec::new();
        for (label, text) in &p.roles {
            let Some(r) = roles.iter().find(|r| &r.role == label) else { continue };
            let value = representative(&Mention { sentence: p.sentence, text: strip_preposition(text).to_string() });
            if let Some(range) = lib.attribute(&class, &r.attribute).map(|d| d.range.clone()) {
                match ranges.iter_mut().find(|(n, _)| *n == value) {
                    Some((_, set)) => {
                        set.insert(range);
                    }
                    None => ranges.push((value.clone(), BTreeSet::from([range]))),
                }
            }
            bindings.push(Binding { attribute: r.attribute.clone(), value });
        }
        let name = format!("e{}", lf.instances.len() + 1);
        lf.observations.push(Observation { instance: name.clone(), truth: true, ordinal: lf.instances.len() });
        lf.instances.push(ActionInstance { name, class, bindings, predicate: pred.to_string(), sentence: p.sentence });
    }
    for (name, set) in ranges {
        let sort = meet(lib, &set).ok_or_else(|| IngestError::SortConflict {
            constant: name.clone(),
            sorts: set.iter().cloned().collect(),
        })?;
        let sort = if sort == AGENT_DEFAULT.0 { AGENT_DEFAULT.1.to_string() } else { sort };
        lf.constants.push(ConstantDecl { name, sort });
    }
    Ok((lf, warnings))
}

/// Sort and attribute checks of `lf` against RestKB.
pub fn validate_logic_form(lf: &LogicForm) -> Diagnostics {
    let (_, d) = restkb::load_with_structure(lf.to_structure("story"), "story");
    d
}

#[cfg(test)]
mod tests;
