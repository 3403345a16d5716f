//! Lexical lookup tables: WordNet senses, VerbNet classes and PropBank
//! predicates mapped to RestKB action classes, and PropBank roles mapped to
//! attributes.
//!
//! The tables are tab-separated files under `lib/lexmap/`. Each starts with a
//! `# schema_version: N` line; further `#` lines are comments and the first
//! non-comment line is the column header.
//!
//! | file | columns |
//! |---|---|
//! | `wordnet_map.tsv` | sense, synonyms (comma-separated), gloss, class, extension |
//! | `verb_map.tsv` | verbnet (`--` for none), predicates (comma-separated), class, module, confidence, extension |
//! | `role_map.tsv` | predicate, role, description, attribute, extension |
//! | `sense_overrides.tsv` | from, to |

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sema::{Diagnostic, Diagnostics, ResolvedLibrary};
use crate::syntax::Span;

pub const SCHEMA_VERSION: u32 = 1;

pub const WORDNET_MAP: &str = include_str!("../../../lib/lexmap/wordnet_map.tsv");
pub const VERB_MAP: &str = include_str!("../../../lib/lexmap/verb_map.tsv");
pub const ROLE_MAP: &str = include_str!("../../../lib/lexmap/role_map.tsv");
pub const SENSE_OVERRIDES: &str = include_str!("../../../lib/lexmap/sense_overrides.tsv");

/// Class names printed in the tables that differ from the library's.
const CLASS_ALIASES: &[(&str, &str)] = &[("put", "put_on")];

pub fn resolve_class_alias(name: &str) -> &str {
    CLASS_ALIASES.iter().find(|(a, _)| *a == name).map_or(name, |(_, c)| c)
}

#[derive(Debug, Error)]
pub enum LexError {
    #[error("{file}: {message}")]
    Table { file: String, message: String },
    #[error("{file}: {source}")]
    Csv {
        file: String,
        #[source]
        source: csv::Error,
    },
    #[error("unknown PropBank predicate `{0}`")]
    UnknownPredicate(String),
    #[error("unknown WordNet sense `{0}`")]
    UnknownSense(String),
    #[error("no table entry matches `{0}`")]
    NotFound(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn comma_list(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(String::from).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WordNetEntry {
    pub sense: String,
    /// As printed, duplicates included.
    pub synonyms: Vec<String>,
    pub gloss: String,
    pub class: String,
    pub extension: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Confidence {
    Certain,
    Tentative,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerbMapEntry {
    pub verbnet: Option<String>,
    pub predicates: Vec<String>,
    /// Class name as written in the table; see [`VerbMapEntry::action_class`].
    pub class: String,
    pub module: String,
    pub confidence: Confidence,
    pub extension: bool,
}

impl VerbMapEntry {
    pub fn action_class(&self) -> &str {
        resolve_class_alias(&self.class)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleMapEntry {
    pub predicate: String,
    pub role: String,
    pub description: String,
    pub attribute: String,
    pub extension: bool,
}

#[derive(Deserialize)]
struct WordNetRow {
    sense: String,
    synonyms: String,
    gloss: String,
    class: String,
    extension: bool,
}

#[derive(Deserialize)]
struct VerbRow {
    verbnet: String,
    predicates: String,
    class: String,
    module: String,
    confidence: Confidence,
    extension: bool,
}

#[derive(Deserialize)]
struct OverrideRow {
    from: String,
    to: String,
}

fn read_rows<T: for<'de> Deserialize<'de>>(file: &str, text: &str) -> Result<Vec<T>, LexError> {
    let version = text
        .lines()
        .next()
        .and_then(|l| l.strip_prefix("# schema_version:"))
        .and_then(|v| v.trim().parse::<u32>().ok());
    match version {
        Some(SCHEMA_VERSION) => {}
        Some(v) => {
            return Err(LexError::Table { file: file.into(), message: format!("unsupported schema version {}", v) })
        }
        None => return Err(LexError::Table { file: file.into(), message: "missing `# schema_version:` header".into() }),
    }
    csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .comment(Some(b'#'))
        .quoting(false)
        .from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|source| LexError::Csv { file: file.into(), source })
}

/// What a free-form key resolved to.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LexHit {
    Predicate { predicate: String, entry: VerbMapEntry, roles: Vec<RoleMapEntry> },
    Sense { entry: WordNetEntry },
    VerbNet { entries: Vec<VerbMapEntry> },
    ActionClass { class: String, entries: Vec<VerbMapEntry>, senses: Vec<WordNetEntry> },
}

#[derive(Debug, Clone)]
pub struct Lexicon {
    pub wordnet: Vec<WordNetEntry>,
    pub verbs: Vec<VerbMapEntry>,
    pub roles: Vec<RoleMapEntry>,
    pub overrides: Vec<(String, String)>,
    by_sense: HashMap<String, usize>,
    by_predicate: HashMap<String, usize>,
}

impl Lexicon {
    /// The tables shipped with the library.
    pub fn builtin() -> Result<Self, LexError> {
        Self::from_tables(WORDNET_MAP, VERB_MAP, ROLE_MAP, SENSE_OVERRIDES)
    }

    /// Tables from a directory holding the four files.
    pub fn load_dir(dir: &Path) -> Result<Self, LexError> {
        let read = |f: &str| std::fs::read_to_string(dir.join(f));
        Self::from_tables(
            &read("wordnet_map.tsv")?,
            &read("verb_map.tsv")?,
            &read("role_map.tsv")?,
            &read("sense_overrides.tsv")?,
        )
    }

    pub fn from_tables(wordnet: &str, verbs: &str, roles: &str, overrides: &str) -> Result<Self, LexError> {
        let wordnet: Vec<WordNetEntry> = read_rows::<WordNetRow>("wordnet_map.tsv", wordnet)?
            .into_iter()
            .map(|r| WordNetEntry {
                sense: r.sense.trim().into(),
                synonyms: comma_list(&r.synonyms),
                gloss: r.gloss,
                class: r.class,
                extension: r.extension,
            })
            .collect();
        let verbs: Vec<VerbMapEntry> = read_rows::<VerbRow>("verb_map.tsv", verbs)?
            .into_iter()
            .map(|r| VerbMapEntry {
                verbnet: Some(r.verbnet.trim().to_string()).filter(|v| v != "--" && !v.is_empty()),
                predicates: comma_list(&r.predicates),
                class: r.class,
                module: r.module,
                confidence: r.confidence,
                extension: r.extension,
            })
            .collect();
        let roles = read_rows::<RoleMapEntry>("role_map.tsv", roles)?;
        let overrides = read_rows::<OverrideRow>("sense_overrides.tsv", overrides)?
            .into_iter()
            .map(|r| (r.from, r.to))
            .collect();

        let mut by_sense = HashMap::new();
        for (i, e) in wordnet.iter().enumerate() {
            for key in std::iter::once(&e.sense).chain(&e.synonyms) {
                if let Some(j) = by_sense.insert(key.clone(), i) {
                    if j != i && wordnet[j].class != e.class {
                        return Err(LexError::Table {
                            file: "wordnet_map.tsv".into(),
                            message: format!("sense `{}` maps to both `{}` and `{}`", key, wordnet[j].class, e.class),
                        });
                    }
                }
            }
        }
        let mut by_predicate = HashMap::new();
        for (i, e) in verbs.iter().enumerate() {
            for p in &e.predicates {
                if by_predicate.insert(p.clone(), i).is_some() {
                    return Err(LexError::Table {
                        file: "verb_map.tsv".into(),
                        message: format!("predicate `{}` appears twice", p),
                    });
                }
            }
        }
        Ok(Lexicon { wordnet, verbs, roles, overrides, by_sense, by_predicate })
    }

    /// Replaces the sense-override table.
    pub fn with_overrides(mut self, table: &str) -> Result<Self, LexError> {
        self.overrides = read_rows::<OverrideRow>("sense_overrides.tsv", table)?
            .into_iter()
            .map(|r| (r.from, r.to))
            .collect();
        Ok(self)
    }

    /// Sense to use in place of `pred`, after applying overrides.
    pub fn override_sense<'a>(&'a self, pred: &'a str) -> &'a str {
        self.overrides.iter().find(|(f, _)| f == pred).map_or(pred, |(_, t)| t)
    }

    pub fn lookup_propbank(&self, pred: &str) -> Result<&VerbMapEntry, LexError> {
        self.by_predicate
            .get(pred)
            .map(|&i| &self.verbs[i])
            .ok_or_else(|| LexError::UnknownPredicate(pred.into()))
    }

    pub fn roles_for(&self, pred: &str) -> Result<Vec<&RoleMapEntry>, LexError> {
        self.lookup_propbank(pred)?;
        Ok(self.roles.iter().filter(|r| r.predicate == pred).collect())
    }

    pub fn lookup_wordnet(&self, sense: &str) -> Result<&WordNetEntry, LexError> {
        self.by_sense
            .get(sense)
            .map(|&i| &self.wordnet[i])
            .ok_or_else(|| LexError::UnknownSense(sense.into()))
    }

    pub fn lookup_verbnet(&self, class: &str) -> Vec<&VerbMapEntry> {
        self.verbs.iter().filter(|e| e.verbnet.as_deref() == Some(class)).collect()
    }

    /// Resolve a key of any kind: predicate, sense, VerbNet class or action class.
    pub fn search(&self, key: &str) -> Result<LexHit, LexError> {
        if let Ok(entry) = self.lookup_propbank(key) {
            let roles = self.roles_for(key)?.into_iter().cloned().collect();
            return Ok(LexHit::Predicate { predicate: key.into(), entry: entry.clone(), roles });
        }
        if let Ok(entry) = self.lookup_wordnet(key) {
            return Ok(LexHit::Sense { entry: entry.clone() });
        }
        let vn = self.lookup_verbnet(key);
        if !vn.is_empty() {
            return Ok(LexHit::VerbNet { entries: vn.into_iter().cloned().collect() });
        }
        let entries: Vec<VerbMapEntry> = self.verbs.iter().filter(|e| e.action_class() == key).cloned().collect();
        let senses: Vec<WordNetEntry> = self.wordnet.iter().filter(|e| e.class == key).cloned().collect();
        if entries.is_empty() && senses.is_empty() {
            return Err(LexError::NotFound(key.into()));
        }
        Ok(LexHit::ActionClass { class: key.into(), entries, senses })
    }

    /// Every class and attribute named in the tables exists in `lib`.
    pub fn check(&self, lib: &ResolvedLibrary) -> Diagnostics {
        let mut d = Diagnostics::new();
        let is_action = |c: &str| lib.class(c).is_some() && lib.is_subclass(c, "actions");
        let mut err = |file: &str, msg: String| d.push(Diagnostic::error("LEX", file, Span::new(0, 0), msg));
        for e in &self.wordnet {
            if !is_action(&e.class) {
                err("wordnet_map.tsv", format!("`{}` maps to unknown action class `{}`", e.sense, e.class));
            }
        }
        for e in &self.verbs {
            if !is_action(e.action_class()) {
                err("verb_map.tsv", format!("{:?} map to unknown action class `{}`", e.predicates, e.class));
            }
            if !lib.modules.contains_key(&e.module) {
                err("verb_map.tsv", format!("unknown module `{}`", e.module));
            }
        }
        for r in &self.roles {
            match self.lookup_propbank(&r.predicate) {
                Err(_) => err("role_map.tsv", format!("role row for unmapped predicate `{}`", r.predicate)),
                Ok(e) => {
                    if lib.attribute(e.action_class(), &r.attribute).is_none() {
                        err(
                            "role_map.tsv",
                            format!("`{}` {} maps to `{}`, not an attribute of `{}`", r.predicate, r.role, r.attribute, e.action_class()),
                        );
                    }
                }
            }
        }
        for (from, to) in &self.overrides {
            if self.lookup_propbank(to).is_err() {
                err("sense_overrides.tsv", format!("override `{}` -> unmapped `{}`", from, to));
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::restkb;

    fn lex() -> Lexicon {
        Lexicon::builtin().unwrap()
    }

    fn roles(pred: &str) -> Vec<(String, String)> {
        lex().roles_for(pred).unwrap().into_iter().map(|r| (r.role.clone(), r.attribute.clone())).collect()
    }

    fn pairs(v: &[(&str, &str)]) -> Vec<(String, String)> {
        v.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn propbank_lookups() {
        let l = lex();
        assert_eq!(l.lookup_propbank("go.01").unwrap().action_class(), "move");
        assert_eq!(l.lookup_propbank("go.01").unwrap().module, "motion");
        let i = l.lookup_propbank("interfere.01").unwrap();
        assert_eq!(i.action_class(), "interference");
        assert_eq!(i.verbnet, None);
        assert!(matches!(l.lookup_propbank("eat.99"), Err(LexError::UnknownPredicate(_))));
        assert_eq!(l.lookup_propbank("put.01").unwrap().class, "put");
        assert_eq!(l.lookup_propbank("put.01").unwrap().action_class(), "put_on");
        assert_eq!(l.lookup_propbank("release.01").unwrap().confidence, Confidence::Tentative);
    }

    #[test]
    fn role_lookups() {
        assert_eq!(roles("go.01"), pairs(&[("A1", "actor"), ("A3", "origin"), ("A4", "dest")]));
        assert_eq!(roles("order.02"), pairs(&[("A0", "actor"), ("A1", "item"), ("A3", "recipient")]));
        assert_eq!(roles("put.01"), pairs(&[("A0", "actor"), ("A1", "object"), ("A2", "on")]));
        assert_eq!(roles("leave.01"), pairs(&[("A0", "actor"), ("A1", "origin")]));
        assert!(lex().roles_for("nope.01").is_err());
    }

    #[test]
    fn wordnet_synonyms() {
        let l = lex();
        assert_eq!(l.lookup_wordnet("travel#1").unwrap().class, "move");
        assert_eq!(l.lookup_wordnet("travel#1").unwrap(), l.lookup_wordnet("go#1").unwrap());
        assert_eq!(l.lookup_wordnet("leave#1").unwrap().class, "leave");
        assert_eq!(l.lookup_wordnet("leave#5").unwrap().class, "leave");
        assert!(l.lookup_wordnet("xyz#9").is_err());
        for e in &l.wordnet {
            for s in &e.synonyms {
                assert_eq!(l.lookup_wordnet(s).unwrap(), e);
            }
        }
    }

    #[test]
    fn tables_reference_the_library() {
        let (lib, _) = restkb::load_library();
        let d = lex().check(&lib.unwrap());
        assert!(d.is_empty(), "{}", d.render_text());
    }

    #[test]
    fn overrides_and_search() {
        let l = lex();
        assert_eq!(l.override_sense("order.01"), "order.02");
        assert_eq!(l.override_sense("go.01"), "go.01");
        assert!(matches!(l.search("go.01").unwrap(), LexHit::Predicate { .. }));
        assert!(matches!(l.search("guide#2").unwrap(), LexHit::Sense { .. }));
        assert!(matches!(l.search("escape-51.1-1").unwrap(), LexHit::VerbNet { .. }));
        assert!(matches!(l.search("put_on").unwrap(), LexHit::ActionClass { .. }));
        assert!(l.search("zzz").is_err());
    }

    #[test]
    fn schema_header_required() {
        let bad = VERB_MAP.replacen("# schema_version: 1", "# schema_version: 9", 1);
        assert!(Lexicon::from_tables(WORDNET_MAP, &bad, ROLE_MAP, SENSE_OVERRIDES).is_err());
        let bad = VERB_MAP.lines().skip(1).collect::<Vec<_>>().join("\n");
        assert!(Lexicon::from_tables(WORDNET_MAP, &bad, ROLE_MAP, SENSE_OVERRIDES).is_err());
    }

    #[test]
    fn non_extension_rows_match_printed_tables() {
        let l = lex();
        let wn: Vec<(&str, &str)> = l.wordnet.iter().filter(|e| !e.extension).map(|e| (e.sense.as_str(), e.class.as_str())).collect();
        assert_eq!(
            wn,
            vec![("go#1", "move"), ("enter#1", "enter"), ("leave#1", "leave"), ("leave#5", "leave"), ("lead#1", "lead_to")]
        );
        let printed = [
            ("escape-51.1-1", "go.01, go.02", "move"),
            ("escape-51.1-1-2", "enter.01", "enter"),
            ("escape-51.1-1-1", "leave.01, leave.04", "leave"),
            ("accompany-51.7", "lead.01", "lead_to"),
            ("assuming_position-50", "sit.01", "sit"),
            ("assuming_position-50", "stand.01", "stand_up"),
            ("hold-15.1-1", "grasp.01", "grasp"),
            ("let-64.2", "release.01", "release"),
            ("put-9.1-2", "put.01", "put"),
            ("transfer_mesg-37.1.1", "communicate.01", "communicate"),
            ("--", "interfere.01", "interference"),
            ("judgment-33.1-1", "greet.01", "greet"),
            ("beg-58.2", "request.01", "request"),
            ("eat-39.1-1", "eat.01", "eat"),
            ("preparing-26.3-1", "prepare.01", "prepare"),
            ("pay-68.1", "pay.01", "pay"),
            ("get-13.5-1", "order.02", "order"),
        ];
        let vm: Vec<(String, String, String)> = l
            .verbs
            .iter()
            .filter(|e| !e.extension)
            .map(|e| (e.verbnet.clone().unwrap_or("--".into()), e.predicates.join(", "), e.class.clone()))
            .collect();
        let expect: Vec<(String, String, String)> =
            printed.iter().map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string())).collect();
        assert_eq!(vm, expect);
        let rm: Vec<(&str, &str, &str)> = l
            .roles
            .iter()
            .filter(|r| !r.extension)
            .map(|r| (r.predicate.as_str(), r.role.as_str(), r.attribute.as_str()))
            .collect();
        assert_eq!(rm.len(), 11);
        assert!(rm.contains(&("leave.01", "A1", "origin")));
    }
}
