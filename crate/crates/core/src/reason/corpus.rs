use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{answer, diagnose, solve_interfered, ActivityScript, Mode, Query, ReasonConfig, ReasonError, Scenario, Verdict};
use crate::ingest::{build_logic_form, parse_annotations, AnnotatedText};
use crate::lexmap::Lexicon;
use crate::par;
use crate::sema::ResolvedLibrary;

/// A query with the verdict and/or answer a story should produce.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryCase {
    #[serde(flatten)]
    pub query: Query,
    #[serde(default)]
    pub verdict: Option<Verdict>,
    #[serde(default)]
    pub answer: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedDiagnosis {
    pub size: usize,
    /// Each explanation as the actions interfered with, in any order.
    pub explanations: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    /// `a` normal, `b` interference, `c` early exit, `d` serendipity.
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub instances: Option<usize>,
    #[serde(default)]
    pub queries: Vec<QueryCase>,
    #[serde(default)]
    pub diagnosis: Option<ExpectedDiagnosis>,
}

#[derive(Debug, Clone)]
pub struct Story {
    pub name: String,
    pub dir: PathBuf,
    pub text: AnnotatedText,
    pub expected: Expected,
}

fn read(path: &Path) -> Result<String, ReasonError> {
    std::fs::read_to_string(path)
        .map_err(|e| ReasonError::Io { path: path.display().to_string(), message: e.to_string() })
}

/// Reads `story.json` and `expected.json` from a story directory.
pub fn load_story(dir: &Path) -> Result<Story, ReasonError> {
    let text = parse_annotations(&read(&dir.join("story.json"))?)?;
    let path = dir.join("expected.json");
    let expected = serde_json::from_str(&read(&path)?)
        .map_err(|e| ReasonError::Io { path: path.display().to_string(), message: e.to_string() })?;
    let name = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(Story { name, dir: dir.to_path_buf(), text, expected })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StoryReport {
    pub name: String,
    pub kind: String,
    pub checks: Vec<CheckResult>,
    pub error: Option<String>,
    pub elapsed_ms: u128,
}

impl StoryReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.pass)
    }
}

fn check(checks: &mut Vec<CheckResult>, what: String, expected: String, actual: String) {
    let pass = expected == actual;
    checks.push(CheckResult { check: what, expected, actual, pass });
}

pub fn run_story(
    story: &Story,
    lex: &Lexicon,
    lib: &ResolvedLibrary,
    script: &ActivityScript,
    cfg: &ReasonConfig,
) -> StoryReport {
    let start = Instant::now();
    let mut checks = Vec::new();
    let error = run_checks(story, lex, lib, script, cfg, &mut checks).err().map(|e| e.to_string());
    StoryReport {
        name: story.name.clone(),
        kind: story.expected.kind.clone(),
        checks,
        error,
        elapsed_ms: start.elapsed().as_millis(),
    }
}

fn run_checks(
    story: &Story,
    lex: &Lexicon,
    lib: &ResolvedLibrary,
    script: &ActivityScript,
    cfg: &ReasonConfig,
    checks: &mut Vec<CheckResult>,
) -> Result<(), ReasonError> {
    let exp = &story.expected;
    let (lf, _) = build_logic_form(&story.text, lex, lib)?;
    if let Some(n) = exp.instances {
        check(checks, "instances".into(), n.to_string(), lf.instances.len().to_string());
    }
    let scenario = Scenario::build(&lf, exp.mode, script, lib)?;
    let mut interfered = Vec::new();
    if let Some(d) = &exp.diagnosis {
        let got = diagnose(&scenario, lib, cfg)?;
        check(checks, "diagnosis size".into(), d.size.to_string(), got.size.map_or("none".into(), |s| s.to_string()));
        let norm = |sets: Vec<Vec<String>>| {
            let mut v: Vec<String> = sets
                .into_iter()
                .map(|mut s| {
                    s.sort();
                    format!("{{{}}}", s.join(", "))
                })
                .collect();
            v.sort();
            v.join(" ")
        };
        check(
            checks,
            "explanations".into(),
            norm(d.explanations.clone()),
            norm(got.explanations.iter().map(|e| e.interfered.clone()).collect()),
        );
        check(checks, "minimal".into(), "true".into(), got.minimal.to_string());
        if let Some(e) = got.explanations.first() {
            interfered = e.interfered.clone();
        }
    }
    if exp.queries.is_empty() {
        return Ok(());
    }
    let sol = solve_interfered(&scenario, cfg, &interfered)?;
    for case in &exp.queries {
        let a = answer(&sol, &case.query, lib)?;
        if let Some(v) = case.verdict {
            check(checks, format!("{} verdict", case.query), v.to_string(), a.verdict.to_string());
        }
        if let Some(ans) = &case.answer {
            check(checks, format!("{} answer", case.query), ans.clone(), a.answer.unwrap_or_else(|| "none".into()));
        }
    }
    Ok(())
}

/// Every story directory under `root`, in name order.
pub fn story_dirs(root: &Path) -> Result<Vec<PathBuf>, ReasonError> {
    let entries = std::fs::read_dir(root)
        .map_err(|e| ReasonError::Io { path: root.display().to_string(), message: e.to_string() })?;
    let mut dirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("story.json").is_file())
        .collect();
    dirs.sort();
    Ok(dirs)
}

pub fn run_corpus(
    root: &Path,
    lex: &Lexicon,
    lib: &ResolvedLibrary,
    script: &ActivityScript,
    cfg: &ReasonConfig,
) -> Result<Vec<StoryReport>, ReasonError> {
    let stories = story_dirs(root)?.iter().map(|d| load_story(d)).collect::<Result<Vec<_>, _>>()?;
    Ok(par::map(&stories, |s| run_story(s, lex, lib, script, cfg)))
}
