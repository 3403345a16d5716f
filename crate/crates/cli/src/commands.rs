use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use almkit_core::asp::{emit_text, parse_program, render_aspf, translate_with, InitialState, Occurrences, TranslateOptions};
use almkit_core::ingest::{build_logic_form, parse_annotations, LogicForm};
use almkit_core::lexmap::{LexHit, Lexicon};
use almkit_core::reason::{
    answer, diagnose, run_corpus, solve_interfered, ActivityScript, Mode, Query, QueryAnswer, ReasonConfig,
    Scenario,
};
use almkit_core::restkb::{describe, Theory};
use almkit_core::sema::{Diagnostics, ResolvedLibrary};
use almkit_core::solve::{expand_choices, ground, is_stable, solve_external_text, solve_reference, AnswerSet};
use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use serde::Serialize;
use serde_json::json;

use crate::config::Settings;
use crate::{Exit, Output};

/// Cap on reference-solver models when no model cap is configured.
const REFERENCE_CAP: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Program text accepted by clingo.
    Text,
    /// One ground fact per line in the ASPF exchange layout.
    Aspf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Initial {
    Closed,
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Occurs {
    Free,
    External,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Files as given, with directories replaced by the `.alm` files they hold.
fn expand_files(files: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for f in files {
        if f.is_dir() {
            let mut inner: Vec<PathBuf> = std::fs::read_dir(f)
                .with_context(|| format!("reading {}", f.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "alm"))
                .collect();
            inner.sort();
            out.extend(inner);
        } else {
            out.push(f.clone());
        }
    }
    Ok(out)
}

fn sources(files: &[PathBuf]) -> Result<Vec<(String, String)>> {
    expand_files(files)?.iter().map(|p| Ok((p.display().to_string(), read(p)?))).collect()
}

/// The theory in `files`, or the configured library when none are given.
/// Syntax errors are reported as diagnostics.
fn theory(settings: &Settings, files: &[PathBuf]) -> Result<std::result::Result<Theory, Diagnostics>> {
    if files.is_empty() {
        return Ok(Ok(settings.theory()?));
    }
    match Theory::from_sources(&sources(files)?) {
        Ok(t) => Ok(Ok(t.with_lints(settings.lint))),
        Err(e) => Ok(Err(Diagnostics::from(&e))),
    }
}

/// Resolved library or exit 2 with its diagnostics.
fn library(t: &Theory, out: &Output) -> Result<ResolvedLibrary> {
    let (lib, d) = t.load();
    match lib {
        Some(lib) if !d.has_errors() => {
            if !d.is_empty() {
                out.warn(&d);
            }
            Ok(lib)
        }
        _ => {
            out.diagnostics(&d);
            Err(Exit::Diagnostics.into())
        }
    }
}

pub fn check(settings: &Settings, files: &[PathBuf], out: &Output) -> Result<()> {
    let (lib, d) = match theory(settings, files)? {
        Ok(t) => t.load(),
        Err(d) => (None, d),
    };
    let errors = d.errors().count();
    let warnings = d.warnings().count();
    if out.json {
        out.print_json(&json!({
            "ok": errors == 0,
            "errors": errors,
            "warnings": warnings,
            "diagnostics": d.0,
            "manifest": lib.as_ref().map(describe),
        }));
    } else {
        print!("{}", d.render_text());
        if let Some(lib) = &lib {
            let m = describe(lib);
            println!(
                "{} modules, {} classes, {} action classes, {} inertial fluents, {} axioms, depth {}",
                m.modules.len(),
                m.classes,
                m.action_classes,
                m.inertial_fluents,
                m.axioms,
                m.depth
            );
        }
        println!("{} errors, {} warnings", errors, warnings);
    }
    if errors > 0 {
        return Err(Exit::Diagnostics.into());
    }
    Ok(())
}

pub struct TranslateArgs {
    pub horizon: u32,
    pub initial: Initial,
    pub occurrences: Occurs,
}

impl TranslateArgs {
    fn options(&self) -> TranslateOptions {
        TranslateOptions {
            horizon: self.horizon,
            initial: match self.initial {
                Initial::Closed => InitialState::Closed,
                Initial::Open => InitialState::Open,
            },
            occurrences: match self.occurrences {
                Occurs::Free => Occurrences::Free,
                Occurs::External => Occurrences::External,
            },
        }
    }
}

fn translated(settings: &Settings, files: &[PathBuf], args: &TranslateArgs, out: &Output) -> Result<almkit_core::asp::AspProgram> {
    let t = match theory(settings, files)? {
        Ok(t) => t,
        Err(d) => {
            out.diagnostics(&d);
            return Err(Exit::Diagnostics.into());
        }
    };
    let lib = library(&t, out)?;
    Ok(translate_with(&lib, &args.options())?)
}

pub fn translate(settings: &Settings, files: &[PathBuf], args: &TranslateArgs, format: Format, out: &Output) -> Result<()> {
    let p = translated(settings, files, args, out)?;
    let text = match format {
        Format::Text => emit_text(&p),
        Format::Aspf => render_aspf(&p),
    };
    if out.json {
        out.print_json(&json!({ "horizon": args.horizon, "rules": p.rules.len(), "program": text }));
    } else {
        print!("{}", text);
    }
    Ok(())
}

fn is_asp(p: &Path) -> bool {
    p.extension().is_some_and(|x| x == "lp")
}

#[derive(Serialize)]
struct SolveReport {
    solver: &'static str,
    models: Vec<BTreeSet<String>>,
    complete: bool,
    /// Reference models confirmed stable by the independent checker.
    checked: Option<bool>,
}

pub fn solve(settings: &Settings, files: &[PathBuf], args: &TranslateArgs, reference: bool, out: &Output) -> Result<()> {
    let asp_input = !files.is_empty() && files.iter().all(|p| is_asp(p));
    let (text, program) = if asp_input {
        let text: String = files.iter().map(|p| read(p)).collect::<Result<Vec<_>>>()?.join("\n");
        let program = if reference { Some(parse_program(&text)?) } else { None };
        (text, program)
    } else {
        let p = translated(settings, files, args, out)?;
        (emit_text(&p), Some(p))
    };
    let report = match (reference, program) {
        (true, Some(p)) => {
            let g = ground(&p)?.simplified();
            let cap = if settings.model_cap == 0 { REFERENCE_CAP } else { settings.model_cap };
            let models: Vec<AnswerSet> =
                solve_reference(&expand_choices(&g), cap)?.iter().map(AnswerSet::without_auxiliary).collect();
            let checked = models.iter().all(|m| is_stable(&g, m));
            let mut models: Vec<BTreeSet<String>> = models.iter().map(AnswerSet::to_strings).collect();
            models.sort();
            SolveReport {
                solver: "reference",
                models,
                complete: true,
                checked: Some(checked),
            }
        }
        _ => {
            let o = solve_external_text(&text, &settings.solver())?;
            let mut models: Vec<BTreeSet<String>> = o.models.iter().map(AnswerSet::to_strings).collect();
            models.sort();
            SolveReport { solver: "external", models, complete: o.complete, checked: None }
        }
    };
    if out.json {
        out.print_json(&report);
    } else {
        for (i, m) in report.models.iter().enumerate() {
            println!("Answer: {}", i + 1);
            println!("{}", m.iter().cloned().collect::<Vec<_>>().join(" "));
        }
        match (report.models.is_empty(), report.complete) {
            (true, _) => println!("UNSATISFIABLE"),
            (false, true) => println!("SATISFIABLE ({} models)", report.models.len()),
            (false, false) => println!("SATISFIABLE ({}+ models, stopped at the model cap)", report.models.len()),
        }
        if report.checked == Some(false) {
            eprintln!("warning: a reference model failed the stability check");
        }
    }
    Ok(())
}

/// Everything needed to reason about one story.
struct Kit {
    lex: Lexicon,
    lib: ResolvedLibrary,
    script: ActivityScript,
    cfg: ReasonConfig,
}

impl Kit {
    fn new(settings: &Settings, out: &Output) -> Result<Kit> {
        let cfg = settings.reason()?;
        let lib = library(&cfg.theory, out)?;
        Ok(Kit { lex: settings.lexicon()?, lib, script: settings.script()?, cfg })
    }

    fn logic_form(&self, story: &Path, out: &Output) -> Result<LogicForm> {
        let (lf, warnings) = build_logic_form(&parse_annotations(&read(&story_file(story))?)?, &self.lex, &self.lib)?;
        if !warnings.is_empty() {
            out.warn(&warnings);
        }
        Ok(lf)
    }
}

/// `story.json` itself, or the one inside a story directory.
fn story_file(p: &Path) -> PathBuf {
    if p.is_dir() {
        p.join("story.json")
    } else {
        p.to_path_buf()
    }
}

pub fn ingest(settings: &Settings, story: &Path, out: &Output) -> Result<()> {
    let kit = Kit::new(settings, out)?;
    let lf = kit.logic_form(story, out)?;
    let (_, d) = kit.cfg.theory.load_with_structure(lf.to_structure("story"), "story");
    let errors: Diagnostics = d.errors().cloned().collect();
    if out.json {
        out.print_json(&json!({ "logic_form": lf, "diagnostics": errors.0 }));
    } else {
        print!("{}", lf.to_structure_text("story"));
        print!("{}", lf.to_facts());
        if !errors.is_empty() {
            eprint!("{}", errors.render_text());
        }
    }
    if errors.has_errors() {
        return Err(Exit::Diagnostics.into());
    }
    Ok(())
}

/// A query in the word form, call form, or as a JSON object.
pub fn parse_query(s: &str) -> Result<Query> {
    if s.trim_start().starts_with('{') {
        return serde_json::from_str(s).with_context(|| format!("invalid JSON query `{}`", s));
    }
    Ok(Query::parse(s)?)
}

/// The line printed for an answer in text mode.
fn answer_text(q: &Query, a: &QueryAnswer) -> String {
    match (q, &a.answer) {
        (Query::YesNo { .. }, _) | (_, None) => a.verdict.to_string(),
        (_, Some(ans)) => {
            if a.definite {
                ans.clone()
            } else {
                format!("{} (in some readings)", ans)
            }
        }
    }
}

pub struct AskArgs {
    pub queries: Vec<String>,
    pub mode: Mode,
    pub horizon: Option<u32>,
    pub interfere: Vec<String>,
}

pub fn ask(settings: &Settings, story: &Path, args: &AskArgs, out: &Output) -> Result<()> {
    let queries = args.queries.iter().map(|q| parse_query(q)).collect::<Result<Vec<_>>>()?;
    let mut kit = Kit::new(settings, out)?;
    kit.cfg.horizon = args.horizon;
    let lf = kit.logic_form(story, out)?;
    let sc = Scenario::build(&lf, args.mode, &kit.script, &kit.lib)?;
    let mut interfered = args.interfere.clone();
    if args.mode == Mode::Diagnose && interfered.is_empty() {
        let d = diagnose(&sc, &kit.lib, &kit.cfg)?;
        if let Some(e) = d.explanations.first() {
            interfered = e.interfered.clone();
        }
    }
    for a in &interfered {
        if sc.action(a).is_none() {
            bail!(almkit_core::reason::ReasonError::UnknownAction(a.clone()));
        }
    }
    let sol = solve_interfered(&sc, &kit.cfg, &interfered)?;
    let answers = queries.iter().map(|q| answer(&sol, q, &kit.lib)).collect::<Result<Vec<_>, _>>()?;
    if out.json {
        out.print_json(&json!({
            "mode": args.mode,
            "interfered": interfered,
            "skipped": sol.skipped,
            "readings": sol.readings.len(),
            "complete": sol.complete,
            "horizon": sol.horizon,
            "answers": answers,
        }));
    } else if let ([q], [a]) = (queries.as_slice(), answers.as_slice()) {
        println!("{}", answer_text(q, a));
    } else {
        for (q, a) in queries.iter().zip(&answers) {
            println!("{}: {}", a.query, answer_text(q, a));
        }
    }
    Ok(())
}

pub fn run_diagnose(settings: &Settings, story: &Path, out: &Output) -> Result<()> {
    let kit = Kit::new(settings, out)?;
    let lf = kit.logic_form(story, out)?;
    let sc = Scenario::build(&lf, Mode::Diagnose, &kit.script, &kit.lib)?;
    let d = diagnose(&sc, &kit.lib, &kit.cfg)?;
    if out.json {
        out.print_json(&d);
        return Ok(());
    }
    if !d.needed {
        println!("consistent as told; no interference needed");
        return Ok(());
    }
    println!("{} explanation(s) of size {}", d.explanations.len(), d.size.unwrap_or(0));
    for e in &d.explanations {
        let parts: Vec<String> =
            e.interfered.iter().zip(&e.steps).map(|(a, s)| format!("{} (step {})", a, s)).collect();
        println!("interference during {}", parts.join(", "));
    }
    println!("minimal: {}", if d.minimal { "yes" } else { "no" });
    Ok(())
}

#[derive(Serialize)]
struct StoryLine {
    name: String,
    kind: String,
    passed: bool,
    checks: Vec<almkit_core::reason::CheckResult>,
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<u128>,
}

pub fn corpus(settings: &Settings, dir: &Path, timings: bool, out: &Output) -> Result<()> {
    let kit = Kit::new(settings, out)?;
    let reports = run_corpus(dir, &kit.lex, &kit.lib, &kit.script, &kit.cfg)?;
    if reports.is_empty() {
        bail!("no stories under {}", dir.display());
    }
    let lines: Vec<StoryLine> = reports
        .into_iter()
        .map(|r| StoryLine {
            passed: r.passed(),
            name: r.name,
            kind: r.kind,
            checks: r.checks,
            error: r.error,
            elapsed_ms: timings.then_some(r.elapsed_ms),
        })
        .collect();
    let passed = lines.iter().filter(|l| l.passed).count();
    if out.json {
        out.print_json(&json!({ "passed": passed, "total": lines.len(), "stories": lines }));
    } else {
        for l in &lines {
            let time = l.elapsed_ms.map(|ms| format!(" {} ms", ms)).unwrap_or_default();
            let ok = l.checks.iter().filter(|c| c.pass).count();
            println!(
                "{} {} ({}) {}/{} checks{}",
                if l.passed { "PASS" } else { "FAIL" },
                l.name,
                l.kind,
                ok,
                l.checks.len(),
                time
            );
            for c in l.checks.iter().filter(|c| !c.pass) {
                println!("  {}: expected {}, got {}", c.check, c.expected, c.actual);
            }
            if let Some(e) = &l.error {
                println!("  error: {}", e);
            }
        }
        println!("{}/{} stories passed", passed, lines.len());
    }
    if passed < lines.len() {
        return Err(Exit::Mismatch.into());
    }
    Ok(())
}

fn lex_text(hit: &LexHit) -> String {
    let mut s = String::new();
    let verb = |e: &almkit_core::lexmap::VerbMapEntry| {
        format!(
            "{} -> {} [{}] verbnet {} ({:?})\n",
            e.predicates.join(", "),
            e.action_class(),
            e.module,
            e.verbnet.as_deref().unwrap_or("-"),
            e.confidence
        )
        .to_lowercase()
    };
    let sense = |e: &almkit_core::lexmap::WordNetEntry| format!("{} -> {}: {}\n", e.sense, e.class, e.gloss);
    match hit {
        LexHit::Predicate { predicate, entry, roles } => {
            s.push_str(&format!("predicate {}\n", predicate));
            s.push_str(&verb(entry));
            for r in roles {
                s.push_str(&format!("  {} ({}) -> {}\n", r.role, r.description, r.attribute));
            }
        }
        LexHit::Sense { entry } => s.push_str(&sense(entry)),
        LexHit::VerbNet { entries } => entries.iter().for_each(|e| s.push_str(&verb(e))),
        LexHit::ActionClass { class, entries, senses } => {
            s.push_str(&format!("action class {}\n", class));
            entries.iter().for_each(|e| s.push_str(&verb(e)));
            senses.iter().for_each(|e| s.push_str(&sense(e)));
        }
    }
    s
}

pub fn lex(settings: &Settings, key: &str, out: &Output) -> Result<()> {
    let hit = settings.lexicon()?.search(key)?;
    if out.json {
        out.print_json(&hit);
    } else {
        print!("{}", lex_text(&hit));
    }
    Ok(())
}
