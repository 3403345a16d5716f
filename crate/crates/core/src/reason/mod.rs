//! Story reasoning: fit an ingested story to an activity script, compile the
//! result together with RestKB and answer questions over the stable models.

mod corpus;
mod diagnose;
mod query;
pub mod script;
#[cfg(test)]
mod tests;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asp::{emit_text, translate_with, AspProgram, InitialState, Occurrences, TranslateError, TranslateOptions};
use crate::ingest::{ConstantDecl, IngestError, LogicForm};
use crate::restkb::Theory;
use crate::sema::ResolvedLibrary;
use crate::solve::{solve_external_text, AnswerSet, SolveError, SolverConfig, Value};
use crate::syntax::{FunctionLiteral, InstanceDef, Relation, StructureAst, Term, ValueDef, Span};

pub use corpus::{load_story, run_corpus, run_story, story_dirs, CheckResult, Expected, ExpectedDiagnosis, QueryCase, Story, StoryReport};
pub use diagnose::{diagnose, Diagnosis, Explanation};
pub use query::{answer, Query, QueryAnswer, Verdict};
pub use script::{ActivityScript, FactTemplate, Role, ScriptStep};

#[derive(Debug, Error)]
pub enum ReasonError {
    #[error("script: {0}")]
    Script(String),
    #[error("story does not fit the library:\n{0}")]
    Invalid(String),
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("horizon {given} is too small; this story needs at least {minimum}")]
    HorizonTooSmall { given: u32, minimum: u32 },
    #[error("no reading of the story is consistent with at most {0} skipped script steps")]
    Inconsistent(usize),
    #[error("no set of at most {0} interferences explains the story")]
    NoExplanation(usize),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("{0}")]
    Query(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// `complete` fills in unmentioned script steps; `project` reasons about the
/// observed events alone; `diagnose` completes and then explains failures.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Complete,
    Project,
    Diagnose,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "complete" => Ok(Mode::Complete),
            "project" => Ok(Mode::Project),
            "diagnose" => Ok(Mode::Diagnose),
            other => Err(format!("unknown mode `{}` (expected complete, project or diagnose)", other)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReasonConfig {
    pub theory: Arc<Theory>,
    pub solver: SolverConfig,
    /// Spare steps beyond one per story action.
    pub slack: u32,
    /// Fixed horizon instead of story actions plus slack.
    pub horizon: Option<u32>,
    /// Largest explanation searched for by diagnosis.
    pub max_explanation: usize,
}

impl Default for ReasonConfig {
    fn default() -> Self {
        ReasonConfig {
            theory: Arc::new(Theory::bundled()),
            solver: SolverConfig::default(),
            slack: 4,
            horizon: None,
            max_explanation: 3,
        }
    }
}

/// A ground function value over story constants.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Fact {
    pub function: String,
    pub args: Vec<String>,
    pub value: String,
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}) = {}", self.function, self.args.join(", "), self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StoryAction {
    pub name: String,
    pub class: String,
    pub bindings: BTreeMap<String, String>,
    /// Script step this action fills, if any.
    pub slot: Option<String>,
    pub observed: bool,
}

/// A story made ready for solving: constants, actions in expected order,
/// and the initial situation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Scenario {
    pub mode: Mode,
    pub script: Option<String>,
    pub goal_owner: Option<String>,
    pub goal: Vec<Fact>,
    pub constants: Vec<ConstantDecl>,
    pub actions: Vec<StoryAction>,
    pub roles: BTreeMap<String, String>,
    pub initially: Vec<Fact>,
    pub statics: Vec<Fact>,
    /// Observed events that matched no script step.
    pub unaligned: Vec<String>,
}

impl Scenario {
    /// Observed events alone, with no script and an empty initial situation.
    pub fn project(lf: &LogicForm) -> Self {
        let actions = observed_in_order(lf)
            .into_iter()
            .map(|i| {
                let inst = &lf.instances[i];
                StoryAction {
                    name: inst.name.clone(),
                    class: inst.class.clone(),
                    bindings: inst.bindings.iter().map(|b| (b.attribute.clone(), b.value.clone())).collect(),
                    slot: None,
                    observed: true,
                }
            })
            .collect();
        Scenario {
            mode: Mode::Project,
            script: None,
            goal_owner: None,
            goal: Vec::new(),
            constants: lf.constants.clone(),
            actions,
            roles: BTreeMap::new(),
            initially: Vec::new(),
            statics: Vec::new(),
            unaligned: Vec::new(),
        }
    }

    /// Aligns observed events to script steps in story order, learning which
    /// constant plays each role, then fills the remaining steps.
    pub fn complete(lf: &LogicForm, script: &ActivityScript, lib: &ResolvedLibrary) -> Result<Self, ReasonError> {
        let mut sorts: BTreeMap<String, String> =
            lf.constants.iter().map(|c| (c.name.clone(), c.sort.clone())).collect();
        let mut learned: BTreeMap<String, String> = BTreeMap::new();
        let mut filled: Vec<Option<usize>> = vec![None; script.steps.len()];
        let mut anchored: BTreeMap<Option<usize>, Vec<usize>> = BTreeMap::new();
        let mut last: Option<usize> = None;
        let comparable = |a: &str, b: &str| lib.is_subclass(a, b) || lib.is_subclass(b, a);

        for i in observed_in_order(lf) {
            let inst = &lf.instances[i];
            let start = last.map_or(0, |l| l + 1);
            let slot = (start..script.steps.len()).find(|&j| {
                let step = &script.steps[j];
                filled[j].is_none()
                    && lib.is_subclass(&inst.class, &step.class)
                    && step.bind.iter().all(|(attr, role)| match inst.binding(attr) {
                        None => true,
                        Some(v) => match learned.get(role) {
                            Some(w) => w == v,
                            None => {
                                let role_sort = &script.role(role).expect("checked script").sort;
                                sorts.get(v).is_some_and(|s| comparable(s, role_sort))
                            }
                        },
                    })
            });
            match slot {
                Some(j) => {
                    filled[j] = Some(i);
                    last = Some(j);
                    for (attr, role) in &script.steps[j].bind {
                        if let (Some(v), false) = (inst.binding(attr), learned.contains_key(role)) {
                            learned.insert(role.clone(), v.to_string());
                            let role_sort = &script.role(role).expect("checked script").sort;
                            if let Some(s) = sorts.get_mut(v) {
                                if lib.is_subclass(role_sort, s) {
                                    *s = role_sort.clone();
                                }
                            }
                        }
                    }
                }
                None => anchored.entry(last).or_default().push(i),
            }
        }

        // Unmentioned roles: a default role's constant, else a fresh one.
        let mut constants = lf.constants.clone();
        for c in &mut constants {
            c.sort = sorts[&c.name].clone();
        }
        let mut pending: Vec<&Role> = script.roles.iter().filter(|r| !learned.contains_key(&r.name)).collect();
        while !pending.is_empty() {
            let before = pending.len();
            pending.retain(|r| match r.default.as_ref().and_then(|d| learned.get(d)) {
                Some(c) => {
                    learned.insert(r.name.clone(), c.clone());
                    false
                }
                None => true,
            });
            if pending.len() == before {
                // Nothing left to borrow from: invent the first pending role.
                let r = pending.remove(0);
                let name = fresh_name(&constants, &r.name);
                constants.push(ConstantDecl { name: name.clone(), sort: r.sort.clone() });
                learned.insert(r.name.clone(), name);
            }
        }

        let bind_roles = |step: &ScriptStep| -> BTreeMap<String, String> {
            step.bind.iter().map(|(attr, role)| (attr.clone(), learned[role].clone())).collect()
        };
        let observed_action = |i: usize, slot: Option<&ScriptStep>| {
            let inst = &lf.instances[i];
            let mut bindings: BTreeMap<String, String> =
                inst.bindings.iter().map(|b| (b.attribute.clone(), b.value.clone())).collect();
            if let Some(step) = slot {
                for (attr, v) in bind_roles(step) {
                    bindings.entry(attr).or_insert(v);
                }
            }
            StoryAction {
                name: inst.name.clone(),
                class: inst.class.clone(),
                bindings,
                slot: slot.map(|s| s.name.clone()),
                observed: true,
            }
        };

        let mut actions = Vec::new();
        let mut unaligned = Vec::new();
        let mut push_anchored = |actions: &mut Vec<StoryAction>, key: Option<usize>| {
            for &i in anchored.get(&key).into_iter().flatten() {
                unaligned.push(lf.instances[i].name.clone());
                actions.push(observed_action(i, None));
            }
        };
        push_anchored(&mut actions, None);
        for (j, step) in script.steps.iter().enumerate() {
            match filled[j] {
                Some(i) => actions.push(observed_action(i, Some(step))),
                None if step.optional => continue,
                None => actions.push(StoryAction {
                    name: format!("s_{}", step.name),
                    class: step.class.clone(),
                    bindings: bind_roles(step),
                    slot: Some(step.name.clone()),
                    observed: false,
                }),
            }
            push_anchored(&mut actions, Some(j));
        }

        let fill = |t: &FactTemplate| Fact {
            function: t.function.clone(),
            args: t.args.iter().map(|a| learned[a].clone()).collect(),
            value: match &t.value {
                Some(v) => learned[v].clone(),
                None => t.positive.to_string(),
            },
        };
        let mut initially: Vec<Fact> = script.initially.iter().map(fill).collect();
        for f in &script.all_persons {
            for c in constants.iter().filter(|c| lib.is_subclass(&c.sort, "persons")) {
                initially.push(Fact { function: f.clone(), args: vec![c.name.clone()], value: "true".into() });
            }
        }
        let goal = script.goal.iter().map(fill).collect();
        let statics = script.statics.iter().map(fill).collect();
        Ok(Scenario {
            mode: Mode::Complete,
            script: Some(script.name.clone()),
            goal_owner: Some(learned[&script.goal_owner].clone()),
            goal,
            constants,
            actions,
            roles: learned,
            initially,
            statics,
            unaligned,
        })
    }

    pub fn build(lf: &LogicForm, mode: Mode, script: &ActivityScript, lib: &ResolvedLibrary) -> Result<Self, ReasonError> {
        match mode {
            Mode::Project => {
                // Roles and the initial situation still come from the script.
                let mut sc = Scenario::complete(lf, script, lib)?;
                sc.actions.retain(|a| a.observed);
                sc.mode = Mode::Project;
                Ok(sc)
            }
            Mode::Complete | Mode::Diagnose => Scenario::complete(lf, script, lib),
        }
    }

    pub fn action(&self, name: &str) -> Option<&StoryAction> {
        self.actions.iter().find(|a| a.name == name)
    }

    pub fn is_constant(&self, name: &str) -> bool {
        self.constants.iter().any(|c| c.name == name)
    }

    pub fn structure(&self) -> StructureAst {
        let mut s = StructureAst::empty("story");
        for c in &self.constants {
            s.instances.push(InstanceDef::new(Term::Quoted(c.name.clone()), c.sort.clone()));
        }
        for a in &self.actions {
            let mut def = InstanceDef::new(Term::Ident(a.name.clone()), a.class.clone());
            for (attr, v) in &a.bindings {
                def = def.bind(attr.clone(), Term::Quoted(v.clone()));
            }
            s.instances.push(def);
        }
        let literal = |f: &Fact| ValueDef {
            literal: FunctionLiteral {
                function: f.function.clone(),
                args: f.args.iter().map(|a| Term::Quoted(a.clone())).collect(),
                relation: Relation::Eq,
                value: match f.value.as_str() {
                    "true" => Term::truth(true),
                    "false" => Term::truth(false),
                    v => Term::Quoted(v.to_string()),
                },
            },
            span: Span::default(),
        };
        s.statics = self.statics.iter().map(literal).collect();
        s.initially = self.initially.iter().map(literal).collect();
        s
    }

    /// Resolves the library together with this story's structure.
    pub fn library(&self, theory: &Theory, extra: &[StoryAction]) -> Result<ResolvedLibrary, ReasonError> {
        let mut s = self.structure();
        for a in extra {
            s.instances.push(InstanceDef::new(Term::Ident(a.name.clone()), a.class.clone()));
        }
        let (lib, diags) = theory.load_with_structure(s, "story.alm");
        match lib {
            Some(lib) if !diags.has_errors() => Ok(lib),
            _ => Err(ReasonError::Invalid(diags.render_text())),
        }
    }

    pub fn horizon(&self, cfg: &ReasonConfig) -> Result<u32, ReasonError> {
        let minimum = self.actions.iter().filter(|a| a.observed).count().max(1) as u32;
        match cfg.horizon {
            Some(given) if given < minimum => Err(ReasonError::HorizonTooSmall { given, minimum }),
            Some(given) => Ok(given),
            None => Ok(self.actions.len() as u32 + cfg.slack),
        }
    }

    /// Compiles the story into a program whose models are the readings of
    /// the story. `interfered` names actions disturbed by interference.
    pub fn compile(&self, cfg: &ReasonConfig, interfered: &[String]) -> Result<Compiled, ReasonError> {
        let extra: Vec<StoryAction> = interfered
            .iter()
            .map(|a| StoryAction {
                name: format!("intf_{}", a),
                class: "interference".into(),
                bindings: BTreeMap::new(),
                slot: None,
                observed: false,
            })
            .collect();
        let lib = self.library(&cfg.theory, &extra)?;
        let opts = TranslateOptions {
            horizon: self.horizon(cfg)?,
            initial: InitialState::Closed,
            occurrences: Occurrences::External,
        };
        let program = translate_with(&lib, &opts)?;
        let sym = |n: &str| program.symbols.get(n).map(str::to_string).unwrap_or_else(|| crate::asp::mangle(n));
        let mut text = emit_text(&program);
        text.push_str("\n% story\n");
        for a in &self.actions {
            let s = sym(&a.name);
            text.push_str(&format!("story({}).\n", s));
            if a.observed {
                text.push_str(&format!("observed({}).\n", s));
            }
        }
        for (i, a) in self.actions.iter().enumerate() {
            if let Some(b) = self.actions.get(i + 1) {
                text.push_str(&format!("before({},{}).\n", sym(&a.name), sym(&b.name)));
            }
        }
        text.push_str(STORY_RULES);
        for (a, x) in interfered.iter().zip(&extra) {
            text.push_str(&format!("occurs({},I) :- occurs({},I).\n", sym(&x.name), sym(a)));
            text.push_str(&format!(":- not done({}).\n", sym(a)));
        }
        text.push_str("#show occurs/2.\n#show skipped/1.\n");
        for (name, shape) in &program.functions {
            let arity = shape.arity + 1 + usize::from(shape.fluent);
            text.push_str(&format!("#show val_{}/{}.\n", name, arity));
        }
        Ok(Compiled { text, program })
    }
}

/// Each story action happens at most once, in the expected order, one per
/// step and without gaps. Observed actions must happen.
const STORY_RULES: &str = "\
{ occurs(A,I) : astep(I) } 1 :- story(A).
done(A) :- occurs(A,I), story(A).
skipped(A) :- story(A), not observed(A), not done(A).
:- observed(A), not done(A).
precedes(A,B) :- before(A,B).
precedes(A,C) :- precedes(A,B), before(B,C).
:- precedes(A,B), occurs(A,I), occurs(B,J), J <= I.
busy(I) :- occurs(A,I), story(A).
:- busy(I), I > 0, not busy(I-1).
:- astep(I), #count { A : occurs(A,I), story(A) } > 1.
";

fn observed_in_order(lf: &LogicForm) -> Vec<usize> {
    let mut obs: Vec<_> = lf.observations.iter().filter(|o| o.truth).collect();
    obs.sort_by_key(|o| o.ordinal);
    obs.iter()
        .filter_map(|o| lf.instances.iter().position(|i| i.name == o.instance))
        .collect()
}

fn fresh_name(constants: &[ConstantDecl], role: &str) -> String {
    let base = format!("the {}", role.replace('_', " "));
    let mut name = base.clone();
    let mut n = 2;
    while constants.iter().any(|c| c.name == name) {
        name = format!("{} {}", base, n);
        n += 1;
    }
    name
}

pub struct Compiled {
    pub text: String,
    pub program: AspProgram,
}

/// One reading of the story, decoded to ALM names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reading {
    /// Action to the step it happens at.
    pub steps: BTreeMap<String, u32>,
    /// Every occurrence atom, in step order.
    pub occurrences: Vec<(u32, String)>,
    pub skipped: BTreeSet<String>,
    /// `(function, args, step)` to value; statics carry no step.
    #[serde(skip)]
    pub values: BTreeMap<(String, Vec<String>, Option<u32>), String>,
}

impl Reading {
    fn decode(m: &AnswerSet, p: &AspProgram) -> Self {
        let name = |v: &Value| match v {
            Value::Sym(s) => p.symbols.display(s),
            Value::Int(i) => i.to_string(),
        };
        let mut r = Reading {
            steps: BTreeMap::new(),
            occurrences: Vec::new(),
            skipped: BTreeSet::new(),
            values: BTreeMap::new(),
        };
        for a in &m.atoms {
            match (a.pred.as_str(), a.args.as_slice()) {
                ("occurs", [x, Value::Int(i)]) => {
                    r.steps.insert(name(x), *i as u32);
                    r.occurrences.push((*i as u32, name(x)));
                }
                ("skipped", [x]) => {
                    r.skipped.insert(name(x));
                }
                (pred, args) => {
                    let Some(f) = pred.strip_prefix("val_") else { continue };
                    let Some(shape) = p.functions.get(f) else { continue };
                    let (args, step) = if shape.fluent {
                        match args.split_last() {
                            Some((Value::Int(i), rest)) => (rest, Some(*i as u32)),
                            _ => continue,
                        }
                    } else {
                        (args, None)
                    };
                    let Some((v, xs)) = args.split_last() else { continue };
                    r.values.insert((f.to_string(), xs.iter().map(name).collect(), step), name(v));
                }
            }
        }
        r.occurrences.sort();
        r
    }

    pub fn step_of(&self, action: &str) -> Option<u32> {
        self.steps.get(action).copied()
    }

    pub fn value(&self, function: &str, args: &[String], step: Option<u32>) -> Option<&str> {
        self.values.get(&(function.to_string(), args.to_vec(), step)).map(String::as_str)
    }

    /// All `(args, value)` of `function` at `step`.
    pub fn values_at<'a>(
        &'a self,
        function: &'a str,
        step: Option<u32>,
    ) -> impl Iterator<Item = (&'a [String], &'a str)> + 'a {
        self.values
            .iter()
            .filter(move |((f, _, s), _)| f == function && *s == step)
            .map(|((_, a, _), v)| (a.as_slice(), v.as_str()))
    }

    /// Last step with any recorded value.
    pub fn final_step(&self) -> u32 {
        self.values.keys().filter_map(|(_, _, s)| *s).max().unwrap_or(0)
    }
}

/// The readings with the fewest skipped script steps.
#[derive(Debug, Clone, Serialize)]
pub struct Solution {
    pub scenario: Scenario,
    pub readings: Vec<Reading>,
    pub skipped: usize,
    pub complete: bool,
    pub horizon: u32,
}

fn skip_bound(k: usize) -> String {
    format!(":- #count {{ A : skipped(A) }} > {}.\n", k)
}

/// Whether the compiled story has a reading with at most `k` skipped steps.
pub(crate) fn consistent(text: &str, k: usize, solver: &SolverConfig) -> Result<bool, ReasonError> {
    let cfg = SolverConfig { model_cap: 1, ..solver.clone() };
    let out = solve_external_text(&format!("{}{}", text, skip_bound(k)), &cfg)?;
    Ok(!out.models.is_empty())
}

/// Whether some reading has interference during `interfered` and at most
/// `max_skipped` skipped script steps.
pub fn is_consistent(
    scenario: &Scenario,
    cfg: &ReasonConfig,
    interfered: &[String],
    max_skipped: usize,
) -> Result<bool, ReasonError> {
    consistent(&scenario.compile(cfg, interfered)?.text, max_skipped, &cfg.solver)
}

/// Readings of the story with the fewest skipped script steps.
pub fn solve(scenario: &Scenario, cfg: &ReasonConfig) -> Result<Solution, ReasonError> {
    solve_interfered(scenario, cfg, &[])
}

/// As [`solve`], with interference during the named actions.
pub fn solve_interfered(scenario: &Scenario, cfg: &ReasonConfig, interfered: &[String]) -> Result<Solution, ReasonError> {
    let compiled = scenario.compile(cfg, interfered)?;
    let max = scenario.actions.iter().filter(|a| !a.observed).count();
    let k = (0..=max)
        .find_map(|k| match consistent(&compiled.text, k, &cfg.solver) {
            Ok(true) => Some(Ok(k)),
            Ok(false) => None,
            Err(e) => Some(Err(e)),
        })
        .ok_or(ReasonError::Inconsistent(max))??;
    let out = solve_external_text(&format!("{}{}", compiled.text, skip_bound(k)), &cfg.solver)?;
    let readings = out.models.iter().map(|m| Reading::decode(m, &compiled.program)).collect();
    Ok(Solution {
        scenario: scenario.clone(),
        readings,
        skipped: k,
        complete: out.complete,
        horizon: scenario.horizon(cfg)?,
    })
}

/// The bundled library without a structure.
pub fn theory_library() -> ResolvedLibrary {
    crate::restkb::load_library().0.expect("bundled library resolves")
}
