//! Activity scripts: the usual course of an activity as ordered slots over
//! named roles, loaded from TOML.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ReasonError;
use crate::sema::{Diagnostic, Diagnostics, ResolvedLibrary};
use crate::syntax::{Span, BOOLEANS};

pub const RESTAURANT: &str = include_str!("../../../../lib/scripts/restaurant.toml");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Role {
    pub name: String,
    pub sort: String,
    /// Role whose constant is reused when this one is never mentioned.
    pub default: Option<String>,
}

/// `f(r1, ..) = v`, `f(r1, ..)` or `-f(r1, ..)` over role names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactTemplate {
    pub function: String,
    pub args: Vec<String>,
    /// `None` for boolean sugar.
    pub value: Option<String>,
    pub positive: bool,
}

impl FactTemplate {
    pub fn parse(s: &str) -> Result<Self, ReasonError> {
        let bad = || ReasonError::Script(format!("cannot read fact `{}`", s));
        let s = s.trim();
        let (positive, s) = match s.strip_prefix('-') {
            Some(rest) => (false, rest.trim_start()),
            None => (true, s),
        };
        let (lhs, value) = match s.split_once('=') {
            Some((l, v)) => (l.trim(), Some(v.trim().to_string())),
            None => (s, None),
        };
        let (function, args) = match lhs.split_once('(') {
            Some((f, rest)) => {
                let inner = rest.strip_suffix(')').ok_or_else(bad)?;
                (f.trim(), inner.split(',').map(|a| a.trim().to_string()).filter(|a| !a.is_empty()).collect())
            }
            None => (lhs, Vec::new()),
        };
        if function.is_empty() || (value.is_some() && !positive) {
            return Err(bad());
        }
        Ok(FactTemplate { function: function.to_string(), args, value, positive })
    }

    pub fn roles(&self) -> impl Iterator<Item = &String> {
        self.args.iter().chain(self.value.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScriptStep {
    pub name: String,
    pub class: String,
    /// Attribute to role.
    pub bind: BTreeMap<String, String>,
    pub optional: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActivityScript {
    pub name: String,
    pub goal_owner: String,
    pub goal: Vec<FactTemplate>,
    pub roles: Vec<Role>,
    pub initially: Vec<FactTemplate>,
    /// Boolean fluents that start true for every person.
    pub all_persons: Vec<String>,
    pub statics: Vec<FactTemplate>,
    pub steps: Vec<ScriptStep>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RoleSpec {
    Sort(String),
    Full { sort: String, default: Option<String> },
}

#[derive(Deserialize, Default)]
struct FactSection {
    #[serde(default)]
    facts: Vec<String>,
    #[serde(default)]
    all_persons: Vec<String>,
}

#[derive(Deserialize)]
struct StepSpec {
    name: String,
    class: String,
    #[serde(default)]
    bind: BTreeMap<String, String>,
    #[serde(default)]
    optional: bool,
}

#[derive(Deserialize)]
struct ScriptFile {
    name: String,
    goal_owner: String,
    #[serde(default)]
    goal: Vec<String>,
    roles: BTreeMap<String, RoleSpec>,
    #[serde(default)]
    initially: FactSection,
    #[serde(default)]
    statics: FactSection,
    steps: Vec<StepSpec>,
}

impl ActivityScript {
    pub fn restaurant() -> Self {
        Self::from_toml(RESTAURANT).expect("bundled script parses")
    }

    pub fn from_toml(text: &str) -> Result<Self, ReasonError> {
        let f: ScriptFile = toml::from_str(text).map_err(|e| ReasonError::Script(e.to_string()))?;
        let facts = |v: &[String]| v.iter().map(|s| FactTemplate::parse(s)).collect::<Result<Vec<_>, _>>();
        let script = ActivityScript {
            name: f.name,
            goal_owner: f.goal_owner,
            goal: facts(&f.goal)?,
            roles: f
                .roles
                .into_iter()
                .map(|(name, spec)| match spec {
                    RoleSpec::Sort(sort) => Role { name, sort, default: None },
                    RoleSpec::Full { sort, default } => Role { name, sort, default },
                })
                .collect(),
            initially: facts(&f.initially.facts)?,
            all_persons: f.initially.all_persons,
            statics: facts(&f.statics.facts)?,
            steps: f
                .steps
                .into_iter()
                .map(|s| ScriptStep { name: s.name, class: s.class, bind: s.bind, optional: s.optional })
                .collect(),
        };
        let mut names = std::collections::BTreeSet::new();
        for s in &script.steps {
            if !names.insert(&s.name) {
                return Err(ReasonError::Script(format!("step `{}` appears twice", s.name)));
            }
        }
        Ok(script)
    }

    pub fn role(&self, name: &str) -> Option<&Role> {
        self.roles.iter().find(|r| r.name == name)
    }

    pub fn step(&self, name: &str) -> Option<&ScriptStep> {
        self.steps.iter().find(|s| s.name == name)
    }

    /// Classes, attributes, sorts, functions and roles all exist.
    pub fn check(&self, lib: &ResolvedLibrary) -> Diagnostics {
        let mut d = Diagnostics::new();
        let file = format!("{}.toml", self.name);
        let mut err = |m: String| d.push(Diagnostic::error("SCRIPT", &file, Span::new(0, 0), m));
        for r in &self.roles {
            if lib.class(&r.sort).is_none() {
                err(format!("role `{}` has unknown sort `{}`", r.name, r.sort));
            }
            if let Some(def) = &r.default {
                if self.role(def).is_none() {
                    err(format!("role `{}` defaults to unknown role `{}`", r.name, def));
                }
            }
        }
        if self.role(&self.goal_owner).is_none() {
            err(format!("goal owner `{}` is not a role", self.goal_owner));
        }
        for s in &self.steps {
            if !lib.class(&s.class).is_some_and(|_| lib.is_subclass(&s.class, "actions")) {
                err(format!("step `{}` uses unknown action class `{}`", s.name, s.class));
                continue;
            }
            for (attr, role) in &s.bind {
                if lib.attribute(&s.class, attr).is_none() {
                    err(format!("step `{}`: `{}` has no attribute `{}`", s.name, s.class, attr));
                }
                if self.role(role).is_none() {
                    err(format!("step `{}`: unknown role `{}`", s.name, role));
                }
            }
        }
        for f in self.goal.iter().chain(&self.initially).chain(&self.statics) {
            if lib.function(&f.function).is_none() {
                err(format!("unknown function `{}`", f.function));
            }
            for r in f.roles() {
                if self.role(r).is_none() {
                    err(format!("`{}` mentions unknown role `{}`", f.function, r));
                }
            }
        }
        for f in &self.all_persons {
            match lib.function(f) {
                Some(decl) if decl.range == BOOLEANS => {}
                _ => err(format!("`{}` is not a boolean function", f)),
            }
        }
        d
    }
}
