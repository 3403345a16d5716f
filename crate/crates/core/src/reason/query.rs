use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ReasonError, Solution, StoryAction};
use crate::sema::ResolvedLibrary;
use crate::syntax::BOOLEANS;

/// Questions about a solved story. `action` may name an action instance, a
/// script step or an action class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "query", rename_all = "snake_case")]
pub enum Query {
    /// Did the action happen? Also accepts a boolean fluent, asking whether
    /// it holds at the end.
    YesNo { action: String },
    When { action: String },
    /// Where was the person when the action happened?
    Where { person: String, action: String },
    Who { action: String },
    WhoWhom { action: String },
    /// Value of a function at the step the action happened.
    What {
        function: String,
        #[serde(default)]
        args: Vec<String>,
        action: String,
    },
    /// What was the person after when doing the action?
    Goal { person: String, action: String },
    /// Which activity the person meant the action as part of.
    Intended { person: String, action: String },
}

impl Query {
    /// Reads either `name(arg, ..)`, e.g. `who(e3)` or
    /// `what(open, the restaurant, e1)`, or the word form
    /// `<type> <action-or-fluent> [key=value..]`, e.g. `yes_no pay actor=Nicole`.
    pub fn parse(s: &str) -> Result<Self, ReasonError> {
        let s = s.trim();
        match s.split_once('(') {
            Some((head, _)) if !head.trim().contains(char::is_whitespace) && s.ends_with(')') => Self::parse_call(s),
            _ => Self::parse_words(s),
        }
    }

    fn parse_call(s: &str) -> Result<Self, ReasonError> {
        let bad = || ReasonError::Query(format!("cannot read query `{}`", s));
        let (head, rest) = s.split_once('(').ok_or_else(bad)?;
        let inner = rest.strip_suffix(')').ok_or_else(bad)?;
        let mut args: Vec<String> = inner
            .split(',')
            .map(|a| a.trim().trim_matches('"').to_string())
            .filter(|a| !a.is_empty())
            .collect();
        let (first, last) = match args.as_slice() {
            [a] => (a.clone(), a.clone()),
            [p, .., a] => (p.clone(), a.clone()),
            [] => return Err(bad()),
        };
        Ok(match (head.trim(), args.len()) {
            ("yes_no", 1) => Query::YesNo { action: last },
            ("when", 1) => Query::When { action: last },
            ("who", 1) => Query::Who { action: last },
            ("who_whom", 1) => Query::WhoWhom { action: last },
            ("where", 2) => Query::Where { person: first, action: last },
            ("goal", 2) => Query::Goal { person: first, action: last },
            ("intended", 2) => Query::Intended { person: first, action: last },
            ("what", n) if n >= 2 => {
                args.pop();
                let function = args.remove(0);
                Query::What { function, args, action: last }
            }
            _ => return Err(bad()),
        })
    }

    fn parse_words(s: &str) -> Result<Self, ReasonError> {
        let bad = |why: &str| ReasonError::Query(format!("cannot read query `{}`: {}", s, why));
        let words = shlex::split(s).ok_or_else(|| bad("unbalanced quotes"))?;
        let [kind, target, rest @ ..] = words.as_slice() else {
            return Err(bad("expected a query type and an action or fluent"));
        };
        let mut keys: Vec<(String, String)> = Vec::new();
        for w in rest {
            let (k, v) = w.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            keys.push((k.to_string(), v.to_string()));
        }
        let mut take = |key: &str| keys.iter().position(|(k, _)| k == key).map(|i| keys.remove(i).1);
        let person = take("person");
        let action = take("action");
        let args = take("args");
        let with_filters = |name: &str, keys: &[(String, String)]| {
            let mut r = name.to_string();
            for (k, v) in keys {
                r.push_str(&format!(" {}={}", k, shlex::try_quote(v).unwrap_or_default()));
            }
            r
        };
        let need_person = || person.clone().ok_or_else(|| bad("needs person=<name>"));
        Ok(match kind.as_str() {
            "yes_no" => Query::YesNo { action: with_filters(target, &keys) },
            "when" => Query::When { action: with_filters(target, &keys) },
            "who" => Query::Who { action: with_filters(target, &keys) },
            "who_whom" => Query::WhoWhom { action: with_filters(target, &keys) },
            "where" => Query::Where { person: need_person()?, action: with_filters(target, &keys) },
            "goal" => Query::Goal { person: need_person()?, action: with_filters(target, &keys) },
            "intended" => Query::Intended { person: need_person()?, action: with_filters(target, &keys) },
            "what" => Query::What {
                function: target.clone(),
                args: args.map(|a| a.split(',').map(|x| x.trim().to_string()).collect()).unwrap_or_default(),
                action: with_filters(&action.ok_or_else(|| bad("needs action=<action>"))?, &keys),
            },
            _ => return Err(bad("unknown query type")),
        })
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::YesNo { action } => write!(f, "yes_no({})", action),
            Query::When { action } => write!(f, "when({})", action),
            Query::Where { person, action } => write!(f, "where({}, {})", person, action),
            Query::Who { action } => write!(f, "who({})", action),
            Query::WhoWhom { action } => write!(f, "who_whom({})", action),
            Query::What { function, args, action } => {
                write!(f, "what({}", function)?;
                for a in args {
                    write!(f, ", {}", a)?;
                }
                write!(f, ", {})", action)
            }
            Query::Goal { person, action } => write!(f, "goal({}, {})", person, action),
            Query::Intended { person, action } => write!(f, "intended({}, {})", person, action),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QueryAnswer {
    pub query: String,
    pub verdict: Verdict,
    pub answer: Option<String>,
    /// Same answer in every reading.
    pub definite: bool,
    pub witnesses: Vec<String>,
}

/// Splits `pay actor=Nicole` into the action and its binding filters.
fn split_ref(r: &str) -> Result<(String, Vec<(String, String)>), ReasonError> {
    let bad = || ReasonError::Query(format!("cannot read action reference `{}`", r));
    let words = shlex::split(r).ok_or_else(bad)?;
    let (name, rest) = words.split_first().ok_or_else(bad)?;
    let filters = rest
        .iter()
        .map(|w| w.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())).ok_or_else(bad))
        .collect::<Result<_, _>>()?;
    Ok((name.clone(), filters))
}

fn resolve<'a>(sol: &'a Solution, lib: &ResolvedLibrary, r: &str) -> Result<Vec<&'a StoryAction>, ReasonError> {
    let (name, filters) = split_ref(r)?;
    let acts = &sol.scenario.actions;
    let by_name: Vec<_> = acts.iter().filter(|a| a.name == name).collect();
    let by_slot: Vec<_> = acts.iter().filter(|a| a.slot.as_deref() == Some(name.as_str())).collect();
    let found = if !by_name.is_empty() {
        by_name
    } else if !by_slot.is_empty() {
        by_slot
    } else if lib.class(&name).is_some() && lib.is_subclass(&name, "actions") {
        acts.iter().filter(|a| lib.is_subclass(&a.class, &name)).collect()
    } else {
        return Err(ReasonError::UnknownAction(name));
    };
    Ok(found
        .into_iter()
        .filter(|a| {
            filters
                .iter()
                .all(|(k, v)| a.bindings.get(k).is_some_and(|b| b.eq_ignore_ascii_case(v)))
        })
        .collect())
}

/// Per reading, the resolved actions that happen and their steps.
fn occurrences<'a>(sol: &Solution, acts: &[&'a StoryAction]) -> Vec<Vec<(&'a StoryAction, u32)>> {
    sol.readings
        .iter()
        .map(|r| acts.iter().filter_map(|a| r.step_of(&a.name).map(|s| (*a, s))).collect())
        .collect()
}

fn verdict_of(hits: &[bool]) -> Verdict {
    if !hits.is_empty() && hits.iter().all(|h| *h) {
        Verdict::Yes
    } else if hits.iter().all(|h| !*h) {
        Verdict::No
    } else {
        Verdict::Unknown
    }
}

fn witnesses(occ: &[Vec<(&StoryAction, u32)>]) -> Vec<String> {
    occ.iter()
        .flatten()
        .map(|(a, s)| format!("{}@{}", a.name, s))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// `Some(x)` when every entry is `x`.
fn unique(values: impl IntoIterator<Item = String>) -> (Option<String>, BTreeSet<String>) {
    let all: BTreeSet<String> = values.into_iter().collect();
    let one = if all.len() == 1 { all.iter().next().cloned() } else { None };
    (one, all)
}

pub fn answer(sol: &Solution, q: &Query, lib: &ResolvedLibrary) -> Result<QueryAnswer, ReasonError> {
    let mk = |verdict, answer: Option<String>, definite, witnesses| QueryAnswer {
        query: q.to_string(),
        verdict,
        answer,
        definite,
        witnesses,
    };
    let action_of = |q: &Query| -> String {
        match q {
            Query::YesNo { action }
            | Query::When { action }
            | Query::Where { action, .. }
            | Query::Who { action }
            | Query::WhoWhom { action }
            | Query::What { action, .. }
            | Query::Goal { action, .. }
            | Query::Intended { action, .. } => action.clone(),
        }
    };

    if let Query::YesNo { action } = q {
        let fluent = lib.function(action).is_some_and(|d| d.range == BOOLEANS);
        if fluent && resolve(sol, lib, action).is_err() {
            return Ok(fluent_holds(sol, action, &mk));
        }
    }
    let acts = resolve(sol, lib, &action_of(q))?;
    let occ = occurrences(sol, &acts);
    let hits: Vec<bool> = occ.iter().map(|o| !o.is_empty()).collect();
    let happened = verdict_of(&hits);
    let wit = witnesses(&occ);

    Ok(match q {
        Query::YesNo { .. } => mk(happened, Some(happened.to_string()), happened != Verdict::Unknown, wit),
        Query::When { .. } => {
            let (one, _) = unique(occ.iter().flatten().map(|(_, s)| s.to_string()));
            let definite = one.is_some() && happened == Verdict::Yes;
            mk(happened, one, definite, wit)
        }
        Query::Who { .. } | Query::WhoWhom { .. } => {
            let who = |a: &StoryAction| {
                let actor = a.bindings.get("actor").cloned().unwrap_or_else(|| "?".into());
                match (q, a.bindings.get("recipient").or_else(|| a.bindings.get("object"))) {
                    (Query::WhoWhom { .. }, Some(r)) => format!("{} -> {}", actor, r),
                    (Query::WhoWhom { .. }, None) => format!("{} -> ?", actor),
                    _ => actor,
                }
            };
            let (one, _) = unique(occ.iter().flatten().map(|(a, _)| who(a)));
            let definite = one.is_some() && happened == Verdict::Yes;
            mk(happened, one, definite, wit)
        }
        Query::Where { person, .. } => {
            let places = sol.readings.iter().zip(&occ).flat_map(|(r, o)| {
                o.iter().map(move |(_, s)| {
                    let args = [person.clone()];
                    r.value("at", &args, Some(*s))
                        .or_else(|| r.value("in", &args, Some(*s)))
                        .unwrap_or("unknown")
                        .to_string()
                })
            });
            let (one, _) = unique(places.collect::<Vec<_>>());
            let definite = one.is_some() && happened == Verdict::Yes;
            mk(happened, one, definite, wit)
        }
        Query::What { function, args, .. } => {
            let boolean = lib.function(function).is_some_and(|d| d.range == BOOLEANS);
            let values = sol.readings.iter().zip(&occ).flat_map(|(r, o)| {
                o.iter().map(move |(_, s)| {
                    if args.is_empty() {
                        let all: Vec<String> = r
                            .values_at(function, Some(*s))
                            .chain(r.values_at(function, None))
                            .filter(|(_, v)| !boolean || *v == "true")
                            .map(|(a, v)| if boolean { a.join(", ") } else { format!("{} = {}", a.join(", "), v) })
                            .collect();
                        all.join("; ")
                    } else {
                        r.value(function, args, Some(*s))
                            .or_else(|| r.value(function, args, None))
                            .map(str::to_string)
                            .unwrap_or_else(|| if boolean { "false".into() } else { "undefined".into() })
                    }
                })
            });
            let (one, _) = unique(values.collect::<Vec<_>>());
            let definite = one.is_some() && happened == Verdict::Yes;
            mk(happened, one, definite, wit)
        }
        Query::Goal { person, .. } => {
            if sol.scenario.goal_owner.as_deref() == Some(person.as_str()) && !acts.is_empty() {
                let goal: Vec<String> = sol
                    .scenario
                    .goal
                    .iter()
                    .map(|f| match f.value.as_str() {
                        "true" => format!("{}({})", f.function, f.args.join(", ")),
                        _ => f.to_string(),
                    })
                    .collect();
                mk(Verdict::Yes, Some(goal.join(" and ")), true, wit)
            } else {
                mk(Verdict::No, None, true, wit)
            }
        }
        Query::Intended { person, .. } => {
            let plays = sol.scenario.roles.values().any(|c| c == person);
            let scripted = acts.iter().any(|a| a.slot.is_some());
            match (&sol.scenario.script, plays && scripted) {
                (Some(name), true) => mk(Verdict::Yes, Some(name.clone()), true, wit),
                _ => mk(Verdict::No, None, true, wit),
            }
        }
    })
}

fn fluent_holds(
    sol: &Solution,
    function: &str,
    mk: &dyn Fn(Verdict, Option<String>, bool, Vec<String>) -> QueryAnswer,
) -> QueryAnswer {
    let last = sol.horizon;
    let holding: Vec<BTreeSet<String>> = sol
        .readings
        .iter()
        .map(|r| {
            r.values_at(function, Some(last))
                .filter(|(_, v)| *v == "true")
                .map(|(a, _)| format!("{}({})", function, a.join(", ")))
                .collect()
        })
        .collect();
    let hits: Vec<bool> = holding.iter().map(|h| !h.is_empty()).collect();
    let v = verdict_of(&hits);
    let wit: Vec<String> = holding.into_iter().flatten().collect::<BTreeSet<_>>().into_iter().collect();
    mk(v, Some(v.to_string()), v != Verdict::Unknown, wit)
}
