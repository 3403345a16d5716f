//! Grounding and stable-model enumeration.
//!
//! [`ground`] instantiates an [`AspProgram`](crate::asp::AspProgram);
//! [`solve_reference`] enumerates stable models of small choice-free ground
//! programs by brute force; [`solve_external`] runs a solver process.

mod check;
mod expand;
mod external;
mod ground;
mod reference;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::asp::{AspTerm, Atom, CmpOp};

pub use check::{is_model, is_stable};
pub use expand::expand_choices;
pub use external::{detect_solver, solve_external, solve_external_text, SolveOutcome, SolverConfig};
pub use ground::{ground, ground_with_cap, DEFAULT_ATOM_CAP};
pub use reference::{solve_reference, solve_reference_with, Strategy, MAX_REFERENCE_ATOMS};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Sym(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{}", i),
            Value::Sym(s) => f.write_str(s),
        }
    }
}

impl Value {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            Value::Sym(_) => None,
        }
    }

    pub fn as_sym(&self) -> Option<&str> {
        match self {
            Value::Sym(s) => Some(s),
            Value::Int(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GroundAtom {
    pub pred: String,
    pub args: Vec<Value>,
}

impl GroundAtom {
    pub fn new(pred: impl Into<String>, args: Vec<Value>) -> Self {
        GroundAtom { pred: pred.into(), args }
    }

    /// Convert a variable-free atom.
    pub fn from_atom(a: &Atom) -> Option<Self> {
        let args = a
            .args
            .iter()
            .map(|t| match t {
                AspTerm::Sym(s) => Some(Value::Sym(s.clone())),
                AspTerm::Int(i) => Some(Value::Int(*i)),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(GroundAtom::new(a.pred.clone(), args))
    }

    pub fn parse(s: &str) -> Option<Self> {
        crate::asp::parse_atom(s).ok().and_then(|a| Self::from_atom(&a))
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pred)?;
        if !self.args.is_empty() {
            let args: Vec<String> = self.args.iter().map(|v| v.to_string()).collect();
            write!(f, "({})", args.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundElement {
    pub atom: usize,
    pub pos: Vec<usize>,
    pub neg: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroundHead {
    None,
    Atom(usize),
    Choice {
        lower: Option<u32>,
        upper: Option<u32>,
        elements: Vec<GroundElement>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroundAggElement {
    pub tuple: Vec<Value>,
    pub pos: Vec<usize>,
    pub neg: Vec<usize>,
}

/// `#count` over distinct tuples whose conditions hold.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroundAggregate {
    pub elements: Vec<GroundAggElement>,
    pub op: CmpOp,
    pub bound: i64,
}

impl GroundAggregate {
    pub fn holds(&self, truth: impl Fn(usize) -> bool) -> bool {
        let tuples: BTreeSet<&Vec<Value>> = self
            .elements
            .iter()
            .filter(|e| e.pos.iter().all(|&a| truth(a)) && e.neg.iter().all(|&a| !truth(a)))
            .map(|e| &e.tuple)
            .collect();
        self.op.holds(&(tuples.len() as i64), &self.bound)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroundRule {
    pub head: GroundHead,
    pub pos: Vec<usize>,
    pub neg: Vec<usize>,
    pub aggregates: Vec<GroundAggregate>,
    /// Index of the rule it was instantiated from.
    pub origin: usize,
}

impl GroundRule {
    pub fn fact(atom: usize, origin: usize) -> Self {
        GroundRule {
            head: GroundHead::Atom(atom),
            pos: vec![],
            neg: vec![],
            aggregates: vec![],
            origin,
        }
    }

    pub fn is_fact(&self) -> bool {
        matches!(self.head, GroundHead::Atom(_)) && self.pos.is_empty() && self.neg.is_empty() && self.aggregates.is_empty()
    }
}

#[derive(Debug, Clone, Default)]
pub struct GroundProgram {
    pub atoms: Vec<GroundAtom>,
    pub rules: Vec<GroundRule>,
    index: HashMap<GroundAtom, usize>,
}

impl GroundProgram {
    pub fn new(atoms: Vec<GroundAtom>, rules: Vec<GroundRule>) -> Self {
        let index = atoms.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        GroundProgram { atoms, rules, index }
    }

    pub fn lookup(&self, a: &GroundAtom) -> Option<usize> {
        self.index.get(a).copied()
    }

    /// Index of `a`, adding it to the universe if needed.
    pub fn intern(&mut self, a: GroundAtom) -> usize {
        if let Some(i) = self.index.get(&a) {
            return *i;
        }
        self.atoms.push(a.clone());
        self.index.insert(a, self.atoms.len() - 1);
        self.atoms.len() - 1
    }

    pub fn facts(&self) -> BTreeSet<usize> {
        self.rules
            .iter()
            .filter(|r| r.is_fact())
            .filter_map(|r| match r.head {
                GroundHead::Atom(a) => Some(a),
                _ => None,
            })
            .collect()
    }

    pub fn has_choices(&self) -> bool {
        self.rules.iter().any(|r| matches!(r.head, GroundHead::Choice { .. }))
    }

    /// Number of ground rules instantiated from source rule `origin`.
    pub fn count_from(&self, origin: usize) -> usize {
        self.rules.iter().filter(|r| r.origin == origin).count()
    }

    /// Atoms that occur in some rule head.
    pub fn head_atoms(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for r in &self.rules {
            match &r.head {
                GroundHead::Atom(a) => {
                    out.insert(*a);
                }
                GroundHead::Choice { elements, .. } => out.extend(elements.iter().map(|e| e.atom)),
                GroundHead::None => {}
            }
        }
        out
    }

    /// Propagate facts through definite rules and drop what they decide.
    pub fn simplified(self) -> Self {
        let mut certain = vec![false; self.atoms.len()];
        loop {
            let mut changed = false;
            for r in &self.rules {
                if let GroundHead::Atom(h) = r.head {
                    if !certain[h] && r.neg.is_empty() && r.aggregates.is_empty() && r.pos.iter().all(|&a| certain[a]) {
                        certain[h] = true;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut rules: Vec<GroundRule> = Vec::new();
        let mut fact_origin: HashMap<usize, usize> = HashMap::new();
        for mut r in self.rules {
            if r.neg.iter().any(|&a| certain[a]) {
                continue;
            }
            if let GroundHead::Atom(h) = r.head {
                if certain[h] {
                    fact_origin.entry(h).or_insert(r.origin);
                    continue;
                }
            }
            r.pos.retain(|&a| !certain[a]);
            for agg in &mut r.aggregates {
                agg.elements.retain(|e| !e.neg.iter().any(|&a| certain[a]));
                for e in &mut agg.elements {
                    e.pos.retain(|&a| !certain[a]);
                }
            }
            if let GroundHead::Choice { elements, .. } = &mut r.head {
                elements.retain(|e| !e.neg.iter().any(|&a| certain[a]));
                for e in elements.iter_mut() {
                    e.pos.retain(|&a| !certain[a]);
                }
            }
            rules.push(r);
        }
        let mut facts: Vec<(usize, usize)> = fact_origin.into_iter().collect();
        facts.sort();
        let mut out: Vec<GroundRule> = facts.into_iter().map(|(a, o)| GroundRule::fact(a, o)).collect();
        let mut seen = std::collections::HashSet::new();
        for r in rules {
            if seen.insert(r.clone()) {
                out.push(r);
            }
        }
        GroundProgram::new(self.atoms, out)
    }

    pub fn to_text(&self) -> String {
        let name = |i: &usize| self.atoms[*i].to_string();
        let lits = |pos: &[usize], neg: &[usize]| -> Vec<String> {
            pos.iter().map(name).chain(neg.iter().map(|a| format!("not {}", name(a)))).collect()
        };
        let mut out = String::new();
        for r in &self.rules {
            let head = match &r.head {
                GroundHead::None => String::new(),
                GroundHead::Atom(a) => name(a),
                GroundHead::Choice { lower, upper, elements } => {
                    let els: Vec<String> = elements
                        .iter()
                        .map(|e| {
                            let c = lits(&e.pos, &e.neg);
                            if c.is_empty() {
                                name(&e.atom)
                            } else {
                                format!("{} : {}", name(&e.atom), c.join(", "))
                            }
                        })
                        .collect();
                    format!(
                        "{}{{ {} }}{}",
                        lower.map(|l| format!("{} ", l)).unwrap_or_default(),
                        els.join("; "),
                        upper.map(|u| format!(" {}", u)).unwrap_or_default()
                    )
                }
            };
            let mut body = lits(&r.pos, &r.neg);
            for agg in &r.aggregates {
                let els: Vec<String> = agg
                    .elements
                    .iter()
                    .map(|e| {
                        let t: Vec<String> = e.tuple.iter().map(|v| v.to_string()).collect();
                        let c = lits(&e.pos, &e.neg);
                        if c.is_empty() {
                            t.join(",")
                        } else {
                            format!("{}:{}", t.join(","), c.join(","))
                        }
                    })
                    .collect();
                body.push(format!("#count{{{}}}{}{}", els.join(";"), agg.op, agg.bound));
            }
            if body.is_empty() {
                out.push_str(&format!("{}.\n", head));
            } else if head.is_empty() {
                out.push_str(&format!(":- {}.\n", body.join(", ")));
            } else {
                out.push_str(&format!("{} :- {}.\n", head, body.join(", ")));
            }
        }
        out
    }
}

/// A stable model as a set of ground atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AnswerSet {
    pub atoms: BTreeSet<GroundAtom>,
}

impl AnswerSet {
    pub fn new(atoms: impl IntoIterator<Item = GroundAtom>) -> Self {
        AnswerSet { atoms: atoms.into_iter().collect() }
    }

    pub fn contains(&self, a: &GroundAtom) -> bool {
        self.atoms.contains(a)
    }

    pub fn with_pred<'a>(&'a self, pred: &'a str) -> impl Iterator<Item = &'a GroundAtom> + 'a {
        self.atoms.iter().filter(move |a| a.pred == pred)
    }

    /// Atoms kept by `keep`.
    pub fn project(&self, keep: impl Fn(&GroundAtom) -> bool) -> AnswerSet {
        AnswerSet { atoms: self.atoms.iter().filter(|a| keep(a)).cloned().collect() }
    }

    /// Drops the auxiliary atoms introduced by choice expansion.
    pub fn without_auxiliary(&self) -> AnswerSet {
        self.project(|a| !a.pred.starts_with(expand::COMPLEMENT_PREFIX))
    }

    pub fn to_strings(&self) -> BTreeSet<String> {
        self.atoms.iter().map(|a| a.to_string()).collect()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

impl fmt::Display for AnswerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.atoms.iter().map(|a| a.to_string()).collect();
        f.write_str(&v.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroundError {
    #[error("atom universe exceeds the cap of {cap} atoms")]
    AtomCap { cap: usize },
    #[error("unsafe variables {vars:?} in rule `{rule}`")]
    Unsafe { rule: String, vars: Vec<String> },
    #[error("{0}")]
    Unsupported(String),
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("program has {atoms} undecided atoms; the reference solver handles at most {max}")]
    TooLarge { atoms: usize, max: usize },
    #[error("more than {cap} models")]
    CapExceeded { cap: usize },
    #[error("the reference solver needs a choice-free program; expand choices first")]
    ChoiceRules,
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error("no external solver found (set solver.command or ALMKIT_SOLVER_CMD)")]
    NoSolver,
    #[error("solver command template lacks an {{input}} placeholder: {0}")]
    BadTemplate(String),
    #[error("could not run solver `{command}`: {source}")]
    Spawn {
        command: String,
        #[source]
        source: std::io::Error,
    },
    #[error("solver failed with {status}: {stderr}")]
    Process { status: String, stderr: String },
    #[error("cannot parse solver output line {line:?}: {message}")]
    Parse { line: String, message: String },
    #[error("solver timed out after {secs} s")]
    Timeout { secs: f64 },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[cfg(test)]
mod tests;
