use std::collections::BTreeMap;

use itertools::Itertools;
use serde::Serialize;

use super::{is_consistent, skip_bound, ReasonConfig, ReasonError, Reading, Scenario};
use crate::par;
use crate::sema::ResolvedLibrary;
use crate::solve::{solve_external_text, SolverConfig};

/// Interference during these actions restores consistency.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Explanation {
    pub interfered: Vec<String>,
    /// Step of each interference occurrence in one witnessing reading.
    pub steps: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnosis {
    /// False when the story is consistent as told.
    pub needed: bool,
    pub candidates: Vec<String>,
    pub size: Option<usize>,
    pub explanations: Vec<Explanation>,
    /// Every proper subset of every explanation was refuted by the solver.
    pub minimal: bool,
}

/// Smallest sets of communication actions whose garbling by interference
/// makes the full script consistent with the story.
pub fn diagnose(sc: &Scenario, lib: &ResolvedLibrary, cfg: &ReasonConfig) -> Result<Diagnosis, ReasonError> {
    let candidates: Vec<String> = sc
        .actions
        .iter()
        .filter(|a| lib.is_subclass(&a.class, "communicate"))
        .map(|a| a.name.clone())
        .collect();
    let check = |set: &Vec<String>| is_consistent(sc, cfg, set, 0);
    let mut known: BTreeMap<Vec<String>, bool> = BTreeMap::new();
    if check(&Vec::new())? {
        return Ok(Diagnosis { needed: false, candidates, size: Some(0), explanations: Vec::new(), minimal: true });
    }
    known.insert(Vec::new(), false);

    for size in 1..=cfg.max_explanation.min(candidates.len()) {
        let sets: Vec<Vec<String>> = candidates.iter().cloned().combinations(size).collect();
        let results = par::map(&sets, check);
        let mut found = Vec::new();
        for (set, r) in sets.into_iter().zip(results) {
            let ok = r?;
            if ok {
                found.push(set.clone());
            }
            known.insert(set, ok);
        }
        if found.is_empty() {
            continue;
        }
        let mut minimal = true;
        for set in &found {
            for drop in 0..set.len() {
                let mut sub = set.clone();
                sub.remove(drop);
                let ok = match known.get(&sub) {
                    Some(&ok) => ok,
                    None => check(&sub)?,
                };
                minimal &= !ok;
            }
        }
        let explanations = found
            .into_iter()
            .map(|set| witness(sc, cfg, set))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(Diagnosis { needed: true, candidates, size: Some(size), explanations, minimal });
    }
    Err(ReasonError::NoExplanation(cfg.max_explanation))
}

fn witness(sc: &Scenario, cfg: &ReasonConfig, set: Vec<String>) -> Result<Explanation, ReasonError> {
    let compiled = sc.compile(cfg, &set)?;
    let solver = SolverConfig { model_cap: 1, ..cfg.solver.clone() };
    let out = solve_external_text(&format!("{}{}", compiled.text, skip_bound(0)), &solver)?;
    let reading = out.models.first().map(|m| Reading::decode(m, &compiled.program));
    let steps = set
        .iter()
        .map(|a| reading.as_ref().and_then(|r| r.step_of(&format!("intf_{}", a))).unwrap_or(0))
        .collect();
    Ok(Explanation { interfered: set, steps })
}
