//! Brute-force stable models: every candidate set is checked against the
//! least model of its reduct.

use super::*;

/// Largest number of undecided atoms the reference solver accepts.
pub const MAX_REFERENCE_ATOMS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Split the candidate space across threads (sequential without the `parallel` feature).
    #[default]
    Parallel,
    Sequential,
}

struct Compiled {
    /// Undecided atoms, bit `i` is `undecided[i]`.
    undecided: Vec<usize>,
    certain: BTreeSet<usize>,
    rules: Vec<(Option<u32>, u32, u32)>,
    constraints: Vec<(u32, u32, Vec<GroundAggregate>)>,
    aggregate_atoms: HashMap<usize, Option<u32>>,
}

impl Compiled {
    fn truth(&self, mask: u32, atom: usize) -> bool {
        match self.aggregate_atoms.get(&atom) {
            Some(Some(bit)) => mask & (1 << bit) != 0,
            Some(None) => self.certain.contains(&atom),
            None => false,
        }
    }

    fn stable(&self, m: u32) -> bool {
        let mut lm = 0u32;
        loop {
            let mut next = lm;
            for &(head, pos, neg) in &self.rules {
                if neg & m == 0 && pos & !next == 0 {
                    if let Some(h) = head {
                        next |= 1 << h;
                    }
                }
            }
            if next == lm {
                break;
            }
            lm = next;
        }
        if lm != m {
            return false;
        }
        self.constraints.iter().all(|(pos, neg, aggs)| {
            !(pos & !m == 0 && neg & m == 0 && aggs.iter().all(|a| a.holds(|x| self.truth(m, x))))
        })
    }
}

fn compile(g: &GroundProgram) -> Result<Compiled, SolveError> {
    if g.has_choices() {
        return Err(SolveError::ChoiceRules);
    }
    let certain = g.facts();
    let undecided: Vec<usize> = g.head_atoms().into_iter().filter(|a| !certain.contains(a)).collect();
    if undecided.len() > MAX_REFERENCE_ATOMS {
        return Err(SolveError::TooLarge { atoms: undecided.len(), max: MAX_REFERENCE_ATOMS });
    }
    let bit: HashMap<usize, u32> = undecided.iter().enumerate().map(|(i, &a)| (a, i as u32)).collect();
    // a literal on an atom that is neither certain nor derivable is constant false
    let mut rules = Vec::new();
    let mut constraints = Vec::new();
    let mut aggregate_atoms = HashMap::new();
    'rules: for r in &g.rules {
        if r.is_fact() {
            continue;
        }
        let mut pos = 0u32;
        let mut neg = 0u32;
        for a in &r.pos {
            match bit.get(a) {
                Some(b) => pos |= 1 << b,
                None if certain.contains(a) => {}
                None => continue 'rules,
            }
        }
        for a in &r.neg {
            match bit.get(a) {
                Some(b) => neg |= 1 << b,
                None if certain.contains(a) => continue 'rules,
                None => {}
            }
        }
        for agg in &r.aggregates {
            for e in &agg.elements {
                for a in e.pos.iter().chain(&e.neg) {
                    aggregate_atoms.insert(*a, bit.get(a).copied());
                }
            }
        }
        match r.head {
            GroundHead::None => constraints.push((pos, neg, r.aggregates.clone())),
            GroundHead::Atom(h) => {
                if !r.aggregates.is_empty() {
                    return Err(SolveError::Ground(GroundError::Unsupported(
                        "aggregates outside constraints".into(),
                    )));
                }
                if certain.contains(&h) {
                    continue;
                }
                rules.push((bit.get(&h).copied(), pos, neg));
            }
            GroundHead::Choice { .. } => unreachable!("checked above"),
        }
    }
    Ok(Compiled { undecided, certain, rules, constraints, aggregate_atoms })
}

pub fn solve_reference(g: &GroundProgram, cap: usize) -> Result<Vec<AnswerSet>, SolveError> {
    solve_reference_with(g, cap, Strategy::default())
}

pub fn solve_reference_with(g: &GroundProgram, cap: usize, strategy: Strategy) -> Result<Vec<AnswerSet>, SolveError> {
    let c = compile(g)?;
    let n = c.undecided.len();
    let total: u64 = 1 << n;
    let masks: Vec<u32> = match strategy {
        Strategy::Sequential => (0..total).map(|m| m as u32).filter(|&m| c.stable(m)).collect(),
        Strategy::Parallel => {
            let chunk: u64 = 1 << 12;
            let starts: Vec<u64> = (0..total).step_by(chunk as usize).collect();
            crate::par::map(&starts, |&s| {
                (s..(s + chunk).min(total))
                    .map(|m| m as u32)
                    .filter(|&m| c.stable(m))
                    .collect::<Vec<u32>>()
            })
            .into_iter()
            .flatten()
            .collect()
        }
    };
    if masks.len() > cap {
        return Err(SolveError::CapExceeded { cap });
    }
    let mut models: Vec<Vec<usize>> = masks
        .into_iter()
        .map(|m| {
            let mut v: Vec<usize> = c.certain.iter().copied().collect();
            v.extend((0..n).filter(|i| m & (1 << i) != 0).map(|i| c.undecided[i]));
            v.sort();
            v
        })
        .collect();
    models.sort();
    Ok(models
        .into_iter()
        .map(|v| AnswerSet::new(v.into_iter().map(|i| g.atoms[i].clone())))
        .collect())
}
