//! The located execution relation and its exhaustive closure.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::canonical::{canonicalize, congruent, CanonicalTerm};
use super::pairing::Pairing;
use super::term::{Location, ProcessTerm};
use super::ProcessError;

/// The action order of a term: `l < m` when `m` occurs in the body of
/// the prefix tagged `l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionOrder {
    /// Strict covering pairs (parent prefix, immediate nested prefix).
    pub covers: Vec<(Location, Location)>,
    /// For each location, the set of locations strictly above it
    /// (its proper descendants in the prefix nesting).
    above: BTreeMap<Location, BTreeSet<Location>>,
    locations: BTreeSet<Location>,
}

impl ActionOrder {
    /// `l <= m` in the action order (reflexive).
    pub fn le(&self, l: Location, m: Location) -> bool {
        l == m || self.lt(l, m)
    }

    /// `l < m`: m is nested under the prefix tagged l.
    pub fn lt(&self, l: Location, m: Location) -> bool {
        self.above.get(&l).map_or(false, |s| s.contains(&m))
    }

    /// All strict pairs `l < m`.
    pub fn strict_pairs(&self) -> Vec<(Location, Location)> {
        let mut out = Vec::new();
        for (l, ups) in &self.above {
            for m in ups {
                out.push((*l, *m));
            }
        }
        out
    }

    /// Locations minimal in the order (top-level prefixes).
    pub fn minimal(&self) -> BTreeSet<Location> {
        let mut non_minimal = BTreeSet::new();
        for ups in self.above.values() {
            non_minimal.extend(ups.iter().copied());
        }
        self.locations
            .iter()
            .copied()
            .filter(|l| !non_minimal.contains(l))
            .collect()
    }

    pub fn locations(&self) -> &BTreeSet<Location> {
        &self.locations
    }

    /// The strict predecessors of `m` (locations guarding it).
    pub fn below(&self, m: Location) -> BTreeSet<Location> {
        self.above
            .iter()
            .filter(|(_, ups)| ups.contains(&m))
            .map(|(l, _)| *l)
            .collect()
    }
}

/// Computes the action order of a term.
pub fn action_order(term: &ProcessTerm) -> ActionOrder {
    let mut covers = Vec::new();
    let mut above: BTreeMap<Location, BTreeSet<Location>> = BTreeMap::new();
    walk(term, &mut covers, &mut above);
    let locations = term.location_set();
    for l in &locations {
        above.entry(*l).or_default();
    }
    ActionOrder {
        covers,
        above,
        locations,
    }
}

fn walk(
    term: &ProcessTerm,
    covers: &mut Vec<(Location, Location)>,
    above: &mut BTreeMap<Location, BTreeSet<Location>>,
) -> Vec<Location> {
    match term {
        ProcessTerm::Unit => Vec::new(),
        ProcessTerm::Par(l, r) => {
            let mut locs = walk(l, covers, above);
            locs.extend(walk(r, covers, above));
            locs
        }
        ProcessTerm::Prefix {
            location, body, ..
        } => {
            let inner = walk(body, covers, above);
            // immediate nested prefixes are the minimal locations of the body
            let inner_set: BTreeSet<Location> = inner.iter().copied().collect();
            let mut non_minimal = BTreeSet::new();
            for i in &inner {
                if let Some(ups) = above.get(i) {
                    non_minimal.extend(ups.iter().copied());
                }
            }
            for i in inner_set.difference(&non_minimal) {
                covers.push((*location, *i));
            }
            above.entry(*location).or_default().extend(inner.iter().copied());
            let mut locs = vec![*location];
            locs.extend(inner);
            locs
        }
    }
}

/// One execution step: synchronize the top-level dual prefixes at `l` and
/// `m`, releasing their bodies in place.
pub fn step(term: &ProcessTerm, l: Location, m: Location) -> Result<ProcessTerm, ProcessError> {
    let order = action_order(term);
    if !order.locations().contains(&l) {
        return Err(ProcessError::UnknownLocation(l));
    }
    if !order.locations().contains(&m) {
        return Err(ProcessError::UnknownLocation(m));
    }
    let minimal = order.minimal();
    if l == m || !minimal.contains(&l) || !minimal.contains(&m) {
        return Err(ProcessError::NotEnabled { l, m });
    }
    let (ln, lp, _) = term.find_prefix(l).unwrap();
    let (mn, mp, _) = term.find_prefix(m).unwrap();
    if ln != mn || lp == mp {
        return Err(ProcessError::NotEnabled { l, m });
    }
    Ok(release(term, l, m))
}

fn release(term: &ProcessTerm, l: Location, m: Location) -> ProcessTerm {
    match term {
        ProcessTerm::Unit => ProcessTerm::Unit,
        ProcessTerm::Par(a, b) => ProcessTerm::par(release(a, l, m), release(b, l, m)),
        ProcessTerm::Prefix {
            name,
            polarity,
            location,
            body,
        } => {
            if *location == l || *location == m {
                (**body).clone()
            } else {
                ProcessTerm::prefix(name.clone(), *polarity, *location, (**body).clone())
            }
        }
    }
}

/// All location pairs for which `step` succeeds, normalized `(min, max)`.
pub fn enabled_pairs(term: &ProcessTerm) -> BTreeSet<(Location, Location)> {
    let order = action_order(term);
    let minimal: Vec<Location> = order.minimal().into_iter().collect();
    let mut out = BTreeSet::new();
    for (i, &l) in minimal.iter().enumerate() {
        for &m in &minimal[i + 1..] {
            let (ln, lp, _) = term.find_prefix(l).unwrap();
            let (mn, mp, _) = term.find_prefix(m).unwrap();
            if ln == mn && lp != mp {
                out.insert((l.min(m), l.max(m)));
            }
        }
    }
    out
}

/// A replayed execution: initial term, ordered steps, final term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionTrace {
    pub initial: ProcessTerm,
    pub steps: Vec<(Location, Location)>,
    pub r#final: ProcessTerm,
}

impl ExecutionTrace {
    /// The step set as a pairing of the initial term.
    pub fn pairing(&self) -> Pairing {
        Pairing::from_pairs(self.steps.iter().copied())
    }
}

/// Replays a list of steps from `term`.
pub fn execute(
    term: &ProcessTerm,
    steps: &[(Location, Location)],
) -> Result<ExecutionTrace, ProcessError> {
    let mut current = term.clone();
    for (i, &(l, m)) in steps.iter().enumerate() {
        current = step(&current, l, m).map_err(|_| ProcessError::NotEnabledAt {
            index: i,
            l,
            m,
        })?;
    }
    Ok(ExecutionTrace {
        initial: term.clone(),
        steps: steps.to_vec(),
        r#final: current,
    })
}

/// Exhaustive closure of the execution relation: all `(c, Q)` with
/// `P ->*_c Q`, one canonical representative per congruence class,
/// together with a witness residual term and step order for each.
pub fn reachable_with_witness(
    term: &ProcessTerm,
) -> BTreeMap<(Pairing, CanonicalTerm), (ProcessTerm, Vec<(Location, Location)>)> {
    let mut out = BTreeMap::new();
    let mut queue = VecDeque::new();
    let start = (Pairing::empty(), canonicalize(term));
    out.insert(start.clone(), (term.clone(), Vec::new()));
    queue.push_back((term.clone(), Pairing::empty(), Vec::<(Location, Location)>::new()));
    while let Some((t, c, steps)) = queue.pop_front() {
        for (l, m) in enabled_pairs(&t) {
            let next = step(&t, l, m).expect("enabled pair steps");
            let mut c2 = c.clone();
            c2.insert(l, m);
            let key = (c2.clone(), canonicalize(&next));
            if !out.contains_key(&key) {
                let mut s2 = steps.clone();
                s2.push((l, m));
                out.insert(key, (next.clone(), s2.clone()));
                queue.push_back((next, c2, s2));
            }
        }
    }
    out
}

/// All `(pairing, residual-class)` reachable from `term`.
pub fn reachable(term: &ProcessTerm) -> BTreeSet<(Pairing, CanonicalTerm)> {
    reachable_with_witness(term).into_keys().collect()
}

/// Step-multiset equality of two traces from congruent initial terms; when
/// the step sets agree, the final terms are congruent (checked).
pub fn permutation_equivalent(
    t1: &ExecutionTrace,
    t2: &ExecutionTrace,
) -> Result<bool, ProcessError> {
    if !congruent(&t1.initial, &t2.initial) {
        return Err(ProcessError::MismatchedInitial);
    }
    if t1.pairing() != t2.pairing() {
        return Ok(false);
    }
    debug_assert!(congruent(&t1.r#final, &t2.r#final));
    Ok(true)
}
