//! Pairings: partial involutions over a term's locations, their validity
//! and consistency semantics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::exec::{action_order, ActionOrder};
use super::term::{Location, ProcessTerm};
use super::ProcessError;

/// A set of pairwise disjoint unordered location pairs, stored as
/// `(min, max)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pairing {
    pairs: BTreeSet<(Location, Location)>,
}

impl Pairing {
    pub fn empty() -> Pairing {
        Pairing::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Location, Location)>) -> Pairing {
        let mut p = Pairing::empty();
        for (l, m) in pairs {
            p.insert(l, m);
        }
        p
    }

    pub fn insert(&mut self, l: Location, m: Location) {
        assert_ne!(l, m, "a pairing has no fixed points");
        self.pairs.insert((l.min(m), l.max(m)));
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Location, Location)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn domain(&self) -> BTreeSet<Location> {
        self.pairs.iter().flat_map(|&(l, m)| [l, m]).collect()
    }

    /// The partner of `l`, if paired.
    pub fn partner(&self, l: Location) -> Option<Location> {
        self.pairs.iter().find_map(|&(a, b)| {
            if a == l {
                Some(b)
            } else if b == l {
                Some(a)
            } else {
                None
            }
        })
    }

    pub fn is_subset(&self, other: &Pairing) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    pub fn contains(&self, l: Location, m: Location) -> bool {
        self.pairs.contains(&(l.min(m), l.max(m)))
    }

    /// The pairs are pairwise disjoint by construction; this checks that
    /// the domain size matches (an involution without fixed points).
    pub fn is_involution(&self) -> bool {
        self.domain().len() == 2 * self.pairs.len()
    }

    /// Validity against a host term: subjects equal, polarities opposite.
    pub fn validate(&self, term: &ProcessTerm) -> Result<(), ProcessError> {
        if !self.is_involution() {
            return Err(ProcessError::InvalidPairing(
                "pairs are not disjoint".into(),
            ));
        }
        for (l, m) in self.pairs() {
            let (ln, lp, _) = term
                .find_prefix(l)
                .ok_or(ProcessError::UnknownLocation(l))?;
            let (mn, mp, _) = term
                .find_prefix(m)
                .ok_or(ProcessError::UnknownLocation(m))?;
            if ln != mn {
                return Err(ProcessError::InvalidPairing(format!(
                    "subjects of {} and {} differ",
                    l, m
                )));
            }
            if lp == mp {
                return Err(ProcessError::InvalidPairing(format!(
                    "polarities of {} and {} agree",
                    l, m
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (l, m)) in self.pairs().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({},{})", l, m)?;
        }
        write!(f, "}}")
    }
}

/// Why a pairing is inconsistent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Inconsistency {
    /// A paired location guarded by an unpaired one.
    NotDownwardClosed { location: Location, guard: Location },
    /// A cycle in the induced order on pair classes, as a location list.
    Cycle(Vec<Location>),
}

/// Consistency check per the pairing semantics: the domain must be
/// downward closed for the action order and the relation `~c <P ~c`
/// acyclic. On failure a witness is returned.
pub fn is_consistent(
    term: &ProcessTerm,
    pairing: &Pairing,
) -> Result<Result<(), Inconsistency>, ProcessError> {
    pairing.validate(term)?;
    let order = action_order(term);
    let dom = pairing.domain();
    for &l in &dom {
        for g in order.below(l) {
            if !dom.contains(&g) {
                return Ok(Err(Inconsistency::NotDownwardClosed {
                    location: l,
                    guard: g,
                }));
            }
        }
    }
    Ok(class_cycle(pairing, &order).map_or(Ok(()), |c| Err(Inconsistency::Cycle(c))))
}

/// Looks for a cycle of `~c <P ~c` on the equivalence classes of the
/// pairing (classes are the pairs plus singletons).
fn class_cycle(pairing: &Pairing, order: &ActionOrder) -> Option<Vec<Location>> {
    // map each location in the domain to a class id (index of its pair)
    let pairs: Vec<(Location, Location)> = pairing.pairs().collect();
    let mut class_of: BTreeMap<Location, usize> = BTreeMap::new();
    for (i, (l, m)) in pairs.iter().enumerate() {
        class_of.insert(*l, i);
        class_of.insert(*m, i);
    }
    // edges between classes from the strict action order restricted to dom(c)
    let mut edges: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (l, &cl) in &class_of {
        for (m, &cm) in &class_of {
            if cl != cm && order.lt(*l, *m) {
                edges.entry(cl).or_default().insert(cm);
            }
        }
    }
    // a pair internally ordered is a self-loop: m ~ l < m
    for (i, (l, m)) in pairs.iter().enumerate() {
        if order.lt(*l, *m) || order.lt(*m, *l) {
            edges.entry(i).or_default().insert(i);
        }
    }
    // depth-first cycle detection
    let n = pairs.len();
    let mut state = vec![0u8; n]; // 0 unvisited, 1 on stack, 2 done
    let mut stack = Vec::new();
    for start in 0..n {
        if state[start] != 0 {
            continue;
        }
        if let Some(cycle) = dfs(start, &edges, &mut state, &mut stack) {
            let mut locs = Vec::new();
            for i in cycle {
                locs.push(pairs[i].0);
                locs.push(pairs[i].1);
            }
            return Some(locs);
        }
    }
    None
}

fn dfs(
    v: usize,
    edges: &BTreeMap<usize, BTreeSet<usize>>,
    state: &mut [u8],
    stack: &mut Vec<usize>,
) -> Option<Vec<usize>> {
    state[v] = 1;
    stack.push(v);
    if let Some(nexts) = edges.get(&v) {
        for &w in nexts {
            if state[w] == 1 {
                let pos = stack.iter().position(|&x| x == w).unwrap();
                return Some(stack[pos..].to_vec());
            }
            if state[w] == 0 {
                if let Some(c) = dfs(w, edges, state, stack) {
                    return Some(c);
                }
            }
        }
    }
    stack.pop();
    state[v] = 2;
    None
}

/// All valid pairings of a term; with `total_only`, only those covering
/// every location. Backtracking over locations grouped by subject.
pub fn enumerate_pairings(
    term: &ProcessTerm,
    total_only: bool,
    location_cap: usize,
) -> Result<BTreeSet<Pairing>, ProcessError> {
    term.validate()?;
    let locs = term.locations();
    if locs.len() > location_cap {
        return Err(ProcessError::CapExceeded {
            what: "locations".into(),
            cap: location_cap,
        });
    }
    // group locations by subject, split by polarity
    let mut groups: BTreeMap<String, (Vec<Location>, Vec<Location>)> = BTreeMap::new();
    for &l in &locs {
        let (name, pol, _) = term.find_prefix(l).unwrap();
        let entry = groups.entry(name.to_string()).or_default();
        match pol {
            super::term::Polarity::Pos => entry.0.push(l),
            super::term::Polarity::Neg => entry.1.push(l),
        }
    }
    let groups: Vec<(Vec<Location>, Vec<Location>)> = groups.into_values().collect();
    let mut out = BTreeSet::new();
    let mut current = Pairing::empty();
    enumerate_groups(&groups, 0, total_only, &mut current, &mut out);
    Ok(out)
}

fn enumerate_groups(
    groups: &[(Vec<Location>, Vec<Location>)],
    idx: usize,
    total_only: bool,
    current: &mut Pairing,
    out: &mut BTreeSet<Pairing>,
) {
    if idx == groups.len() {
        out.insert(current.clone());
        return;
    }
    let (pos, neg) = &groups[idx];
    enumerate_matchings(pos, neg, 0, &mut BTreeSet::new(), total_only, current, &mut |c, covered_all| {
        if total_only && !covered_all {
            return;
        }
        enumerate_groups(groups, idx + 1, total_only, c, out);
    });
}

/// Enumerates partial matchings between `pos` and `neg`; calls `k` with
/// a flag telling whether every location of the group is matched.
fn enumerate_matchings(
    pos: &[Location],
    neg: &[Location],
    i: usize,
    used_neg: &mut BTreeSet<Location>,
    total_only: bool,
    current: &mut Pairing,
    k: &mut dyn FnMut(&mut Pairing, bool),
) {
    if i == pos.len() {
        let covered_all = current_group_total(pos, neg, used_neg);
        k(current, covered_all);
        return;
    }
    let l = pos[i];
    // leaving l unmatched can never reach a total pairing
    if !total_only {
        enumerate_matchings(pos, neg, i + 1, used_neg, total_only, current, k);
    }
    for &m in neg {
        if used_neg.contains(&m) {
            continue;
        }
        used_neg.insert(m);
        current.insert(l, m);
        enumerate_matchings(pos, neg, i + 1, used_neg, total_only, current, k);
        current.remove(l, m);
        used_neg.remove(&m);
    }
}

fn current_group_total(pos: &[Location], neg: &[Location], used_neg: &BTreeSet<Location>) -> bool {
    // all positives were matched by construction when we reach i == pos.len()
    // with every l matched; totality additionally needs every negative used
    used_neg.len() == neg.len() && pos.len() == neg.len()
}

impl Pairing {
    fn remove(&mut self, l: Location, m: Location) {
        self.pairs.remove(&(l.min(m), l.max(m)));
    }
}

/// All subset-maximal consistent pairings contained in `c`.
pub fn maximal_consistent_subpairings(
    term: &ProcessTerm,
    c: &Pairing,
) -> Result<BTreeSet<Pairing>, ProcessError> {
    c.validate(term)?;
    let pairs: Vec<(Location, Location)> = c.pairs().collect();
    let mut consistent_subsets: Vec<Pairing> = Vec::new();
    let n = pairs.len();
    for mask in 0..(1u64 << n) {
        let sub = Pairing::from_pairs(
            (0..n).filter(|i| mask & (1 << i) != 0).map(|i| pairs[i]),
        );
        if is_consistent(term, &sub)?.is_ok() {
            consistent_subsets.push(sub);
        }
    }
    let mut out = BTreeSet::new();
    for s in &consistent_subsets {
        let maximal = !consistent_subsets
            .iter()
            .any(|t| s != t && s.is_subset(t));
        if maximal {
            out.insert(s.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::parse_term;
    use super::*;
    use crate::process::canonicalize;

    const P_EX: &str = "a^1.c^2 | b^3.~a^4 | ~b^5.~c^6 | a^7.~b^8 | b^9 | ~a^0";

    fn loc(n: u64) -> Location {
        Location(n)
    }

    fn pairing(pairs: &[(u64, u64)]) -> Pairing {
        Pairing::from_pairs(pairs.iter().map(|&(l, m)| (loc(l), loc(m))))
    }

    // the four total pairings of the running example
    fn c1() -> Pairing {
        pairing(&[(1, 0), (3, 8), (7, 4), (9, 5), (2, 6)])
    }
    fn c2() -> Pairing {
        pairing(&[(1, 4), (3, 5), (7, 0), (9, 8), (2, 6)])
    }
    fn c3() -> Pairing {
        pairing(&[(1, 4), (3, 8), (7, 0), (9, 5), (2, 6)])
    }
    fn c4() -> Pairing {
        pairing(&[(1, 0), (3, 5), (7, 4), (9, 8), (2, 6)])
    }

    #[test]
    fn validity() {
        let p = parse_term(P_EX).unwrap();
        assert!(c1().validate(&p).is_ok());
        // subject mismatch
        assert!(pairing(&[(1, 6)]).validate(&p).is_err());
        // polarity agreement
        assert!(pairing(&[(1, 7)]).validate(&p).is_err());
        // unknown location
        assert!(pairing(&[(1, 42)]).validate(&p).is_err());
        // overlapping pairs
        assert!(pairing(&[(1, 4), (4, 7)]).validate(&p).is_err());
    }

    #[test]
    fn total_pairings_of_example() {
        let p = parse_term(P_EX).unwrap();
        let total = enumerate_pairings(&p, true, 24).unwrap();
        let expected: BTreeSet<Pairing> = [c1(), c2(), c3(), c4()].into_iter().collect();
        assert_eq!(total, expected);
    }

    #[test]
    fn partial_pairings_include_empty_and_are_closed_downward() {
        let p = parse_term(P_EX).unwrap();
        let all = enumerate_pairings(&p, false, 24).unwrap();
        assert!(all.contains(&Pairing::empty()));
        for c in &all {
            assert!(c.validate(&p).is_ok());
        }
        // every total pairing appears among the partial ones
        for c in [c1(), c2(), c3(), c4()] {
            assert!(all.contains(&c));
        }
    }

    #[test]
    fn consistency_of_the_four_totals() {
        let p = parse_term(P_EX).unwrap();
        assert!(is_consistent(&p, &c2()).unwrap().is_ok());
        assert!(is_consistent(&p, &c3()).unwrap().is_ok());
        assert!(is_consistent(&p, &c4()).unwrap().is_ok());
        match is_consistent(&p, &c1()).unwrap() {
            Err(Inconsistency::Cycle(locs)) => {
                // the cycle is induced by the pairs (3,8) and (7,4)
                let set: BTreeSet<Location> = locs.into_iter().collect();
                let expected: BTreeSet<Location> =
                    [loc(3), loc(8), loc(4), loc(7)].into_iter().collect();
                assert_eq!(set, expected);
            }
            other => panic!("expected a cycle, got {:?}", other),
        }
    }

    #[test]
    fn downward_closure_violation() {
        let p = parse_term(P_EX).unwrap();
        // location 4 paired while its guard 3 is not in the domain
        let c = pairing(&[(1, 4)]);
        match is_consistent(&p, &c).unwrap() {
            Err(Inconsistency::NotDownwardClosed { location, guard }) => {
                assert_eq!(location, loc(4));
                assert_eq!(guard, loc(3));
            }
            other => panic!("expected downward-closure failure, got {:?}", other),
        }
    }

    #[test]
    fn consistent_pairings_are_execution_pairings() {
        // oracle: a pairing is consistent iff some execution realizes it
        let p = parse_term(P_EX).unwrap();
        let reached: BTreeSet<Pairing> = crate::process::reachable(&p)
            .into_iter()
            .map(|(c, _)| c)
            .collect();
        for c in enumerate_pairings(&p, false, 24).unwrap() {
            let consistent = is_consistent(&p, &c).unwrap().is_ok();
            assert_eq!(
                consistent,
                reached.contains(&c),
                "pairing {} consistency/execution mismatch",
                c
            );
        }
    }

    #[test]
    fn maximal_consistent_subpairing_of_c1() {
        let p = parse_term(P_EX).unwrap();
        let maxes = maximal_consistent_subpairings(&p, &c1()).unwrap();
        let expected = pairing(&[(9, 5), (1, 0), (2, 6)]);
        assert_eq!(maxes, [expected].into_iter().collect());
    }

    #[test]
    fn maximal_consistent_subpairings_are_maximal() {
        let p = parse_term(P_EX).unwrap();
        for c in [c1(), c2(), c3(), c4()] {
            let maxes = maximal_consistent_subpairings(&p, &c).unwrap();
            for m in &maxes {
                // adding any further pair of c breaks consistency
                for (l, x) in c.pairs() {
                    if m.contains(l, x) {
                        continue;
                    }
                    let mut bigger = m.clone();
                    bigger.insert(l, x);
                    assert!(is_consistent(&p, &bigger).unwrap().is_err());
                }
            }
        }
        // a consistent pairing is its own unique maximal consistent subpairing
        let maxes = maximal_consistent_subpairings(&p, &c2()).unwrap();
        assert_eq!(maxes, [c2()].into_iter().collect());
    }

    #[test]
    fn pairing_of_a_trace_is_consistent() {
        let p = parse_term(P_EX).unwrap();
        let t = crate::process::execute(
            &p,
            &[(loc(9), loc(5)), (loc(1), loc(0)), (loc(2), loc(6))],
        )
        .unwrap();
        assert!(is_consistent(&p, &t.pairing()).unwrap().is_ok());
        let _ = canonicalize(&t.r#final);
    }

    #[test]
    fn cap_is_enforced() {
        let p = parse_term(P_EX).unwrap();
        assert!(matches!(
            enumerate_pairings(&p, false, 5),
            Err(ProcessError::CapExceeded { .. })
        ));
    }
}
