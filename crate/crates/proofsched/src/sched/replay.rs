//! Replaying schedules: cutting the canonical proof of the source
//! against a schedule and reading the execution off the eliminated
//! modality pairs; pairings to and from schedules.

use crate::net::normalize;
use crate::process::{
    congruent, execute, is_consistent, step, ExecutionTrace, Location, Pairing, ProcessTerm,
};
use crate::translate::{proof_assign, Variant};

use super::{trace_schedule, SchedError, Schedule};

/// The modality pairs eliminated when the canonical source proof is cut
/// against the schedule, in elimination order.
fn eliminated_pairs(s: &Schedule) -> Result<Vec<(Location, Location)>, SchedError> {
    let tp = proof_assign(&s.source, s.variant);
    let pi = tp.proof.instantiate(&s.instantiation);
    let mut ps = crate::net::ProofStructure::new();
    let m1 = ps.absorb(&pi);
    let m2 = ps.absorb(&s.proof);
    ps.add_cut(m1[&pi.conclusions()[0]], m2[&s.proof.conclusions()[0]]);
    ps.set_conclusions(vec![m2[&s.proof.conclusions()[1]]]);
    let (_, emitted) = normalize(&ps)?;
    Ok(emitted)
}

/// The pairing a schedule induces on its source: the location pairs
/// whose modalities cancel during normalization.
pub fn induced_pairing(s: &Schedule) -> Result<Pairing, SchedError> {
    Ok(Pairing::from_pairs(eliminated_pairs(s)?))
}

/// Lexicographically least ordering of `pairs` that executes from
/// `term`, by backtracking; `None` when no ordering executes.
fn least_ordering(
    term: &ProcessTerm,
    pairs: &[(Location, Location)],
) -> Option<Vec<(Location, Location)>> {
    fn go(
        term: &ProcessTerm,
        remaining: &mut Vec<(Location, Location)>,
        acc: &mut Vec<(Location, Location)>,
    ) -> bool {
        if remaining.is_empty() {
            return true;
        }
        for i in 0..remaining.len() {
            let (l, m) = remaining[i];
            if let Ok(next) = step(term, l, m) {
                remaining.remove(i);
                acc.push((l, m));
                if go(&next, remaining, acc) {
                    return true;
                }
                acc.pop();
                remaining.insert(i, (l, m));
            }
        }
        false
    }
    let mut sorted: Vec<(Location, Location)> = pairs
        .iter()
        .map(|&(l, m)| (l.min(m), l.max(m)))
        .collect();
    sorted.sort();
    sorted.dedup();
    let mut acc = Vec::with_capacity(sorted.len());
    go(term, &mut sorted, &mut acc).then_some(acc)
}

/// Replays a schedule as an execution of its source. The eliminated
/// pairs are tried in elimination order first; if the asynchronous
/// translation consumed modalities out of execution order, a valid
/// ordering of the same pairs is searched for instead.
pub fn replay(s: &Schedule) -> Result<ExecutionTrace, SchedError> {
    s.validate()?;
    let emitted = eliminated_pairs(s)?;
    let trace = match execute(&s.source, &emitted) {
        Ok(t) => t,
        Err(_) => {
            let ordering = least_ordering(&s.source, &emitted).ok_or_else(|| {
                SchedError::NotReplayable(format!(
                    "no execution order realizes the pairs {emitted:?}"
                ))
            })?;
            execute(&s.source, &ordering)?
        }
    };
    if !congruent(&trace.r#final, &s.target) {
        return Err(SchedError::NotReplayable(format!(
            "replay ends in `{}`, not the target `{}`",
            trace.r#final, s.target
        )));
    }
    Ok(trace)
}

/// The schedule of a consistent pairing: its lexicographically least
/// execution ordering, as a trace schedule.
pub fn pairing_to_schedule(
    term: &ProcessTerm,
    pairing: &Pairing,
    variant: Variant,
) -> Result<Schedule, SchedError> {
    if let Err(inc) = is_consistent(term, pairing)? {
        return Err(SchedError::InconsistentPairing(inc));
    }
    let pairs: Vec<(Location, Location)> = pairing.pairs().collect();
    let ordering = least_ordering(term, &pairs).expect("consistent pairings execute");
    trace_schedule(term, &ordering, variant)
}
