//! The asynchronous translation is strictly weaker than execution: it
//! can schedule a guarded interaction before the guard fires, so some
//! implications hold between terms that execution never connects.

use proofsched::process::{canonicalize, parse_term, reachable};
use proofsched::sched::{implies, induced_pairing, replay, synthesize, DEFAULT_SYNTH_ATOM_CAP};
use proofsched::translate::Variant;

fn main() {
    // The b-redex is guarded by a, so `a^1.(b^2 | ~b^3)` only ever
    // executes to itself — yet asynchronously it implies `a^1`,
    // because the b-interaction can be scheduled under the guard.
    let p = parse_term("a^1.(b^2 | ~b^3)").unwrap();
    let q = parse_term("a^1").unwrap();

    let reached = reachable(&p)
        .iter()
        .any(|(_, c)| *c == canonicalize(&q));
    println!("`{q}` reachable from `{p}` by execution: {reached}");
    println!(
        "`{p}` implies `{q}` asynchronously: {}",
        implies(&p, &q, DEFAULT_SYNTH_ATOM_CAP).unwrap()
    );
    println!(
        "synchronous schedule exists: {}",
        synthesize(&p, &q, Variant::Sync, DEFAULT_SYNTH_ATOM_CAP)
            .unwrap()
            .is_some()
    );

    // The asynchronous schedule pairs (2,3) under the unfired guard;
    // that pairing is not downward closed, so the schedule cannot be
    // replayed as an execution.
    let s = synthesize(&p, &q, Variant::Async, DEFAULT_SYNTH_ATOM_CAP)
        .unwrap()
        .unwrap();
    println!("induced pairing: {}", induced_pairing(&s).unwrap());
    match replay(&s) {
        Ok(_) => unreachable!(),
        Err(e) => println!("replay fails as expected: {e}"),
    }
}
