//! Replay schedules as executions, read the pairing a schedule induces
//! on its source, convert consistent pairings back into schedules, and
//! serialize schedules to versioned JSON.

use proofsched::process::{parse_term, Location, Pairing};
use proofsched::sched::{
    induced_pairing, pairing_to_schedule, replay, schedule_from_json, schedule_to_json,
    trace_schedule,
};
use proofsched::translate::Variant;

fn main() {
    let p = parse_term("a^1.c^2 | b^3.~a^4 | ~b^5.~c^6 | a^7.~b^8 | b^9 | ~a^0").unwrap();

    // A schedule for a three-step execution, built by composing the
    // per-step interaction proofs.
    let steps = [
        (Location(9), Location(5)),
        (Location(1), Location(0)),
        (Location(2), Location(6)),
    ];
    let s = trace_schedule(&p, &steps, Variant::Async).unwrap();
    println!("schedule proves: source ⊸ {}", s.target);

    // Cutting the canonical proof of the source against the schedule
    // cancels modality pairs; those pairs replay the execution.
    let trace = replay(&s).unwrap();
    println!("replays: {:?}", trace.steps);
    println!("ends in: {}", trace.r#final);

    // The induced pairing is exactly the step set...
    let c = induced_pairing(&s).unwrap();
    println!("induced pairing: {c}");

    // ...and a consistent pairing converts back to a schedule whose
    // induced pairing is the original: the roundtrip is the identity.
    let c0 = Pairing::from_pairs(steps);
    let s2 = pairing_to_schedule(&p, &c0, Variant::Async).unwrap();
    assert_eq!(induced_pairing(&s2).unwrap(), c0);
    println!("pairing -> schedule -> pairing is the identity");

    // Schedules serialize to versioned JSON and validate on the way in.
    let json = schedule_to_json(&s);
    let back = schedule_from_json(&json).unwrap();
    assert_eq!(back.proof.canonical_key(), s.proof.canonical_key());
    println!("JSON roundtrip preserved the proof (format {})", json["format"]);
}
