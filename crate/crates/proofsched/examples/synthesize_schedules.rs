//! Synthesize schedules: modality-free proofs of `source ⊸ target`
//! under an instantiation of the source type's fresh variables. Under
//! the synchronous translation a schedule exists exactly when the
//! target is reachable by execution.

use proofsched::process::parse_term;
use proofsched::sched::{synthesize, DEFAULT_SYNTH_ATOM_CAP};
use proofsched::translate::Variant;

fn main() {
    let p = parse_term("a^1.c^2 | ~a^3 | ~c^4").unwrap();
    println!("source: {p}\n");

    for target in ["a^1.c^2 | ~a^3 | ~c^4", "c^2 | ~c^4", "1", "c^2"] {
        let q = parse_term(target).unwrap();
        match synthesize(&p, &q, Variant::Sync, DEFAULT_SYNTH_ATOM_CAP).unwrap() {
            Some(s) => {
                println!("to `{q}`: schedule with {} links", s.proof.link_count());
                println!("  proves {}", s.implication());
            }
            // `c^2` alone is not reachable: stepping on (1,3) leaves
            // `c^2 | ~c^4`, and ~c^4 cannot be discarded.
            None => println!("to `{q}`: no schedule"),
        }
    }

    // A deadlocked term: each component guards the channel the other
    // needs first, so nothing is reachable but the term itself.
    let d = parse_term("a^1.b^2 | ~b^3.~a^4").unwrap();
    let none = synthesize(&d, &parse_term("1").unwrap(), Variant::Async, DEFAULT_SYNTH_ATOM_CAP)
        .unwrap();
    println!("\ndeadlock `{d}` to `1`: {}", match none {
        Some(_) => "schedule found",
        None => "no schedule",
    });
}
