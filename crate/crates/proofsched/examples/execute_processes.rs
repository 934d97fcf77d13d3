//! Parse process terms, decide structural congruence, run executions
//! step by step, and enumerate the reachable state space.

use proofsched::process::{congruent, execute, parse_term, reachable, step, Location};

fn main() {
    // Each action carries a unique location tag `^n` so that distinct
    // occurrences of the same channel can be told apart.
    let p = parse_term("a^1.c^2 | b^3.~a^4 | ~b^5.~c^6 | a^7.~b^8 | b^9 | ~a^0").unwrap();
    println!("term: {p}");

    // Structural congruence: parallel composition is commutative,
    // associative, and has the inactive term 1 as unit.
    let q = parse_term("(~a^0 | b^9) | ~b^5.~c^6 | 1 | a^7.~b^8 | a^1.c^2 | b^3.~a^4").unwrap();
    println!("congruent to a reshuffling: {}", congruent(&p, &q));

    // A single step synchronizes a dual pair of top-level prefixes.
    let after = step(&p, Location(1), Location(0)).unwrap();
    println!("after (1,0): {after}");

    // A full execution is a sequence of such steps.
    let trace = execute(&p, &[(Location(9), Location(5)), (Location(1), Location(0))]).unwrap();
    println!("after (9,5)(1,0): {}", trace.r#final);
    println!("its pairing: {}", trace.pairing());

    // The reachable set collects every (pairing, residual) pair, with
    // residuals deduplicated up to congruence.
    let states = reachable(&p);
    println!("reachable states: {}", states.len());
    for (c, t) in states.iter().take(5) {
        println!("  {c}  {}", t.to_term());
    }
    println!("  ...");
}
