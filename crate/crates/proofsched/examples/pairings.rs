//! Enumerate the total pairings of a process, check them for
//! consistency, and extract maximal consistent sub-pairings.
//!
//! A pairing matches dual occurrences of the same channel; it is
//! consistent exactly when some execution realizes it, which happens
//! when its domain is downward closed under prefixing and the induced
//! order on pairs is acyclic.

use proofsched::process::{
    enumerate_pairings, is_consistent, maximal_consistent_subpairings, parse_term,
    DEFAULT_LOCATION_CAP,
};

fn main() {
    let p = parse_term("a^1.c^2 | b^3.~a^4 | ~b^5.~c^6 | a^7.~b^8 | b^9 | ~a^0").unwrap();
    println!("term: {p}\n");

    let totals = enumerate_pairings(&p, true, DEFAULT_LOCATION_CAP).unwrap();
    println!("total pairings: {}", totals.len());

    for c in &totals {
        match is_consistent(&p, c).unwrap() {
            Ok(()) => println!("  {c}  consistent"),
            Err(inc) => {
                println!("  {c}  inconsistent: {inc:?}");
                // An inconsistent pairing still contains executable
                // fragments: its maximal consistent sub-pairings.
                for sub in maximal_consistent_subpairings(&p, c).unwrap() {
                    println!("    maximal consistent sub-pairing: {sub}");
                }
            }
        }
    }
}
