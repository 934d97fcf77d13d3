//! Translate processes into formulas of multiplicative linear logic
//! with action modalities, and build the canonical cut-free proof of
//! each type — which is unique, as the enumeration confirms.

use proofsched::process::parse_term;
use proofsched::translate::{
    check_bijection, enumerate_cutfree_proofs, proof_assign, ttype, Variant, DEFAULT_ATOM_CAP,
};

fn main() {
    let p = parse_term("a^1.b^2 | ~a^3").unwrap();
    println!("term: {p}\n");

    // The synchronous translation nests a prefix's modality around the
    // body; the asynchronous one floats it next to an axiom-reachable
    // variable, so scheduling may anticipate guarded steps.
    for variant in [Variant::Sync, Variant::Async] {
        let f = ttype(&p, variant);
        println!("{variant:?} type: {f}");

        // The canonical proof: one axiom per fresh variable, one
        // modality link per prefix, mirrored by a location bijection.
        let tp = proof_assign(&p, variant);
        println!(
            "  canonical proof: {} links, prefix/modality bijection: {}",
            tp.proof.link_count(),
            check_bijection(&tp)
        );

        // There is exactly one cut-free proof of a process type.
        let all = enumerate_cutfree_proofs(&f, true, DEFAULT_ATOM_CAP).unwrap();
        println!("  cut-free proofs of the type: {}", all.len());
        assert_eq!(all[0].canonical_key(), tp.proof.canonical_key());
    }
}
