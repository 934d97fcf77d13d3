//! Build proof structures link by link, check them for correctness
//! with the Danos-Regnier criterion, eliminate cuts, and export the
//! graph as DOT.

use proofsched::formula::parse_formula;
use proofsched::net::{dot_export, dr_check, normalize, ProofStructure};

fn main() {
    // A correct net: an axiom closed off by a par, cut against a
    // tensor of two axioms — the standard tensor/par interaction.
    let a = parse_formula("v0").unwrap();
    let mut ps = ProofStructure::new();
    let (p1, p2) = ps.add_axiom(a.clone());
    let par = ps.add_par(p1, p2);
    let (t1, c1) = ps.add_axiom(a.clone());
    let (c2, t2) = ps.add_axiom(a.clone());
    let tensor = ps.add_tensor(t2, t1);
    ps.add_cut(par, tensor);
    ps.set_conclusions(vec![c2, c1]);

    println!("built a net with {} links", ps.link_count());
    println!("correct: {}", dr_check(&ps).unwrap().is_ok());

    // Cut elimination rewrites the graph locally until no cut remains;
    // modality pairs cancelled along the way are reported in order
    // (none here, the net is modality-free).
    let (nf, emitted) = normalize(&ps).unwrap();
    println!(
        "normal form: {} links, emitted modality pairs: {:?}",
        nf.link_count(),
        emitted
    );

    // Closing both ends of one axiom with a tensor instead of a par is
    // incorrect: the axiom and the tensor form a cycle under every
    // switching.
    let mut bad = ProofStructure::new();
    let (q1, q2) = bad.add_axiom(a);
    let t = bad.add_tensor(q1, q2);
    bad.set_conclusions(vec![t]);
    match dr_check(&bad).unwrap() {
        Ok(()) => unreachable!(),
        Err(f) => println!("tensor-for-par swap rejected: {f:?}"),
    }

    // DOT export for visual inspection.
    println!("\n{}", dot_export(&nf, "normal-form"));
}
