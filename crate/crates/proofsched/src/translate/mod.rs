//! Translation of process terms into formulas and canonical proofs, in
//! two variants differing only in where the action modalities sit.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::formula::{negate, Formula};
use crate::net::{
    dr_check_fast, modality_info, proof_order, LinkKind, NetError, ProofStructure, WireId,
};
use crate::process::{action_order, Location, Polarity, ProcessTerm};

/// Which translation is in play: synchronous nests modalities like
/// prefixes; asynchronous floats them next to axioms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variant {
    Sync,
    Async,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Variant::Sync => write!(f, "sync"),
            Variant::Async => write!(f, "async"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("proof structure is not compatible with the term: {0}")]
    Incompatible(String),
    #[error("cap exceeded: more than {cap} {what}")]
    CapExceeded { what: String, cap: usize },
    #[error(transparent)]
    Net(#[from] NetError),
}

/// Default cap on generalized atoms for cut-free proof enumeration.
/// Terms with up to five prefixes stay under it in both variants.
pub const DEFAULT_ATOM_CAP: usize = 24;

/// A term with its type, canonical proof, and the fresh variables the
/// translation introduced (in naming order).
#[derive(Debug, Clone)]
pub struct TypedProcess {
    pub term: ProcessTerm,
    pub variant: Variant,
    pub formula: Formula,
    pub proof: ProofStructure,
    pub fresh_vars: Vec<String>,
}

fn fresh(counter: &mut usize, names: &mut Vec<String>) -> String {
    let name = format!("v{}", *counter);
    *counter += 1;
    names.push(name.clone());
    name
}

fn ttype_rec(
    term: &ProcessTerm,
    variant: Variant,
    counter: &mut usize,
    names: &mut Vec<String>,
) -> Formula {
    match term {
        ProcessTerm::Unit => {
            let a = fresh(counter, names);
            Formula::par(Formula::dual_var(&a), Formula::var(&a))
        }
        ProcessTerm::Par(p, q) => {
            let fp = ttype_rec(p, variant, counter, names);
            let fq = ttype_rec(q, variant, counter, names);
            Formula::tensor(fp, fq)
        }
        ProcessTerm::Prefix {
            name,
            polarity,
            body,
            ..
        } => {
            let fb = ttype_rec(body, variant, counter, names);
            let a = fresh(counter, names);
            match (variant, polarity) {
                (Variant::Sync, Polarity::Pos) => Formula::mod_pos(
                    name.clone(),
                    Formula::par(
                        Formula::dual_var(&a),
                        Formula::tensor(fb, Formula::var(&a)),
                    ),
                ),
                (Variant::Sync, Polarity::Neg) => Formula::par(
                    Formula::mod_neg(
                        name.clone(),
                        Formula::tensor(fb, Formula::dual_var(&a)),
                    ),
                    Formula::var(&a),
                ),
                (Variant::Async, Polarity::Pos) => Formula::par(
                    Formula::mod_pos(name.clone(), Formula::dual_var(&a)),
                    Formula::tensor(fb, Formula::var(&a)),
                ),
                (Variant::Async, Polarity::Neg) => Formula::par(
                    Formula::tensor(fb, Formula::dual_var(&a)),
                    Formula::mod_neg(name.clone(), Formula::var(&a)),
                ),
            }
        }
    }
}

/// The type assignment for the chosen variant.
pub fn ttype(term: &ProcessTerm, variant: Variant) -> Formula {
    ttype_rec(term, variant, &mut 0, &mut Vec::new())
}

/// The type assignment with fresh-variable numbering starting at
/// `start`, for typing a subterm consistently with its context.
pub fn ttype_at(term: &ProcessTerm, variant: Variant, start: usize) -> Formula {
    let mut counter = start;
    ttype_rec(term, variant, &mut counter, &mut Vec::new())
}

/// The number of fresh variables `ttype` introduces for a term: one per
/// unit and one per prefix.
pub fn ttype_var_count(term: &ProcessTerm) -> usize {
    term.unit_count() + term.prefix_count()
}

/// The fresh variables of `ttype(term, variant)` in naming order.
pub fn ttype_vars(term: &ProcessTerm, variant: Variant) -> Vec<String> {
    let mut names = Vec::new();
    ttype_rec(term, variant, &mut 0, &mut names);
    names
}

pub fn ttype_sync(term: &ProcessTerm) -> Formula {
    ttype(term, Variant::Sync)
}

pub fn ttype_async(term: &ProcessTerm) -> Formula {
    ttype(term, Variant::Async)
}

fn build_proof(
    term: &ProcessTerm,
    variant: Variant,
    ps: &mut ProofStructure,
    counter: &mut usize,
    names: &mut Vec<String>,
) -> WireId {
    match term {
        ProcessTerm::Unit => {
            let a = fresh(counter, names);
            let (wp, wn) = ps.add_axiom(Formula::var(&a));
            ps.add_par(wn, wp)
        }
        ProcessTerm::Par(p, q) => {
            let w1 = build_proof(p, variant, ps, counter, names);
            let w2 = build_proof(q, variant, ps, counter, names);
            ps.add_tensor(w1, w2)
        }
        ProcessTerm::Prefix {
            name,
            polarity,
            location,
            body,
        } => {
            let wb = build_proof(body, variant, ps, counter, names);
            let a = fresh(counter, names);
            let (wp, wn) = ps.add_axiom(Formula::var(&a));
            match (variant, polarity) {
                (Variant::Sync, Polarity::Pos) => {
                    let t = ps.add_tensor(wb, wp);
                    let pr = ps.add_par(wn, t);
                    ps.add_mod_pos(name.clone(), *location, pr)
                }
                (Variant::Sync, Polarity::Neg) => {
                    let t = ps.add_tensor(wb, wn);
                    let m = ps.add_mod_neg(name.clone(), *location, t);
                    ps.add_par(m, wp)
                }
                (Variant::Async, Polarity::Pos) => {
                    let m = ps.add_mod_pos(name.clone(), *location, wn);
                    let t = ps.add_tensor(wb, wp);
                    ps.add_par(m, t)
                }
                (Variant::Async, Polarity::Neg) => {
                    let t = ps.add_tensor(wb, wn);
                    let m = ps.add_mod_neg(name.clone(), *location, wp);
                    ps.add_par(t, m)
                }
            }
        }
    }
}

/// The canonical cut-free proof of `ttype(term, variant)`, with modality
/// links labelled by the term's locations.
pub fn proof_assign(term: &ProcessTerm, variant: Variant) -> TypedProcess {
    let mut ps = ProofStructure::new();
    let mut counter = 0;
    let mut names = Vec::new();
    let w = build_proof(term, variant, &mut ps, &mut counter, &mut names);
    ps.set_conclusions(vec![w]);
    let formula = ps.wire_formula(w).cloned().unwrap();
    TypedProcess {
        term: term.clone(),
        variant,
        formula,
        proof: ps,
        fresh_vars: names,
    }
}

/// Compatibility of a proof structure with a term: the structure's
/// locations are among the term's, with matching subjects and
/// polarities, and the term's action order (restricted to those
/// locations) is contained in the proof order.
pub fn compatible(term: &ProcessTerm, ps: &ProofStructure) -> bool {
    let info = modality_info(ps);
    for (loc, (channel, positive)) in &info {
        match term.find_prefix(*loc) {
            Some((name, pol, _)) => {
                if name != channel || (pol == Polarity::Pos) != *positive {
                    return false;
                }
            }
            None => return false,
        }
    }
    let order = action_order(term);
    let pi_order = proof_order(ps);
    for (l, m) in order.strict_pairs() {
        if info.contains_key(&l) && info.contains_key(&m) && !pi_order.contains(&(l, m)) {
            return false;
        }
    }
    true
}

/// The term induced by a compatible proof structure: `term` restricted
/// to the structure's locations (prefixes at dropped locations are
/// spliced out, preserving relative nesting).
pub fn extract_term(term: &ProcessTerm, ps: &ProofStructure) -> Result<ProcessTerm, TranslateError> {
    if !compatible(term, ps) {
        return Err(TranslateError::Incompatible(
            "locations, subjects, polarities or order disagree".into(),
        ));
    }
    let keep = ps.locations();
    Ok(restrict(term, &keep))
}

fn restrict(term: &ProcessTerm, keep: &BTreeSet<Location>) -> ProcessTerm {
    match term {
        ProcessTerm::Unit => ProcessTerm::Unit,
        ProcessTerm::Par(p, q) => ProcessTerm::par(restrict(p, keep), restrict(q, keep)),
        ProcessTerm::Prefix {
            name,
            polarity,
            location,
            body,
        } => {
            let inner = restrict(body, keep);
            if keep.contains(location) {
                ProcessTerm::prefix(name.clone(), *polarity, *location, inner)
            } else {
                inner
            }
        }
    }
}

// ----- exhaustive cut-free proof enumeration -----

/// Decomposition leaves: the formulas on which axioms may be placed.
fn collect_atoms(a: &Formula, allow_modalities: bool, out: &mut Vec<Formula>) {
    match a {
        Formula::Tensor(l, r) | Formula::Par(l, r) => {
            collect_atoms(l, allow_modalities, out);
            collect_atoms(r, allow_modalities, out);
        }
        Formula::ModPos(_, b) | Formula::ModNeg(_, b) if allow_modalities => {
            collect_atoms(b, allow_modalities, out);
        }
        other => out.push(other.clone()),
    }
}

/// Rebuilds the connective skeleton over the axiom wires, consuming
/// them in decomposition order; returns the conclusion wire.
fn build_skeleton(
    ps: &mut ProofStructure,
    a: &Formula,
    allow_modalities: bool,
    wires: &mut std::vec::IntoIter<WireId>,
    next_loc: &mut u64,
) -> WireId {
    match a {
        Formula::Tensor(l, r) => {
            let wl = build_skeleton(ps, l, allow_modalities, wires, next_loc);
            let wr = build_skeleton(ps, r, allow_modalities, wires, next_loc);
            ps.add_tensor(wl, wr)
        }
        Formula::Par(l, r) => {
            let wl = build_skeleton(ps, l, allow_modalities, wires, next_loc);
            let wr = build_skeleton(ps, r, allow_modalities, wires, next_loc);
            ps.add_par(wl, wr)
        }
        Formula::ModPos(c, b) if allow_modalities => {
            let wb = build_skeleton(ps, b, allow_modalities, wires, next_loc);
            let loc = Location(*next_loc);
            *next_loc += 1;
            ps.add_mod_pos(c.clone(), loc, wb)
        }
        Formula::ModNeg(c, b) if allow_modalities => {
            let wb = build_skeleton(ps, b, allow_modalities, wires, next_loc);
            let loc = Location(*next_loc);
            *next_loc += 1;
            ps.add_mod_neg(c.clone(), loc, wb)
        }
        _ => wires.next().expect("one wire per atom"),
    }
}

/// All cut-free structures concluding `a`, introducing every connective
/// and placing axioms on generalized atoms; filtered for correctness.
/// The uniqueness oracle for the canonical proof assignment.
pub fn enumerate_cutfree_proofs(
    a: &Formula,
    allow_modalities: bool,
    cap: usize,
) -> Result<Vec<ProofStructure>, TranslateError> {
    let mut atoms = Vec::new();
    collect_atoms(a, allow_modalities, &mut atoms);
    if atoms.len() > cap {
        return Err(TranslateError::CapExceeded {
            what: "generalized atoms".into(),
            cap,
        });
    }
    let n = atoms.len();
    let mut results = Vec::new();
    let mut seen = BTreeSet::new();
    let mut partner = vec![usize::MAX; n];
    enumerate_matchings(&atoms, &mut partner, a, allow_modalities, &mut |partner| {
        let ps = realize(a, &atoms, partner, allow_modalities);
        if ps.validate().is_ok() && dr_check_fast(&ps).unwrap_or(false) {
            let key = ps.canonical_key();
            if seen.insert(key) {
                results.push(ps);
            }
        }
    });
    Ok(results)
}

fn enumerate_matchings(
    atoms: &[Formula],
    partner: &mut Vec<usize>,
    _a: &Formula,
    _allow_modalities: bool,
    emit: &mut impl FnMut(&[usize]),
) {
    let i = match partner.iter().position(|p| *p == usize::MAX) {
        None => {
            emit(partner);
            return;
        }
        Some(i) => i,
    };
    let dual = negate(&atoms[i]);
    for j in (i + 1)..atoms.len() {
        if partner[j] == usize::MAX && atoms[j] == dual {
            partner[i] = j;
            partner[j] = i;
            enumerate_matchings(atoms, partner, _a, _allow_modalities, emit);
            partner[i] = usize::MAX;
            partner[j] = usize::MAX;
        }
    }
    // an unmatched atom can never be completed: stop this branch
}

fn realize(
    a: &Formula,
    atoms: &[Formula],
    partner: &[usize],
    allow_modalities: bool,
) -> ProofStructure {
    let mut ps = ProofStructure::new();
    let mut atom_wires: Vec<Option<WireId>> = vec![None; atoms.len()];
    for i in 0..atoms.len() {
        let j = partner[i];
        if i < j {
            let (w1, w2) = ps.add_axiom(atoms[i].clone());
            atom_wires[i] = Some(w1);
            atom_wires[j] = Some(w2);
        }
    }
    let wires: Vec<WireId> = atom_wires.into_iter().map(|w| w.unwrap()).collect();
    let mut it = wires.into_iter();
    let mut next_loc = 0;
    let w = build_skeleton(&mut ps, a, allow_modalities, &mut it, &mut next_loc);
    ps.set_conclusions(vec![w]);
    ps
}

/// Sanity checks tying a canonical proof to its term: modality links in
/// bijection with prefixes (locations, subjects, polarities), and for
/// the synchronous variant the action order embedded in the proof
/// order.
pub fn check_bijection(tp: &TypedProcess) -> bool {
    let term_locs = tp.term.location_set();
    if tp.proof.locations() != term_locs {
        return false;
    }
    let info = modality_info(&tp.proof);
    for (loc, (channel, positive)) in &info {
        let Some((name, pol, _)) = tp.term.find_prefix(*loc) else {
            return false;
        };
        if name != channel || (pol == Polarity::Pos) != *positive {
            return false;
        }
    }
    if tp.variant == Variant::Sync {
        let term_order: BTreeSet<(Location, Location)> =
            action_order(&tp.term).strict_pairs().into_iter().collect();
        if term_order != proof_order(&tp.proof) {
            return false;
        }
    }
    true
}

/// Counts modality links, as a convenience for tests.
pub fn modality_count(ps: &ProofStructure) -> usize {
    ps.links()
        .filter(|l| matches!(l.kind, LinkKind::ModPos { .. } | LinkKind::ModNeg { .. }))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::net::{dr_check, normalize};
    use crate::process::{congruent, parse_term};

    const P_EX: &str = "a^1.c^2 | b^3.~a^4 | ~b^5.~c^6 | a^7.~b^8 | b^9 | ~a^0";

    fn fm(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn pt(s: &str) -> ProcessTerm {
        parse_term(s).unwrap()
    }

    #[test]
    fn ttype_sync_examples() {
        assert_eq!(ttype_sync(&pt("1")), fm("v0^ @ v0"));
        assert_eq!(
            ttype_sync(&pt("a^1")),
            fm("<a>+ (v1^ @ ((v0^ @ v0) * v1))")
        );
        assert_eq!(
            ttype_sync(&pt("~a^1")),
            fm("(<a>- ((v0^ @ v0) * v1^)) @ v1")
        );
    }

    #[test]
    fn ttype_async_examples() {
        assert_eq!(ttype_async(&pt("1")), fm("v0^ @ v0"));
        assert_eq!(ttype_async(&pt("a^1")), fm("<a>+ v1^ @ ((v0^ @ v0) * v1)"));
        assert_eq!(
            ttype_async(&pt("~a^1")),
            fm("((v0^ @ v0) * v1^) @ <a>- v1")
        );
    }

    #[test]
    fn par_clause_follows_bracketing() {
        let p = pt("a^1 | (b^2 | c^3)");
        let f = ttype_sync(&p);
        assert!(matches!(f, Formula::Tensor(_, ref r) if matches!(**r, Formula::Tensor(..))));
    }

    #[test]
    fn fresh_vars_occur_twice_once_per_polarity() {
        for variant in [Variant::Sync, Variant::Async] {
            for src in ["1", P_EX, "a^1.(b^2 | 1) | ~a^3"] {
                let p = pt(src);
                let f = ttype(&p, variant);
                let names = ttype_vars(&p, variant);
                let occ = f.var_occurrences();
                assert_eq!(occ.len(), names.len());
                for (name, (pos, neg)) in occ {
                    assert_eq!((pos, neg), (1, 1), "variable {name} in {f}");
                }
            }
        }
    }

    #[test]
    fn proof_assign_unit() {
        let tp = proof_assign(&pt("1"), Variant::Sync);
        assert_eq!(tp.proof.link_count(), 2);
        assert_eq!(tp.formula, fm("v0^ @ v0"));
        assert_eq!(dr_check(&tp.proof).unwrap(), Ok(()));
        assert_eq!(tp.proof.conclusion_formulas(), vec![tp.formula.clone()]);
    }

    #[test]
    fn proof_assign_types_and_checks() {
        for variant in [Variant::Sync, Variant::Async] {
            for src in ["1", "a^1", "~a^1", "a^1.b^2", P_EX] {
                let p = pt(src);
                let tp = proof_assign(&p, variant);
                assert_eq!(tp.formula, ttype(&p, variant), "{src} {variant}");
                assert_eq!(
                    tp.proof.conclusion_formulas(),
                    vec![tp.formula.clone()]
                );
                assert!(tp.proof.validate().is_ok());
                assert!(dr_check_fast(&tp.proof).unwrap());
                assert!(check_bijection(&tp), "{src} {variant}");
            }
        }
    }

    #[test]
    fn proof_assign_nested_order() {
        let tp = proof_assign(&pt("a^1.b^2"), Variant::Sync);
        assert_eq!(
            proof_order(&tp.proof),
            [(Location(1), Location(2))].into_iter().collect()
        );
    }

    #[test]
    fn proof_assign_example_async() {
        let p = pt(P_EX);
        let tp = proof_assign(&p, Variant::Async);
        assert_eq!(modality_count(&tp.proof), 10);
        assert_eq!(tp.proof.locations(), p.location_set());
        assert_eq!(dr_check(&tp.proof).unwrap(), Ok(()));
    }

    #[test]
    fn enumerate_uniqueness() {
        let f = ttype_sync(&pt("a^1 | ~a^2"));
        let proofs = enumerate_cutfree_proofs(&f, true, DEFAULT_ATOM_CAP).unwrap();
        assert_eq!(proofs.len(), 1);
        let tp = proof_assign(&pt("a^1 | ~a^2"), Variant::Sync);
        assert_eq!(proofs[0].canonical_key(), tp.proof.canonical_key());
    }

    #[test]
    fn enumerate_trivial_cases() {
        assert_eq!(
            enumerate_cutfree_proofs(&fm("v0^ @ v0"), true, 8).unwrap().len(),
            1
        );
        assert_eq!(
            enumerate_cutfree_proofs(&fm("v0 * v0^"), true, 8).unwrap().len(),
            0
        );
        assert!(matches!(
            enumerate_cutfree_proofs(&ttype_sync(&pt(P_EX)), true, 4),
            Err(TranslateError::CapExceeded { .. })
        ));
    }

    #[test]
    fn enumerate_without_modalities_stops_at_them() {
        // <a>+ x -o <a>+ x has a one-axiom proof on the modal subformula
        let f = fm("<a>- x^ @ <a>+ x");
        let proofs = enumerate_cutfree_proofs(&f, false, 8).unwrap();
        assert_eq!(proofs.len(), 1);
        assert!(proofs[0].is_modality_free());
    }

    #[test]
    fn compatibility() {
        let p = pt("a^1.b^2");
        let tp = proof_assign(&p, Variant::Sync);
        assert!(compatible(&p, &tp.proof));
        assert!(congruent(&extract_term(&p, &tp.proof).unwrap(), &p));
        // the proof may be more ordered than the term
        assert!(compatible(&pt("a^1 | b^2"), &tp.proof));
        // but not less ordered
        let reversed = proof_assign(&pt("b^2.a^1"), Variant::Sync);
        assert!(!compatible(&p, &reversed.proof));
        // mismatched subject
        assert!(!compatible(&pt("c^1.b^2"), &tp.proof));
        assert!(extract_term(&pt("c^1.b^2"), &tp.proof).is_err());
    }

    #[test]
    fn structure_term_reads_modality_nesting() {
        use crate::net::structure_term;
        // synchronous proofs nest modalities like prefixes
        let p = pt("a^1.(b^2 | ~b^3)");
        let sync = proof_assign(&p, Variant::Sync);
        assert!(congruent(&structure_term(&sync.proof), &p));
        // asynchronous proofs float them, so the term reads back flat
        let async_ = proof_assign(&p, Variant::Async);
        assert!(congruent(
            &structure_term(&async_.proof),
            &pt("a^1 | b^2 | ~b^3")
        ));
        let unit = proof_assign(&pt("1"), Variant::Sync);
        assert!(congruent(&structure_term(&unit.proof), &pt("1")));
    }

    #[test]
    fn extract_term_examples() {
        let p = pt(P_EX);
        let residual = pt("c^2 | b^3.~a^4 | ~b^5.~c^6 | a^7.~b^8 | b^9");
        let pi = proof_assign(&residual, Variant::Sync).proof;
        assert!(compatible(&p, &pi));
        assert!(congruent(&extract_term(&p, &pi).unwrap(), &residual));
        // a modality-free structure extracts the inactive unit
        let unit_pi = proof_assign(&pt("1"), Variant::Sync).proof;
        assert!(congruent(
            &extract_term(&p, &unit_pi).unwrap(),
            &ProcessTerm::Unit
        ));
    }

    #[test]
    fn normalization_of_canonical_proofs_is_identity() {
        let tp = proof_assign(&pt("a^1.b^2 | ~a^3"), Variant::Async);
        let (nf, emitted) = normalize(&tp.proof).unwrap();
        assert!(emitted.is_empty());
        assert_eq!(nf.canonical_key(), tp.proof.canonical_key());
    }
}
