//! Schedule synthesis: proof search for a modality-free proof of
//! `|P|sigma -o |Q|`. The source type's fresh variables are opened as
//! metavariables and the instantiation is discovered by unification
//! during a two-sided sequent search: pars are decomposed eagerly
//! (they are invertible), tensors branch over context splits, and
//! axioms may join any two unifiably dual formulas, compound ones
//! included. A found derivation is rebuilt as a proof structure, which
//! is correct by construction.

use std::collections::BTreeMap;

use crate::formula::{negate, substitute, unify_dual, Formula, Substitution};
use crate::net::{dr_check_fast, ProofStructure, WireId};
use crate::process::ProcessTerm;
use crate::translate::{ttype, ttype_vars, Variant};

use super::{SchedError, Schedule};

/// Default cap on generalized atoms per side for synthesis.
pub const DEFAULT_SYNTH_ATOM_CAP: usize = 12;

/// Default cap on explored search nodes.
pub const DEFAULT_SYNTH_NODE_CAP: usize = 5_000_000;

/// Leaves of the multiplicative decomposition: variables,
/// metavariables and modality-rooted subformulas.
fn atom_count(f: &Formula) -> usize {
    match f {
        Formula::Tensor(l, r) | Formula::Par(l, r) => atom_count(l) + atom_count(r),
        _ => 1,
    }
}

/// Signed count of modality occurrences per channel: `<c>+` adds one,
/// `<c>-` subtracts one, recursing through every connective.
fn modality_balance(f: &Formula, out: &mut BTreeMap<String, i64>) {
    match f {
        Formula::Tensor(l, r) | Formula::Par(l, r) => {
            modality_balance(l, out);
            modality_balance(r, out);
        }
        Formula::ModPos(c, b) => {
            *out.entry(c.clone()).or_default() += 1;
            modality_balance(b, out);
        }
        Formula::ModNeg(c, b) => {
            *out.entry(c.clone()).or_default() -= 1;
            modality_balance(b, out);
        }
        _ => {}
    }
}

/// Every sequent of a cut-free proof pairs its leaves as exact duals,
/// so after instantiation each channel's `<c>+`/`<c>-` counts and each
/// variable's `v`/`v^` counts balance. A metavariable image lands once
/// per occurrence, so its net contribution is (occurrences of `S`
/// minus occurrences of `S^`) times the image's own counts: when every
/// metavariable's occurrences cancel within the sequent, images cannot
/// repair a ground imbalance and the sequent is unprovable.
///
/// Returns (not refuted by balance, metavariable-free).
fn sequent_profile<'a>(gamma: impl Iterator<Item = &'a Formula>) -> (bool, bool) {
    fn walk<'f>(
        f: &'f Formula,
        bal: &mut BTreeMap<(bool, &'f str), i64>,
        meta: &mut BTreeMap<&'f str, i64>,
    ) {
        match f {
            Formula::MetaVar(x) => *meta.entry(x.as_str()).or_default() += 1,
            Formula::DualMetaVar(x) => *meta.entry(x.as_str()).or_default() -= 1,
            Formula::Var(x) => *bal.entry((false, x.as_str())).or_default() += 1,
            Formula::DualVar(x) => *bal.entry((false, x.as_str())).or_default() -= 1,
            Formula::Tensor(l, r) | Formula::Par(l, r) => {
                walk(l, bal, meta);
                walk(r, bal, meta);
            }
            Formula::ModPos(c, b) => {
                *bal.entry((true, c.as_str())).or_default() += 1;
                walk(b, bal, meta);
            }
            Formula::ModNeg(c, b) => {
                *bal.entry((true, c.as_str())).or_default() -= 1;
                walk(b, bal, meta);
            }
        }
    }
    let mut bal: BTreeMap<(bool, &str), i64> = BTreeMap::new();
    let mut meta: BTreeMap<&str, i64> = BTreeMap::new();
    let formulas: Vec<&Formula> = gamma.collect();
    for f in &formulas {
        walk(f, &mut bal, &mut meta);
    }
    let balanced = bal.values().all(|&n| n == 0) || meta.values().any(|&n| n != 0);
    (balanced, meta.is_empty())
}

/// One rule application, with enough positional detail to replay the
/// derivation when building the net. A full derivation is a preorder
/// trail of rules: a tensor's left premiss is recorded in full before
/// its right premiss.
#[derive(Clone, Copy)]
enum Rule {
    /// `|Gamma| = 2`, the two formulas unified as duals.
    Axiom,
    /// `Gamma[i] = A @ B` replaced by `A, B` at position `i`.
    Par(usize),
    /// `Gamma[i] = A * B`; context formulas go left where the mask has
    /// a bit, in order; premisses `A, left` and `B, right`.
    Tensor(usize, u32),
}

/// Splits `Gamma` for a tensor rule on position `i`: the remaining
/// formulas keep their order and go left when their bit in `mask` is
/// set. Returns (left, right) including the tensor's own subformulas
/// at the front.
fn split_context<T: Clone>(gamma: &[T], i: usize, mask: u32, a: T, b: T) -> (Vec<T>, Vec<T>) {
    let mut left = vec![a];
    let mut right = vec![b];
    let mut bit = 0;
    for (j, f) in gamma.iter().enumerate() {
        if j == i {
            continue;
        }
        if mask & (1 << bit) != 0 {
            left.push(f.clone());
        } else {
            right.push(f.clone());
        }
        bit += 1;
    }
    (left, right)
}

struct Search {
    budget: usize,
    capped: bool,
    trail: Vec<Rule>,
    /// Sequents known to admit no derivation at all: a failure that
    /// never reached the continuation is independent of the
    /// substitution (already applied) and of the continuation.
    failed: std::collections::BTreeSet<String>,
}

/// Invoked at each axiom closing the final open branch; receives the
/// substitution accumulated so far and returns `true` to accept the
/// derivation or `false` to resume the search.
type Cont<'a> = &'a mut dyn FnMut(&mut Search, &Substitution) -> bool;

impl Search {
    /// Proves `Gamma` and then runs `k`; backtracks into alternative
    /// derivations of `Gamma` (which bind different substitutions) as
    /// long as `k` rejects. On success the applied rules remain on the
    /// trail in preorder.
    ///
    /// Each formula carries a frozen flag. A par is either decomposed
    /// at first sight or frozen, committing it to end whole in a
    /// compound axiom: decomposition is not invertible here, because a
    /// par may have to unify entire against a metavariable. Freezing
    /// leaves no rule on the trail, so trails record plain derivations.
    fn prove(&mut self, gamma: &[(Formula, bool)], sigma: &Substitution, sub: bool, k: Cont) -> bool {
        if self.budget == 0 {
            self.capped = true;
            return false;
        }
        self.budget -= 1;
        // `sub` is false when the caller's formulas already reflect
        // `sigma`, making re-substitution a no-op
        let gam: Vec<(Formula, bool)> = if sub {
            gamma
                .iter()
                .map(|(f, z)| (substitute(f, sigma), *z))
                .collect()
        } else {
            gamma.to_vec()
        };
        let (balanced, ground) = sequent_profile(gam.iter().map(|(f, _)| f));
        // every axiom pairs exact duals, so modality and variable
        // occurrences must balance once images land; reject sequents
        // whose imbalance no image can repair
        if !balanced {
            return false;
        }
        // the derivations of a sequent depend only on the sequent
        // itself (sigma is already applied; remaining metavariables
        // are unbound), so a failure that never completed a branch
        // can be memoized even for non-ground sequents
        let key = {
            let parts: Vec<String> = gam
                .iter()
                .map(|(f, z)| format!("{}{f}", *z as u8))
                .collect();
            parts.join(";")
        };
        if self.failed.contains(&key) {
            return false;
        }
        // the continuation fires exactly when a complete derivation of
        // this sequent has been found, so "never fired" means the
        // sequent is unprovable outright, not merely rejected
        let mut complete = false;
        let out = self.prove_body(gam, sigma, ground, &mut |se, s| {
            complete = true;
            k(se, s)
        });
        if !out && !self.capped && !complete {
            self.failed.insert(key);
        }
        out
    }

    fn prove_body(&mut self, gam: Vec<(Formula, bool)>, sigma: &Substitution, ground: bool, k: Cont) -> bool {
        // a singleton par sequent may still be provable, so the size
        // check comes after par handling
        if let Some(i) = gam
            .iter()
            .position(|(f, z)| !z && matches!(f, Formula::Par(..)))
        {
            let Formula::Par(a, b) = &gam[i].0 else { unreachable!() };
            let mut g2 = gam.clone();
            g2[i] = ((**a).clone(), false);
            g2.insert(i + 1, ((**b).clone(), false));
            self.trail.push(Rule::Par(i));
            if self.prove(&g2, sigma, false, k) {
                return true;
            }
            self.trail.pop();
            if self.capped || ground {
                // in a ground sequent a compound axiom on this par
                // has an equivalent eta-expanded derivation that
                // decomposes it, so freezing explores nothing new
                return false;
            }
            let mut g3 = gam;
            g3[i].1 = true;
            return self.prove(&g3, sigma, false, k);
        }
        if gam.len() < 2 {
            return false;
        }
        if gam.len() == 2 {
            if let Ok(s) = unify_dual(&gam[0].0, &gam[1].0, sigma) {
                self.trail.push(Rule::Axiom);
                if k(self, &s) {
                    return true;
                }
                self.trail.pop();
                if self.capped {
                    return false;
                }
            }
        }
        for i in 0..gam.len() {
            let Formula::Tensor(a, b) = &gam[i].0 else {
                continue;
            };
            let rest = gam.len() - 1;
            // identical context formulas make masks that differ only
            // by permuting them equivalent: dedup by the multiset of
            // formulas sent left
            let mut seen: std::collections::BTreeSet<Vec<String>> =
                std::collections::BTreeSet::new();
            for mask in 0..(1u32 << rest) {
                let mut sig: Vec<String> = (0..rest)
                    .filter(|j| mask & (1 << j) != 0)
                    .map(|j| {
                        let idx = if j < i { j } else { j + 1 };
                        format!("{}{}", gam[idx].1 as u8, gam[idx].0)
                    })
                    .collect();
                sig.sort();
                if !seen.insert(sig) {
                    continue;
                }
                let (left, right) = split_context(
                    &gam,
                    i,
                    mask,
                    ((**a).clone(), false),
                    ((**b).clone(), false),
                );
                self.trail.push(Rule::Tensor(i, mask));
                // the right premiss is proved in the left premiss's
                // continuation, so rejection resumes the left search
                // with its next substitution
                let done = self.prove(&left, sigma, false, &mut |se, s1| {
                    se.prove(&right, s1, true, k)
                });
                if done {
                    return true;
                }
                self.trail.pop();
                if self.capped {
                    return false;
                }
            }
        }
        false
    }
}

/// Replays a preorder rule trail over the ground-instantiated sequent,
/// building links bottom-up; returns one wire per sequent formula, in
/// order.
fn build(
    ps: &mut ProofStructure,
    rules: &mut std::slice::Iter<Rule>,
    gamma: &[Formula],
) -> Vec<WireId> {
    match rules.next().expect("trail covers the whole derivation") {
        Rule::Axiom => {
            let (w0, w1) = ps.add_axiom(gamma[0].clone());
            debug_assert_eq!(ps.wire_formula(w1), Some(&gamma[1]));
            vec![w0, w1]
        }
        Rule::Par(i) => {
            let Formula::Par(a, b) = &gamma[*i] else {
                unreachable!("recorded par positions stay pars under substitution")
            };
            let mut g2 = gamma.to_vec();
            g2[*i] = (**a).clone();
            g2.insert(i + 1, (**b).clone());
            let mut ws = build(ps, rules, &g2);
            let w = ps.add_par(ws[*i], ws[i + 1]);
            ws.splice(*i..=i + 1, [w]);
            ws
        }
        Rule::Tensor(i, mask) => {
            let Formula::Tensor(a, b) = &gamma[*i] else {
                unreachable!("recorded tensor positions stay tensors under substitution")
            };
            let (gl, gr) = split_context(gamma, *i, *mask, (**a).clone(), (**b).clone());
            let wl = build(ps, rules, &gl);
            let wr = build(ps, rules, &gr);
            let w = ps.add_tensor(wl[0], wr[0]);
            // reassemble the context wires in the original order
            let mut out = Vec::with_capacity(gamma.len());
            let (mut li, mut ri, mut bit) = (1, 1, 0);
            for j in 0..gamma.len() {
                if j == *i {
                    out.push(w);
                    continue;
                }
                if mask & (1 << bit) != 0 {
                    out.push(wl[li]);
                    li += 1;
                } else {
                    out.push(wr[ri]);
                    ri += 1;
                }
                bit += 1;
            }
            out
        }
    }
}

/// Searches for a schedule from `source` to `target`: the first proof
/// of the implication found, or `None` when the search space is
/// exhausted. `atom_cap` bounds the generalized atoms per side.
pub fn synthesize(
    source: &ProcessTerm,
    target: &ProcessTerm,
    variant: Variant,
    atom_cap: usize,
) -> Result<Option<Schedule>, SchedError> {
    synthesize_capped(source, target, variant, atom_cap, DEFAULT_SYNTH_NODE_CAP)
}

pub fn synthesize_capped(
    source: &ProcessTerm,
    target: &ProcessTerm,
    variant: Variant,
    atom_cap: usize,
    node_cap: usize,
) -> Result<Option<Schedule>, SchedError> {
    source.validate()?;
    target.validate()?;
    // congruent endpoints always have a schedule and the direct
    // construction avoids a search that is expensive on terms with
    // many interchangeable components
    if crate::process::congruent(source, target) {
        if let Ok(s) = super::congruence_schedule(source, target, variant) {
            return Ok(Some(s));
        }
    }
    let src_vars = ttype_vars(source, variant);
    // open the source variables as metavariables, with names disjoint
    // from the rigid target variables
    let meta_map: BTreeMap<String, Formula> = src_vars
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), Formula::meta(format!("S{i}"))))
        .collect();
    let opened = substitute(&ttype(source, variant), &Substitution::from_map(meta_map));
    let src_shape = negate(&opened);
    let tgt_shape = ttype(target, variant);
    if atom_count(&src_shape) > atom_cap || atom_count(&tgt_shape) > atom_cap {
        return Err(SchedError::CapExceeded {
            what: "generalized atoms per side".into(),
            cap: atom_cap,
        });
    }

    // Modalities admit no rules here, so in any proof each modality
    // occurrence sits inside exactly one axiom formula, and axioms pair
    // exact duals: `<c>+` and `<c>-` occurrence counts must balance per
    // channel. Instantiation images land once per polarity and stay
    // balanced, so an imbalance in the skeleton refutes provability.
    let mut balance: BTreeMap<String, i64> = BTreeMap::new();
    modality_balance(&src_shape, &mut balance);
    modality_balance(&tgt_shape, &mut balance);
    if balance.values().any(|&n| n != 0) {
        return Ok(None);
    }

    let mut search = Search {
        budget: node_cap,
        capped: false,
        trail: Vec::new(),
        failed: std::collections::BTreeSet::new(),
    };
    let gamma = [(src_shape.clone(), false), (tgt_shape.clone(), false)];
    let mut found = None;
    let ok = search.prove(&gamma, &Substitution::empty(), true, &mut |_, s| {
        found = Some(s.clone());
        true
    });
    let Some(mut sigma) = (if ok { found } else { None }) else {
        if search.capped {
            return Err(SchedError::CapExceeded {
                what: "search nodes".into(),
                cap: node_cap,
            });
        }
        return Ok(None);
    };

    // ground the leftover metavariables on fresh variables
    let mut fresh = 0;
    for name in src_shape.metavars() {
        if substitute(&Formula::meta(&name), &sigma) == Formula::meta(&name) {
            sigma
                .bind(&name, &Formula::var(format!("w{fresh}")))
                .expect("fresh variables pass the occurs check");
            fresh += 1;
        }
    }
    let mut ps = ProofStructure::new();
    let ground = [
        substitute(&src_shape, &sigma),
        substitute(&tgt_shape, &sigma),
    ];
    let mut rules = search.trail.iter();
    let ws = build(&mut ps, &mut rules, &ground);
    debug_assert!(rules.next().is_none(), "trail consumed exactly");
    ps.set_conclusions(ws);
    debug_assert!(ps.validate().is_ok() && dr_check_fast(&ps).unwrap_or(false));

    let inst: BTreeMap<String, Formula> = src_vars
        .iter()
        .enumerate()
        .map(|(i, v)| {
            (
                v.clone(),
                substitute(&Formula::meta(format!("S{i}")), &sigma),
            )
        })
        .collect();
    let schedule = Schedule {
        variant,
        source: source.clone(),
        target: target.clone(),
        proof: ps,
        instantiation: Substitution::from_map(inst),
    };
    debug_assert!(schedule.validate().is_ok(), "synthesized schedules validate");
    Ok(Some(schedule))
}

/// Asynchronous implication between process types: does any schedule
/// take `source` to `target` under the asynchronous translation?
pub fn implies(
    source: &ProcessTerm,
    target: &ProcessTerm,
    atom_cap: usize,
) -> Result<bool, SchedError> {
    Ok(synthesize(source, target, Variant::Async, atom_cap)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::{congruent, parse_term, reachable, Location, Pairing};
    use crate::sched::{induced_pairing, replay};
    use crate::translate::Variant;

    fn pt(s: &str) -> ProcessTerm {
        parse_term(s).unwrap()
    }

    fn synth(p: &str, q: &str, variant: Variant) -> Option<Schedule> {
        synthesize(&pt(p), &pt(q), variant, DEFAULT_SYNTH_ATOM_CAP).unwrap()
    }

    #[test]
    fn identity_implications() {
        for variant in [Variant::Sync, Variant::Async] {
            for src in ["1", "a^1", "a^1.b^2 | ~a^3"] {
                let s = synth(src, src, variant).expect("identity holds");
                s.validate().unwrap();
            }
        }
    }

    #[test]
    fn synthesis_finds_step_results() {
        for variant in [Variant::Sync, Variant::Async] {
            let s = synth("a^1 | ~a^2", "1", variant).expect("a | ~a -> 1");
            s.validate().unwrap();
            let t = replay(&s).unwrap();
            assert_eq!(
                t.pairing(),
                Pairing::from_pairs([(Location(1), Location(2))])
            );
        }
    }

    #[test]
    fn synthesis_respects_execution_sync() {
        // synchronously, only reachable residuals are implied
        let p = pt("a^1.b^2 | ~a^3");
        let targets = reachable(&p);
        assert!(synth("a^1.b^2 | ~a^3", "b^2", Variant::Sync).is_some());
        assert!(targets
            .iter()
            .any(|(_, ct)| congruent(&ct.to_term(), &pt("b^2"))));
        assert!(synth("a^1.b^2 | ~a^3 | ~b^4", "a^1.b^2 | ~a^3 | ~b^4", Variant::Sync).is_some());
        // b is guarded: it cannot be consumed alone
        assert!(synth("a^1.b^2", "1", Variant::Sync).is_none());
    }

    #[test]
    fn asynchronous_implication_is_weaker() {
        // b | ~b steps to 1, so the implication holds under the prefix
        // a: a.(b | ~b) => a. But a.(b | ~b) has no execution at all
        // (the redex is guarded), so the target is unreachable: the
        // asynchronous relation decides the interaction in advance.
        let p = "a^1.(b^2 | ~b^3)";
        let q = "a^1";
        assert!(synth(p, q, Variant::Async).is_some());
        assert!(synth(p, q, Variant::Sync).is_none());
        assert!(reachable(&pt(p))
            .iter()
            .all(|(_, ct)| !congruent(&ct.to_term(), &pt(q))));
        assert!(implies(&pt(p), &pt(q), DEFAULT_SYNTH_ATOM_CAP).unwrap());
    }

    #[test]
    fn interleaved_prefixes_block_the_crossing_axiom() {
        // u.a | v.~a does not imply u | v even asynchronously: with the
        // target's variables held rigid, the a-axiom must cross the two
        // source components while the u- and v-axioms reach into the
        // target, and together with the outer tensor and par links any
        // such net closes a switching cycle (the cycle shape from the
        // cut-elimination ordering argument), so no correct proof
        // exists.
        let p = "u^1.a^2 | v^3.~a^4";
        let q = "u^1 | v^3";
        assert!(synth(p, q, Variant::Async).is_none());
        assert!(synth(p, q, Variant::Sync).is_none());
    }

    #[test]
    fn non_implications() {
        assert!(synth("a^1", "b^1", Variant::Async).is_none());
        assert!(synth("a^1", "1", Variant::Async).is_none());
        assert!(synth("1", "a^1", Variant::Async).is_none());
    }

    #[test]
    fn cap_exceeded_is_distinguished() {
        assert!(matches!(
            synthesize(&pt("a^1 | ~a^2"), &pt("1"), Variant::Sync, 1),
            Err(SchedError::CapExceeded { .. })
        ));
    }

    #[test]
    fn synthesized_pairing_is_consistent() {
        // four asynchronous prefix components hold 16 generalized
        // atoms, above the default cap: raise it explicitly
        let p = pt("a^1 | ~a^2 | b^3 | ~b^4");
        let s = synthesize(&p, &pt("1"), Variant::Async, 16)
            .unwrap()
            .unwrap();
        let c = induced_pairing(&s).unwrap();
        assert_eq!(c.domain().len(), 4);
        assert!(crate::process::is_consistent(&p, &c).unwrap().is_ok());
    }
}

#[cfg(test)]
mod search_tests {
    use super::*;
    use crate::formula::parse_formula;

    fn try_prove(gamma: &[&str]) -> bool {
        let g: Vec<(Formula, bool)> = gamma
            .iter()
            .map(|s| (parse_formula(s).unwrap(), false))
            .collect();
        let mut search = Search {
            budget: 10_000_000,
            capped: false,
            trail: Vec::new(),
            failed: std::collections::BTreeSet::new(),
        };
        let ok = search.prove(&g, &Substitution::empty(), true, &mut |_, _| true);
        assert!(!search.capped, "capped");
        ok
    }

    #[test]
    fn singleton_par_sequents_are_provable() {
        // a lone par formula can still be proved, so branch splits may
        // send an empty context to one premiss
        assert!(try_prove(&["v0^ @ v0"]));
        assert!(try_prove(&["(v0 * v1) @ (v1^ @ v0^)"]));
        assert!(!try_prove(&["v0^ @ v1"]));
        assert!(!try_prove(&["v0"]));
    }

    #[test]
    fn search_backtracks_into_left_premiss_alternatives() {
        // the left premiss here has several derivations binding
        // different substitutions; only a later one lets the right
        // premiss close, so the search must resume it on rejection
        assert!(try_prove(&[
            "(S3 * S3^ @ S4) * <a>+ S4^",
            "(v3^ @ v3) * v4^ @ <a>- v4",
        ]));
    }

    #[test]
    fn search_finds_identity_sequents() {
        assert!(try_prove(&["v0^", "v0"]));
        assert!(try_prove(&["S0 * S0^", "v1^", "(v0^ @ v0) * v1"]));
        assert!(try_prove(&["<b>- S1 * (S0 * S0^ @ S1^)", "<b>+ v1^", "(v0^ @ v0) * v1"]));
        // left conclusion of the async identity for a^1.b^2 | ~a^3
        assert!(try_prove(&[
            "<a>- S2 * (<b>- S1 * (S0 * S0^ @ S1^) @ S2^)",
            "<a>+ v2^ @ (<b>+ v1^ @ (v0^ @ v0) * v1) * v2",
        ]));
        // the full async identity sequent for a^1.b^2 | ~a^3
        assert!(try_prove(&[
            "<a>- S2 * (<b>- S1 * (S0 * S0^ @ S1^) @ S2^) @ (S3 * S3^ @ S4) * <a>+ S4^",
            "(<a>+ v2^ @ (<b>+ v1^ @ (v0^ @ v0) * v1) * v2) * ((v3^ @ v3) * v4^ @ <a>- v4)",
        ]));
    }
}
