//! Schedules: proofs of implications between process types. A schedule
//! for `P -> Q` is a modality-free two-conclusion proof of
//! `(|P|sigma)^, |Q|` together with the instantiation `sigma` of `P`'s
//! fresh type variables. Cutting the canonical proof of `P` against the
//! first conclusion and normalizing replays an execution of `P`.

mod json;
mod replay;
mod synth;

pub use json::{schedule_from_json, schedule_to_json};
pub use replay::{induced_pairing, pairing_to_schedule, replay};
pub use synth::{implies, synthesize, synthesize_capped, DEFAULT_SYNTH_ATOM_CAP, DEFAULT_SYNTH_NODE_CAP};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::formula::{lollipop, negate, substitute, Formula, Substitution};
use crate::net::{dr_check_fast, normalize, NetError, ProofStructure, WireId};
use crate::process::{
    congruent, step, Inconsistency, Location, Polarity, ProcessError, ProcessTerm,
};
use crate::translate::{ttype, ttype_at, ttype_var_count, ttype_vars, TranslateError, Variant};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchedError {
    #[error("terms are not structurally congruent")]
    NotCongruent,
    #[error("congruence rearranges the body under the prefix at {0}: not schedulable")]
    CongruenceUnderPrefix(Location),
    #[error("schedules use different translation variants")]
    VariantMismatch,
    #[error("schedule endpoints do not meet: `{left}` vs `{right}`")]
    NotComposable { left: String, right: String },
    #[error("invalid schedule: {0}")]
    Invalid(String),
    #[error("pairing is not consistent: {0:?}")]
    InconsistentPairing(Inconsistency),
    #[error("schedule does not replay on its source: {0}")]
    NotReplayable(String),
    #[error("cap exceeded: more than {cap} {what}")]
    CapExceeded { what: String, cap: usize },
    #[error("malformed schedule: {0}")]
    Malformed(String),
    #[error(transparent)]
    Process(#[from] ProcessError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Translate(#[from] TranslateError),
}

/// A schedule from `source` to `target`: a modality-free proof whose
/// ordered conclusions are the instantiated dual of the source type and
/// the target type.
#[derive(Debug, Clone)]
pub struct Schedule {
    pub variant: Variant,
    pub source: ProcessTerm,
    pub target: ProcessTerm,
    pub proof: ProofStructure,
    /// Total over the source type's fresh variables; images are ground
    /// formulas over the target type's variables, applied in one
    /// simultaneous pass.
    pub instantiation: Substitution,
}

impl Schedule {
    /// The implication the schedule proves, as a single formula.
    pub fn implication(&self) -> Formula {
        let fs = substitute(&ttype(&self.source, self.variant), &self.instantiation);
        lollipop(&fs, &ttype(&self.target, self.variant))
    }

    /// Checks every schedule invariant: well-formed modality-free
    /// correct proof, conclusions matching the implication, total
    /// ground instantiation.
    pub fn validate(&self) -> Result<(), SchedError> {
        self.source.validate()?;
        self.target.validate()?;
        self.proof.validate()?;
        if !self.proof.is_modality_free() {
            return Err(SchedError::Invalid(
                "schedule proofs may not contain modality links".into(),
            ));
        }
        if !self.proof.cut_ids().is_empty() {
            return Err(SchedError::Invalid("schedule proofs are cut-free".into()));
        }
        for v in ttype_vars(&self.source, self.variant) {
            match self.instantiation.get(&v) {
                None => {
                    return Err(SchedError::Invalid(format!(
                        "instantiation misses source variable {v}"
                    )))
                }
                Some(f) if !f.is_ground() => {
                    return Err(SchedError::Invalid(format!(
                        "instantiation of {v} is not ground"
                    )))
                }
                Some(_) => {}
            }
        }
        let fs = ttype(&self.source, self.variant);
        let want = vec![
            negate(&substitute(&fs, &self.instantiation)),
            ttype(&self.target, self.variant),
        ];
        if self.proof.conclusion_formulas() != want {
            return Err(SchedError::Invalid(
                "conclusions do not spell the instantiated implication".into(),
            ));
        }
        if !dr_check_fast(&self.proof)? {
            return Err(SchedError::Invalid(
                "proof fails the switching criterion".into(),
            ));
        }
        Ok(())
    }
}

/// A top-level parallel component of a term, with the slice of fresh
/// type variables its translation owns.
struct Comp<'a> {
    term: &'a ProcessTerm,
    root: Option<Location>,
    var_start: usize,
}

impl Comp<'_> {
    fn var_count(&self) -> usize {
        ttype_var_count(self.term)
    }
}

fn comps(term: &ProcessTerm) -> Vec<Comp<'_>> {
    fn walk<'a>(term: &'a ProcessTerm, offset: &mut usize, out: &mut Vec<Comp<'a>>) {
        match term {
            ProcessTerm::Par(p, q) => {
                walk(p, offset, out);
                walk(q, offset, out);
            }
            ProcessTerm::Unit => {
                out.push(Comp {
                    term,
                    root: None,
                    var_start: *offset,
                });
                *offset += 1;
            }
            ProcessTerm::Prefix { location, .. } => {
                let start = *offset;
                *offset += ttype_var_count(term);
                out.push(Comp {
                    term,
                    root: Some(*location),
                    var_start: start,
                });
            }
        }
    }
    let mut out = Vec::new();
    walk(term, &mut 0, &mut out);
    out
}

fn var_name(i: usize) -> String {
    format!("v{i}")
}

/// Builds the connective tree mirroring a term's bracketing over
/// per-component wires (in traversal order); pars on the dual side,
/// tensors on the direct side.
fn build_term_tree(
    ps: &mut ProofStructure,
    term: &ProcessTerm,
    wires: &mut std::vec::IntoIter<WireId>,
    dual: bool,
) -> WireId {
    match term {
        ProcessTerm::Par(p, q) => {
            let wl = build_term_tree(ps, p, wires, dual);
            let wr = build_term_tree(ps, q, wires, dual);
            if dual {
                ps.add_par(wl, wr)
            } else {
                ps.add_tensor(wl, wr)
            }
        }
        _ => wires.next().expect("one wire per component"),
    }
}

/// The schedule witnessing a structural congruence `P = Q`: matched
/// components get one compound axiom each, surplus source units are
/// threaded through one matched component's axiom chain, surplus target
/// units get their own axiom-and-par proofs. Fails when the congruence
/// rearranges anything strictly under a prefix, which no modality-free
/// proof can witness.
pub fn congruence_schedule(
    p: &ProcessTerm,
    q: &ProcessTerm,
    variant: Variant,
) -> Result<Schedule, SchedError> {
    p.validate()?;
    q.validate()?;
    if !congruent(p, q) {
        return Err(SchedError::NotCongruent);
    }
    let pcomps = comps(p);
    let qcomps = comps(q);
    // matched component pairs: prefixes by root location, then units in
    // traversal order
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (i, cp) in pcomps.iter().enumerate() {
        let Some(root) = cp.root else { continue };
        let j = qcomps
            .iter()
            .position(|cq| cq.root == Some(root))
            .expect("congruent terms share top-level prefixes");
        if qcomps[j].term != cp.term {
            return Err(SchedError::CongruenceUnderPrefix(root));
        }
        pairs.push((i, j));
    }
    let punits: Vec<usize> = (0..pcomps.len()).filter(|i| pcomps[*i].root.is_none()).collect();
    let qunits: Vec<usize> = (0..qcomps.len()).filter(|j| qcomps[*j].root.is_none()).collect();
    let matched_units = punits.len().min(qunits.len());
    pairs.extend(punits.iter().copied().zip(qunits.iter().copied()));
    let excess_src = &punits[matched_units..];
    let orphan_tgt = &qunits[matched_units..];

    let mut sigma: BTreeMap<String, Formula> = BTreeMap::new();
    for &(i, j) in &pairs {
        for k in 0..pcomps[i].var_count() {
            sigma.insert(
                var_name(pcomps[i].var_start + k),
                Formula::var(var_name(qcomps[j].var_start + k)),
            );
        }
    }

    let mut ps = ProofStructure::new();
    let mut src_wire: BTreeMap<usize, WireId> = BTreeMap::new();
    let mut tgt_wire: BTreeMap<usize, WireId> = BTreeMap::new();
    // surplus source units thread through the first matched pair
    let (ti, tj) = pairs[0];
    let f_thread = ttype_at(qcomps[tj].term, variant, qcomps[tj].var_start);
    let chain: Vec<(WireId, WireId)> = (0..=excess_src.len())
        .map(|_| ps.add_axiom(f_thread.clone()))
        .collect();
    src_wire.insert(ti, chain[0].1);
    for (k, &ui) in excess_src.iter().enumerate() {
        let w = ps.add_tensor(chain[k].0, chain[k + 1].1);
        src_wire.insert(ui, w);
        sigma.insert(var_name(pcomps[ui].var_start), f_thread.clone());
    }
    tgt_wire.insert(tj, chain[excess_src.len()].0);
    for &(i, j) in &pairs[1..] {
        let f = ttype_at(qcomps[j].term, variant, qcomps[j].var_start);
        let (wf, wd) = ps.add_axiom(f);
        src_wire.insert(i, wd);
        tgt_wire.insert(j, wf);
    }
    for &j in orphan_tgt {
        let (wp, wn) = ps.add_axiom(Formula::var(var_name(qcomps[j].var_start)));
        tgt_wire.insert(j, ps.add_par(wn, wp));
    }

    let src_leaves: Vec<WireId> = (0..pcomps.len()).map(|i| src_wire[&i]).collect();
    let tgt_leaves: Vec<WireId> = (0..qcomps.len()).map(|j| tgt_wire[&j]).collect();
    let mut it = src_leaves.into_iter();
    let src_conc = build_term_tree(&mut ps, p, &mut it, true);
    let mut it = tgt_leaves.into_iter();
    let tgt_conc = build_term_tree(&mut ps, q, &mut it, false);
    ps.set_conclusions(vec![src_conc, tgt_conc]);

    Ok(Schedule {
        variant,
        source: p.clone(),
        target: q.clone(),
        proof: ps,
        instantiation: Substitution::from_map(sigma),
    })
}

/// Right-nested par of a non-empty component list.
fn par_of(terms: &[&ProcessTerm]) -> ProcessTerm {
    let mut it = terms.iter().rev();
    let mut acc = (*it.next().expect("non-empty")).clone();
    for t in it {
        acc = ProcessTerm::par((*t).clone(), acc);
    }
    acc
}

/// The schedule of a single execution step `(l, m)` of `term`: the
/// fixed interaction proof for the redex, composed with congruence
/// schedules that move the redex to the front and put the result back
/// in place.
pub fn step_schedule(
    term: &ProcessTerm,
    l: Location,
    m: Location,
    variant: Variant,
) -> Result<Schedule, SchedError> {
    let after = step(term, l, m)?;
    let (pos_loc, neg_loc) = if term.polarity(l)? == Polarity::Pos {
        (l, m)
    } else {
        (m, l)
    };
    let all = comps(term);
    let comp_pos = all
        .iter()
        .find(|c| c.root == Some(pos_loc))
        .expect("enabled redexes are top-level");
    let comp_neg = all
        .iter()
        .find(|c| c.root == Some(neg_loc))
        .expect("enabled redexes are top-level");
    let rest: Vec<&ProcessTerm> = all
        .iter()
        .filter(|c| c.root != Some(pos_loc) && c.root != Some(neg_loc))
        .map(|c| c.term)
        .collect();
    let (channel, _, body_pos) = term.find_prefix(pos_loc).unwrap();
    let (_, _, body_neg) = term.find_prefix(neg_loc).unwrap();
    let channel = channel.to_string();
    let (p1, p2) = (body_pos.clone(), body_neg.clone());

    let redex = ProcessTerm::par(comp_pos.term.clone(), comp_neg.term.clone());
    let contractum = ProcessTerm::par(p1.clone(), p2.clone());
    let (p_front, q_front, r_term) = if rest.is_empty() {
        (redex, contractum, None)
    } else {
        let r = par_of(&rest);
        (
            ProcessTerm::par(redex, r.clone()),
            ProcessTerm::par(contractum, r.clone()),
            Some(r),
        )
    };

    let s_pre = congruence_schedule(term, &p_front, variant)?;
    let s_fig = interaction_schedule(&channel, &p1, &p2, r_term.as_ref(), &p_front, &q_front, variant);
    let s_post = congruence_schedule(&q_front, &after, variant)?;
    compose(&compose(&s_pre, &s_fig)?, &s_post)
}

/// The fixed proof of `|(a.P1 | ~a.P2) | R| -o |(P1 | P2) | R|`, for
/// either variant, together with the instantiation of the two prefix
/// variables.
fn interaction_schedule(
    channel: &str,
    p1: &ProcessTerm,
    p2: &ProcessTerm,
    r: Option<&ProcessTerm>,
    p_front: &ProcessTerm,
    q_front: &ProcessTerm,
    variant: Variant,
) -> Schedule {
    let n1 = ttype_var_count(p1);
    let n2 = ttype_var_count(p2);
    let t1 = ttype_at(p1, variant, 0);
    let t2 = ttype_at(p2, variant, n1);
    let b = Formula::tensor(t1.clone(), t2.clone());

    let mut ps = ProofStructure::new();
    let (src_redex, tgt_b) = match variant {
        Variant::Sync => {
            // A = <a>+ (T2^ @ (T1 * T2)); axiom on A, compound axiom on
            // B = T1 * T2; the negative component's dual is A * B^
            let a = Formula::mod_pos(channel, Formula::par(negate(&t2), b.clone()));
            let (wa0, wa1) = ps.add_axiom(negate(&a));
            let (wb0, wb1) = ps.add_axiom(negate(&b));
            let tens = ps.add_tensor(wa1, wb0);
            (ps.add_par(wa0, tens), wb1)
        }
        Variant::Async => {
            // A = <a>+ T2^; duals are A^ * B^ and (T2^ @ T2) * A
            let a = Formula::mod_pos(channel, negate(&t2));
            let (wa0, wa1) = ps.add_axiom(negate(&a));
            let (wb0, wb1) = ps.add_axiom(negate(&b));
            let (wq0, wq1) = ps.add_axiom(t2.clone());
            let tens_p = ps.add_tensor(wa0, wb0);
            let par_q = ps.add_par(wq1, wq0);
            let tens_q = ps.add_tensor(par_q, wa1);
            (ps.add_par(tens_p, tens_q), wb1)
        }
    };
    let (src_conc, tgt_conc) = match r {
        None => (src_redex, tgt_b),
        Some(r) => {
            let tr = ttype_at(r, variant, n1 + n2);
            let (wr0, wr1) = ps.add_axiom(tr);
            (ps.add_par(src_redex, wr1), ps.add_tensor(tgt_b, wr0))
        }
    };
    ps.set_conclusions(vec![src_conc, tgt_conc]);

    // variable alignment: source numbering walks P1, then the positive
    // prefix variable, then P2, then the negative prefix variable, then
    // R; the target drops the two prefix variables
    let mut sigma: BTreeMap<String, Formula> = BTreeMap::new();
    for k in 0..n1 {
        sigma.insert(var_name(k), Formula::var(var_name(k)));
    }
    let beta = match variant {
        Variant::Sync => b,
        Variant::Async => t2.clone(),
    };
    sigma.insert(var_name(n1), t2.clone());
    for k in 0..n2 {
        sigma.insert(var_name(n1 + 1 + k), Formula::var(var_name(n1 + k)));
    }
    sigma.insert(var_name(n1 + 1 + n2), beta);
    let n_r = r.map_or(0, ttype_var_count);
    for k in 0..n_r {
        sigma.insert(
            var_name(n1 + n2 + 2 + k),
            Formula::var(var_name(n1 + n2 + k)),
        );
    }

    Schedule {
        variant,
        source: p_front.clone(),
        target: q_front.clone(),
        proof: ps,
        instantiation: Substitution::from_map(sigma),
    }
}

/// Sequential composition: cut the middle conclusions together and
/// normalize away the cut. When the endpoints are merely congruent, a
/// congruence schedule bridges them first.
pub fn compose(s1: &Schedule, s2: &Schedule) -> Result<Schedule, SchedError> {
    if s1.variant != s2.variant {
        return Err(SchedError::VariantMismatch);
    }
    if s1.target != s2.source {
        if !congruent(&s1.target, &s2.source) {
            return Err(SchedError::NotComposable {
                left: s1.target.to_string(),
                right: s2.source.to_string(),
            });
        }
        let bridge = congruence_schedule(&s1.target, &s2.source, s1.variant)?;
        let joined = compose_raw(s1, &bridge)?;
        return compose_raw(&joined, s2);
    }
    compose_raw(s1, s2)
}

fn compose_raw(s1: &Schedule, s2: &Schedule) -> Result<Schedule, SchedError> {
    // re-instantiating the first proof renames its target naming into
    // the second schedule's, so the middle wires are exactly dual
    let p1 = s1.proof.instantiate(&s2.instantiation);
    let mut ps = ProofStructure::new();
    let m1 = ps.absorb(&p1);
    let m2 = ps.absorb(&s2.proof);
    ps.add_cut(m1[&p1.conclusions()[1]], m2[&s2.proof.conclusions()[0]]);
    ps.set_conclusions(vec![m1[&p1.conclusions()[0]], m2[&s2.proof.conclusions()[1]]]);
    let (nf, emitted) = normalize(&ps)?;
    debug_assert!(emitted.is_empty(), "schedule proofs emit no actions");
    let sigma: BTreeMap<String, Formula> = s1
        .instantiation
        .iter()
        .map(|(k, v)| (k.clone(), substitute(v, &s2.instantiation)))
        .collect();
    Ok(Schedule {
        variant: s1.variant,
        source: s1.source.clone(),
        target: s2.target.clone(),
        proof: nf,
        instantiation: Substitution::from_map(sigma),
    })
}

/// The schedule of a whole execution: the composition of the step
/// schedules along `steps`, starting from the identity congruence.
pub fn trace_schedule(
    term: &ProcessTerm,
    steps: &[(Location, Location)],
    variant: Variant,
) -> Result<Schedule, SchedError> {
    let mut sched = congruence_schedule(term, term, variant)?;
    let mut current = term.clone();
    for &(l, m) in steps {
        let st = step_schedule(&current, l, m, variant)?;
        current = st.target.clone();
        sched = compose(&sched, &st)?;
    }
    Ok(sched)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::dr_check;
    use crate::process::{execute, parse_term};

    const P_EX: &str = "a^1.c^2 | b^3.~a^4 | ~b^5.~c^6 | a^7.~b^8 | b^9 | ~a^0";

    fn pt(s: &str) -> ProcessTerm {
        parse_term(s).unwrap()
    }

    fn loc(n: u64) -> Location {
        Location(n)
    }

    #[test]
    fn identity_congruence_schedule() {
        for variant in [Variant::Sync, Variant::Async] {
            for src in ["1", "a^1 | ~a^2", P_EX] {
                let p = pt(src);
                let s = congruence_schedule(&p, &p, variant).unwrap();
                s.validate().unwrap();
                assert_eq!(dr_check(&s.proof).unwrap(), Ok(()));
            }
        }
    }

    #[test]
    fn commuted_congruence_schedule() {
        let p = pt("a^1.b^2 | ~a^3 | 1");
        let q = pt("1 | ~a^3 | a^1.b^2");
        let s = congruence_schedule(&p, &q, Variant::Sync).unwrap();
        s.validate().unwrap();
        assert_eq!(dr_check(&s.proof).unwrap(), Ok(()));
    }

    #[test]
    fn unit_absorption_schedules() {
        // more source units than target units and vice versa
        for (psrc, qsrc) in [
            ("a^1 | 1 | 1", "a^1"),
            ("a^1", "1 | a^1 | 1"),
            ("1 | 1 | 1", "1"),
            ("1", "1 | 1 | 1 | 1"),
        ] {
            for variant in [Variant::Sync, Variant::Async] {
                let s = congruence_schedule(&pt(psrc), &pt(qsrc), variant).unwrap();
                s.validate().unwrap();
                assert_eq!(dr_check(&s.proof).unwrap(), Ok(()), "{psrc} -> {qsrc}");
            }
        }
    }

    #[test]
    fn congruence_schedule_rejections() {
        assert!(matches!(
            congruence_schedule(&pt("a^1"), &pt("b^1"), Variant::Sync),
            Err(SchedError::NotCongruent)
        ));
        // congruent, but only by rearranging under the prefix
        let p = pt("a^1.(1 | b^2)");
        let q = pt("a^1.(b^2 | 1)");
        assert!(congruent(&p, &q));
        assert!(matches!(
            congruence_schedule(&p, &q, Variant::Sync),
            Err(SchedError::CongruenceUnderPrefix(Location(1)))
        ));
    }

    #[test]
    fn step_schedule_minimal_redex() {
        for variant in [Variant::Sync, Variant::Async] {
            let p = pt("a^1 | ~a^2");
            let s = step_schedule(&p, loc(1), loc(2), variant).unwrap();
            s.validate().unwrap();
            assert_eq!(dr_check(&s.proof).unwrap(), Ok(()));
            assert!(congruent(&s.target, &ProcessTerm::par(ProcessTerm::Unit, ProcessTerm::Unit)));
        }
    }

    #[test]
    fn step_schedule_with_context_and_bodies() {
        for variant in [Variant::Sync, Variant::Async] {
            let p = pt("b^5 | a^1.(c^2 | 1) | ~a^3.~c^4");
            // arguments in either order
            for (l, m) in [(loc(1), loc(3)), (loc(3), loc(1))] {
                let s = step_schedule(&p, l, m, variant).unwrap();
                s.validate().unwrap();
                assert_eq!(dr_check(&s.proof).unwrap(), Ok(()), "{variant}");
                assert!(congruent(&s.target, &pt("b^5 | c^2 | ~c^4")));
            }
            assert!(matches!(
                step_schedule(&p, loc(2), loc(4), variant),
                Err(SchedError::Process(ProcessError::NotEnabled { .. }))
            ));
        }
    }

    #[test]
    fn trace_schedule_example() {
        let p = pt(P_EX);
        let steps = [(loc(9), loc(5)), (loc(1), loc(0)), (loc(2), loc(6))];
        for variant in [Variant::Sync, Variant::Async] {
            let s = trace_schedule(&p, &steps, variant).unwrap();
            s.validate().unwrap();
            let expect = execute(&p, &steps).unwrap().r#final;
            assert!(congruent(&s.target, &expect));
        }
    }

    #[test]
    fn empty_trace_is_identity() {
        let p = pt("a^1 | ~a^2");
        let s = trace_schedule(&p, &[], Variant::Sync).unwrap();
        assert_eq!(s.target, p);
        s.validate().unwrap();
    }

    #[test]
    fn compose_mismatched_endpoints() {
        let s1 = congruence_schedule(&pt("a^1"), &pt("a^1"), Variant::Sync).unwrap();
        let s2 = congruence_schedule(&pt("b^1"), &pt("b^1"), Variant::Sync).unwrap();
        assert!(matches!(
            compose(&s1, &s2),
            Err(SchedError::NotComposable { .. })
        ));
        let s3 = congruence_schedule(&pt("b^1"), &pt("b^1"), Variant::Async).unwrap();
        assert!(matches!(compose(&s1, &s3), Err(SchedError::VariantMismatch)));
    }

    #[test]
    fn compose_bridges_congruent_endpoints() {
        let s1 = congruence_schedule(&pt("a^1 | b^2"), &pt("b^2 | a^1"), Variant::Sync).unwrap();
        let s2 = congruence_schedule(&pt("a^1 | b^2"), &pt("a^1 | b^2"), Variant::Sync).unwrap();
        let s = compose(&s1, &s2).unwrap();
        s.validate().unwrap();
        assert_eq!(s.target, pt("a^1 | b^2"));
    }
}
