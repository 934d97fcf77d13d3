//! Randomized invariants: printing/parsing roundtrips, negation
//! involution, congruence-invariance of the canonical form, agreement
//! of the two correctness checks, and order-independence of cut
//! elimination.

use proptest::prelude::*;

use proofsched::formula::{negate, parse_formula, Formula};
use proofsched::net::{dr_check, dr_check_fast, normalize_by, ProofStructure};
use proofsched::process::{canonicalize, congruent, parse_term, ProcessTerm};
use proofsched::sched::trace_schedule;
use proofsched::translate::{proof_assign, ttype, Variant};

// ---- generators -------------------------------------------------------

fn arb_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        "[uvw][0-9]".prop_map(Formula::Var),
        "[uvw][0-9]".prop_map(Formula::DualVar),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Formula::Tensor(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Formula::Par(Box::new(a), Box::new(b))),
            ("[ab]", inner.clone()).prop_map(|(c, a)| Formula::ModPos(c, Box::new(a))),
            ("[ab]", inner).prop_map(|(c, a)| Formula::ModNeg(c, Box::new(a))),
        ]
    })
}

/// An unlocated process skeleton; locations are assigned on rendering.
#[derive(Debug, Clone)]
enum Skel {
    One,
    Par(Box<Skel>, Box<Skel>),
    Act(String, bool, Box<Skel>),
}

fn arb_skel() -> impl Strategy<Value = Skel> {
    let leaf = Just(Skel::One);
    leaf.prop_recursive(3, 10, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Skel::Par(Box::new(a), Box::new(b))),
            ("[abc]", any::<bool>(), inner)
                .prop_map(|(c, pos, a)| Skel::Act(c, pos, Box::new(a))),
        ]
    })
}

fn render(s: &Skel, next: &mut u64, out: &mut String) {
    match s {
        Skel::One => out.push('1'),
        Skel::Par(a, b) => {
            out.push('(');
            render(a, next, out);
            out.push_str(" | ");
            render(b, next, out);
            out.push(')');
        }
        Skel::Act(c, pos, a) => {
            if !pos {
                out.push('~');
            }
            out.push_str(c);
            out.push('^');
            out.push_str(&next.to_string());
            *next += 1;
            out.push('.');
            out.push('(');
            render(a, next, out);
            out.push(')');
        }
    }
}

fn arb_term() -> impl Strategy<Value = ProcessTerm> {
    arb_skel().prop_map(|s| {
        let mut src = String::new();
        let mut next = 0;
        render(&s, &mut next, &mut src);
        parse_term(&src).expect("rendered skeletons parse")
    })
}

// ---- formula invariants ----------------------------------------------

proptest! {
    #[test]
    fn formula_print_parse_roundtrip(f in arb_formula()) {
        let printed = f.to_string();
        let back = parse_formula(&printed).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn negation_is_an_involution(f in arb_formula()) {
        prop_assert_eq!(negate(&negate(&f)), f);
    }

    #[test]
    fn negation_has_no_fixed_point(f in arb_formula()) {
        prop_assert_ne!(negate(&f), f);
    }
}

// ---- process invariants ----------------------------------------------

proptest! {
    #[test]
    fn canonical_form_is_congruent_and_idempotent(p in arb_term()) {
        let c = canonicalize(&p);
        prop_assert!(congruent(&p, &c.to_term()));
        prop_assert_eq!(canonicalize(&c.to_term()), c);
    }

    #[test]
    fn term_print_parse_roundtrip(p in arb_term()) {
        prop_assert_eq!(parse_term(&p.to_string()).unwrap(), p);
    }

    /// Every fresh variable of a process type occurs exactly twice,
    /// once positively and once negatively — which is why a single
    /// axiom per variable proves it.
    #[test]
    fn type_variables_occur_once_per_polarity(p in arb_term()) {
        for variant in [Variant::Sync, Variant::Async] {
            let mut counts: std::collections::BTreeMap<String, (usize, usize)> =
                std::collections::BTreeMap::new();
            count_vars(&ttype(&p, variant), &mut counts);
            for (name, (pos, neg)) in counts {
                prop_assert_eq!((pos, neg), (1, 1), "variable {}", name);
            }
        }
    }
}

fn count_vars(f: &Formula, out: &mut std::collections::BTreeMap<String, (usize, usize)>) {
    match f {
        Formula::Var(x) | Formula::MetaVar(x) => out.entry(x.clone()).or_default().0 += 1,
        Formula::DualVar(x) | Formula::DualMetaVar(x) => {
            out.entry(x.clone()).or_default().1 += 1
        }
        Formula::Tensor(a, b) | Formula::Par(a, b) => {
            count_vars(a, out);
            count_vars(b, out);
        }
        Formula::ModPos(_, a) | Formula::ModNeg(_, a) => count_vars(a, out),
    }
}

// ---- net invariants ---------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The exhaustive switching check and the linear-time check agree
    /// on every canonical proof (all correct by construction).
    #[test]
    fn fast_and_exhaustive_checks_agree_on_proofs(p in arb_term()) {
        for variant in [Variant::Sync, Variant::Async] {
            let tp = proof_assign(&p, variant);
            prop_assert!(dr_check(&tp.proof).unwrap().is_ok());
            prop_assert!(dr_check_fast(&tp.proof).unwrap());
        }
    }

    /// Cut elimination reaches the same cut-free net and emits the
    /// same modality pair-set under different elimination orders.
    #[test]
    fn normalization_is_order_independent(q in arb_term()) {
        // plant a guaranteed redex next to the random term
        let n = q.locations().iter().map(|l| l.0 + 1).max().unwrap_or(0);
        let p = parse_term(&format!("a^{n} | ~a^{} | {q}", n + 1)).unwrap();
        let steps: Vec<_> = proofsched::process::enabled_pairs(&p).into_iter().collect();
        let s = trace_schedule(&p, &steps[..1], Variant::Sync).unwrap();

        // cut the canonical proof of the source against the schedule
        let tp = proof_assign(&s.source, s.variant);
        let pi = tp.proof.instantiate(&s.instantiation);
        let mut ps = ProofStructure::new();
        let m1 = ps.absorb(&pi);
        let m2 = ps.absorb(&s.proof);
        ps.add_cut(m1[&pi.conclusions()[0]], m2[&s.proof.conclusions()[0]]);
        ps.set_conclusions(vec![m2[&s.proof.conclusions()[1]]]);

        let (first, e1) = normalize_by(&ps, |cuts| cuts[0]).unwrap();
        let (last, e2) = normalize_by(&ps, |cuts| cuts[cuts.len() - 1]).unwrap();
        let (mid, e3) = normalize_by(&ps, |cuts| cuts[cuts.len() / 2]).unwrap();
        prop_assert_eq!(first.canonical_key(), last.canonical_key());
        prop_assert_eq!(first.canonical_key(), mid.canonical_key());
        let set = |v: Vec<_>| v.into_iter().collect::<std::collections::BTreeSet<_>>();
        let (s1, s2, s3) = (set(e1), set(e2), set(e3));
        prop_assert_eq!(&s1, &s2);
        prop_assert_eq!(&s1, &s3);
    }
}
