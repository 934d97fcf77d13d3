//! Cut elimination and the proof order on modality links.

use std::collections::{BTreeMap, BTreeSet};

use super::{Link, LinkId, LinkKind, NetError, ProofStructure, WireId};
use crate::process::Location;

/// The result of one cut-elimination step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutOutcome {
    pub structure: ProofStructure,
    /// `Some((l, m))` when the step cancelled dual modalities labelled
    /// `l` (positive) and `m` (negative).
    pub emitted: Option<(Location, Location)>,
}

/// Performs the elimination step for the given cut link.
pub fn cut_step(ps: &ProofStructure, cut: LinkId) -> Result<CutOutcome, NetError> {
    let cut_link = match ps.link(cut) {
        Some(l) if l.kind == LinkKind::Cut => l.clone(),
        Some(_) => return Err(NetError::NotACut(cut)),
        None => return Err(NetError::NotACut(cut)),
    };
    let (w1, w2) = (cut_link.premisses[0], cut_link.premisses[1]);
    let p1 = ps
        .producer(w1)
        .ok_or_else(|| NetError::Malformed(format!("wire {w1} has no producer")))?
        .clone();
    let p2 = ps
        .producer(w2)
        .ok_or_else(|| NetError::Malformed(format!("wire {w2} has no producer")))?
        .clone();
    // axiom elimination applies whatever the partner is, including
    // compound axioms arising from instantiation
    if p1.kind == LinkKind::Axiom || p2.kind == LinkKind::Axiom {
        let (ax, aw, other_w) = if p2.kind == LinkKind::Axiom {
            (p2, w2, w1)
        } else {
            (p1, w1, w2)
        };
        if ax.conclusions.contains(&other_w) {
            return Err(NetError::Clash {
                cut,
                reason: "cut joins both conclusions of one axiom".into(),
            });
        }
        return Ok(CutOutcome {
            structure: eliminate_axiom(ps, cut, &ax, aw, other_w),
            emitted: None,
        });
    }
    match (&p1.kind, &p2.kind) {
        (LinkKind::Tensor, LinkKind::Par) => Ok(CutOutcome {
            structure: split_multiplicative(ps, cut, &p1, &p2),
            emitted: None,
        }),
        (LinkKind::Par, LinkKind::Tensor) => Ok(CutOutcome {
            structure: split_multiplicative(ps, cut, &p2, &p1),
            emitted: None,
        }),
        (
            LinkKind::ModPos {
                channel: c1,
                location: l1,
            },
            LinkKind::ModNeg {
                channel: c2,
                location: l2,
            },
        )
        | (
            LinkKind::ModNeg {
                channel: c2,
                location: l2,
            },
            LinkKind::ModPos {
                channel: c1,
                location: l1,
            },
        ) => {
            if c1 != c2 {
                return Err(NetError::Clash {
                    cut,
                    reason: format!("modality channels `{c1}` and `{c2}` differ"),
                });
            }
            let (pos, neg) = if matches!(p1.kind, LinkKind::ModPos { .. }) {
                (p1.clone(), p2.clone())
            } else {
                (p2.clone(), p1.clone())
            };
            Ok(CutOutcome {
                structure: cancel_modalities(ps, cut, &pos, &neg),
                emitted: Some((*l1, *l2)),
            })
        }
        (a, b) => Err(NetError::Clash {
            cut,
            reason: format!("cannot reduce a cut between {a:?} and {b:?}"),
        }),
    }
}

fn eliminate_axiom(
    ps: &ProofStructure,
    cut: LinkId,
    ax: &Link,
    aw: WireId,
    other_w: WireId,
) -> ProofStructure {
    let mut out = ps.clone();
    // the axiom's other conclusion is re-fed by the producer of other_w
    let spare = *ax.conclusions.iter().find(|w| **w != aw).unwrap();
    out.remove_link(cut);
    out.remove_link(ax.id);
    out.remove_wire(aw);
    out.replace_wire(spare, other_w);
    out.remove_wire(spare);
    out
}

fn split_multiplicative(
    ps: &ProofStructure,
    cut: LinkId,
    tensor: &Link,
    par: &Link,
) -> ProofStructure {
    let mut out = ps.clone();
    out.remove_link(cut);
    out.remove_link(tensor.id);
    out.remove_link(par.id);
    out.remove_wire(tensor.conclusions[0]);
    out.remove_wire(par.conclusions[0]);
    // positional: tensor premisses are componentwise dual to par premisses
    out.add_cut(tensor.premisses[0], par.premisses[0]);
    out.add_cut(tensor.premisses[1], par.premisses[1]);
    out
}

fn cancel_modalities(
    ps: &ProofStructure,
    cut: LinkId,
    pos: &Link,
    neg: &Link,
) -> ProofStructure {
    let mut out = ps.clone();
    out.remove_link(cut);
    out.remove_link(pos.id);
    out.remove_link(neg.id);
    out.remove_wire(pos.conclusions[0]);
    out.remove_wire(neg.conclusions[0]);
    out.add_cut(pos.premisses[0], neg.premisses[0]);
    out
}

/// Eliminates every cut with the deterministic strategy (lowest link id
/// first), returning the cut-free structure and the modality
/// location-pairs emitted along the way.
pub fn normalize(
    ps: &ProofStructure,
) -> Result<(ProofStructure, Vec<(Location, Location)>), NetError> {
    normalize_by(ps, |cuts| cuts[0])
}

/// Like `normalize` with a caller-chosen elimination order; `choose`
/// receives the sorted list of current cut link-ids.
pub fn normalize_by(
    ps: &ProofStructure,
    mut choose: impl FnMut(&[LinkId]) -> LinkId,
) -> Result<(ProofStructure, Vec<(Location, Location)>), NetError> {
    let mut current = ps.clone();
    let mut emitted = Vec::new();
    loop {
        let mut cuts = current.cut_ids();
        if cuts.is_empty() {
            return Ok((current, emitted));
        }
        cuts.sort_unstable();
        let pick = choose(&cuts);
        let outcome = cut_step(&current, pick)?;
        current = outcome.structure;
        if let Some(pair) = outcome.emitted {
            emitted.push(pair);
        }
    }
}

/// The proof order: `l <_pi m` when the modality link labelled `m`
/// occurs in the tree of premisses above the link labelled `l` (walking
/// producers upward, stopping at axioms). Returned as the set of strict
/// pairs.
pub fn proof_order(ps: &ProofStructure) -> BTreeSet<(Location, Location)> {
    let mut out = BTreeSet::new();
    for link in ps.modality_links() {
        let l = link.kind.location().unwrap();
        let mut above = BTreeSet::new();
        collect_above(ps, link, &mut above);
        for m in above {
            if m != l {
                out.insert((l, m));
            }
        }
    }
    out
}

fn collect_above(ps: &ProofStructure, link: &Link, out: &mut BTreeSet<Location>) {
    for w in &link.premisses {
        if let Some(prod) = ps.producer(*w) {
            if prod.kind == LinkKind::Axiom {
                continue;
            }
            if let Some(loc) = prod.kind.location() {
                out.insert(loc);
            }
            collect_above(ps, prod, out);
        }
    }
}

/// The term read off a structure's modality links: each link becomes a
/// prefix whose body holds the links directly above it, in parallel;
/// links nobody guards sit at top level. The prefix nesting of the
/// result mirrors the proof order exactly — for a synchronous canonical
/// proof this recovers the source term, while an asynchronous proof
/// reads back flatter, its floated modalities becoming top-level
/// prefixes.
pub fn structure_term(ps: &ProofStructure) -> crate::process::ProcessTerm {
    // modality links in the premiss tree, stopping at the first
    // modality link (a deeper one is that link's child) or axiom
    fn direct_children(ps: &ProofStructure, w: WireId, out: &mut Vec<Location>) {
        if let Some(prod) = ps.producer(w) {
            if prod.kind == LinkKind::Axiom {
                return;
            }
            if let Some(loc) = prod.kind.location() {
                out.push(loc);
                return;
            }
            for v in &prod.premisses {
                direct_children(ps, *v, out);
            }
        }
    }

    let mut children: BTreeMap<Location, Vec<Location>> = BTreeMap::new();
    let mut guarded: BTreeSet<Location> = BTreeSet::new();
    for link in ps.modality_links() {
        let l = link.kind.location().unwrap();
        let mut out = Vec::new();
        direct_children(ps, link.premisses[0], &mut out);
        guarded.extend(out.iter().copied());
        children.insert(l, out);
    }
    let info = modality_info(ps);

    fn build(
        l: Location,
        info: &BTreeMap<Location, (String, bool)>,
        children: &BTreeMap<Location, Vec<Location>>,
    ) -> crate::process::ProcessTerm {
        use crate::process::{Polarity, ProcessTerm};
        let (channel, positive) = &info[&l];
        let body = compose(children[&l].iter().map(|&m| build(m, info, children)));
        let polarity = if *positive { Polarity::Pos } else { Polarity::Neg };
        ProcessTerm::prefix(channel.clone(), polarity, l, body)
    }
    fn compose(terms: impl Iterator<Item = crate::process::ProcessTerm>) -> crate::process::ProcessTerm {
        use crate::process::ProcessTerm;
        terms
            .reduce(ProcessTerm::par)
            .unwrap_or(ProcessTerm::Unit)
    }

    compose(
        children
            .keys()
            .filter(|l| !guarded.contains(l))
            .map(|&l| build(l, &info, &children)),
    )
}

/// Subject (channel) and polarity of the modality link at a location.
pub fn modality_info(ps: &ProofStructure) -> BTreeMap<Location, (String, bool)> {
    let mut out = BTreeMap::new();
    for link in ps.modality_links() {
        match &link.kind {
            LinkKind::ModPos { channel, location } => {
                out.insert(*location, (channel.clone(), true));
            }
            LinkKind::ModNeg { channel, location } => {
                out.insert(*location, (channel.clone(), false));
            }
            _ => unreachable!(),
        }
    }
    out
}
