//! Correctness of proof structures: every switching graph (one premiss
//! chosen per par link) must be connected and acyclic.
//!
//! `dr_check` enumerates all switchings — honest and exhaustive, with a
//! cap. `dr_check_fast` is a polynomial contraction criterion used where
//! exhaustive enumeration would not scale; the test suite validates it
//! against `dr_check`.

use std::collections::BTreeMap;

use super::{LinkId, LinkKind, NetError, ProofStructure};

/// Cap on the number of switchings enumerated by `dr_check`.
pub const DEFAULT_SWITCHING_CAP: usize = 1 << 22;

/// A failed switching: the premiss chosen for each par link (0 or 1)
/// and what went wrong.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DrFailure {
    Cycle {
        switching: BTreeMap<LinkId, usize>,
        cycle: Vec<LinkId>,
    },
    Disconnected {
        switching: BTreeMap<LinkId, usize>,
        component: Vec<LinkId>,
    },
}

struct Edge {
    a: LinkId,
    b: LinkId,
    /// `Some((par link, premiss index))` when this wire is a par premiss.
    par: Option<(LinkId, usize)>,
}

fn edges(ps: &ProofStructure) -> Vec<Edge> {
    let mut out = Vec::new();
    for (w, _) in ps.wires() {
        let (Some(prod), Some(cons)) = (ps.producer(w), ps.consumer(w)) else {
            continue;
        };
        let par = if cons.kind == LinkKind::Par {
            let idx = cons.premisses.iter().position(|x| *x == w).unwrap();
            Some((cons.id, idx))
        } else {
            None
        };
        out.push(Edge {
            a: prod.id,
            b: cons.id,
            par,
        });
    }
    out
}

/// Exhaustive Danos-Regnier check with the default switching cap.
pub fn dr_check(ps: &ProofStructure) -> Result<Result<(), DrFailure>, NetError> {
    dr_check_capped(ps, DEFAULT_SWITCHING_CAP)
}

/// Exhaustive Danos-Regnier check; errors on malformed structures or
/// when the number of switchings exceeds `cap`.
pub fn dr_check_capped(
    ps: &ProofStructure,
    cap: usize,
) -> Result<Result<(), DrFailure>, NetError> {
    ps.validate()?;
    let pars: Vec<LinkId> = ps
        .links()
        .filter(|l| l.kind == LinkKind::Par)
        .map(|l| l.id)
        .collect();
    if pars.len() >= usize::BITS as usize - 1 || (1usize << pars.len()) > cap {
        return Err(NetError::CapExceeded {
            what: "switchings".into(),
            cap,
        });
    }
    let all_edges = edges(ps);
    let vertices: Vec<LinkId> = ps.links().map(|l| l.id).collect();
    if vertices.is_empty() {
        return Ok(Ok(()));
    }
    for mask in 0..(1usize << pars.len()) {
        let switching: BTreeMap<LinkId, usize> = pars
            .iter()
            .enumerate()
            .map(|(i, p)| (*p, (mask >> i) & 1))
            .collect();
        let kept: Vec<(LinkId, LinkId)> = all_edges
            .iter()
            .filter(|e| match e.par {
                Some((p, idx)) => switching[&p] == idx,
                None => true,
            })
            .map(|e| (e.a, e.b))
            .collect();
        if let Err(problem) = check_tree(&vertices, &kept) {
            return Ok(Err(match problem {
                TreeFailure::Cycle(c) => DrFailure::Cycle {
                    switching,
                    cycle: c,
                },
                TreeFailure::Disconnected(c) => DrFailure::Disconnected {
                    switching,
                    component: c,
                },
            }));
        }
    }
    Ok(Ok(()))
}

enum TreeFailure {
    Cycle(Vec<LinkId>),
    Disconnected(Vec<LinkId>),
}

/// Checks that the undirected graph is a single tree.
fn check_tree(vertices: &[LinkId], edges: &[(LinkId, LinkId)]) -> Result<(), TreeFailure> {
    let mut adj: BTreeMap<LinkId, Vec<(usize, LinkId)>> = BTreeMap::new();
    for v in vertices {
        adj.insert(*v, Vec::new());
    }
    for (i, (a, b)) in edges.iter().enumerate() {
        adj.get_mut(a).unwrap().push((i, *b));
        adj.get_mut(b).unwrap().push((i, *a));
    }
    // iterative DFS from the first vertex, tracking the entering edge
    let root = vertices[0];
    let mut parent: BTreeMap<LinkId, (usize, LinkId)> = BTreeMap::new();
    let mut visited: BTreeMap<LinkId, bool> = vertices.iter().map(|v| (*v, false)).collect();
    let mut stack = vec![(root, usize::MAX)];
    while let Some((v, in_edge)) = stack.pop() {
        if visited[&v] {
            continue;
        }
        visited.insert(v, true);
        for &(e, u) in &adj[&v] {
            if e == in_edge {
                continue;
            }
            if visited[&u] {
                // found a cycle: walk parents back from v to u
                let mut cycle = vec![u, v];
                let mut cur = v;
                while cur != u {
                    match parent.get(&cur) {
                        Some(&(_, p)) => {
                            cycle.push(p);
                            cur = p;
                        }
                        None => break,
                    }
                }
                return Err(TreeFailure::Cycle(cycle));
            }
            parent.insert(u, (e, v));
            stack.push((u, e));
        }
    }
    let unreached: Vec<LinkId> = visited
        .iter()
        .filter(|(_, seen)| !**seen)
        .map(|(v, _)| *v)
        .collect();
    if !unreached.is_empty() {
        return Err(TreeFailure::Disconnected(unreached));
    }
    Ok(())
}

/// Polynomial contraction criterion: the structure is correct iff its
/// graph contracts to a single node by (a) contracting ordinary edges
/// between distinct nodes and (b) absorbing a par link both of whose
/// premiss edges reach the same node. Validated against `dr_check` in
/// the test suite.
pub fn dr_check_fast(ps: &ProofStructure) -> Result<bool, NetError> {
    ps.validate()?;
    let vertices: Vec<LinkId> = ps.links().map(|l| l.id).collect();
    if vertices.is_empty() {
        return Ok(true);
    }
    let index: BTreeMap<LinkId, usize> = vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (*v, i))
        .collect();
    let mut uf = UnionFind::new(vertices.len());
    let mut normal: Vec<(usize, usize)> = Vec::new();
    // par id -> (par node, premiss endpoints)
    let mut groups: BTreeMap<LinkId, (usize, Vec<usize>)> = BTreeMap::new();
    for l in ps.links() {
        if l.kind == LinkKind::Par {
            groups.insert(l.id, (index[&l.id], Vec::new()));
        }
    }
    for e in edges(ps) {
        match e.par {
            Some((p, _)) => groups.get_mut(&p).unwrap().1.push(index[&e.a]),
            None => normal.push((index[&e.a], index[&e.b])),
        }
    }
    loop {
        let mut progressed = false;
        let mut rest = Vec::new();
        for (a, b) in normal.drain(..) {
            let (ra, rb) = (uf.find(a), uf.find(b));
            if ra == rb {
                return Ok(false); // ordinary self-loop: a switching cycle
            }
            uf.union(ra, rb);
            progressed = true;
        }
        normal = rest.drain(..).collect();
        let mut done_groups = Vec::new();
        for (id, (p, prems)) in groups.iter() {
            let rp = uf.find(*p);
            let r0 = uf.find(prems[0]);
            let r1 = uf.find(prems[1]);
            if r0 == rp || r1 == rp {
                return Ok(false); // premiss loops back to its par
            }
            if r0 == r1 {
                uf.union(rp, r0);
                done_groups.push(*id);
                progressed = true;
            }
        }
        for id in done_groups {
            groups.remove(&id);
        }
        if groups.is_empty() && normal.is_empty() {
            break;
        }
        if !progressed {
            return Ok(false); // stuck: some switching is disconnected
        }
    }
    let root = uf.find(0);
    Ok((0..uf.len()).all(|i| uf.find(i) == root))
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn len(&self) -> usize {
        self.parent.len()
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}
