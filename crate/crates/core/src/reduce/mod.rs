//! DP-removals: deleting a vertex and restoring a matching of non-edges in
//! its neighborhood, so that the result grows back into the input by one
//! DP-step.

mod kernel;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Edge, ExtEdge, Graph, GraphError, StubGraph, VertexId};
use crate::growth::{DpStepRecord, OpKind};
use crate::matching::maximum_matching;

pub use kernel::{
    exact_minimum_kernel, reduce_to_kernel, remove_independent_set, OrderPolicy, ReduceOptions,
    ReductionResult, EXACT_SEARCH_LIMIT,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InvOpKind {
    InvOp1,
    InvOp2,
    InvOp3a,
    InvOp3b,
}

impl fmt::Display for InvOpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InvOpKind::InvOp1 => "invop1",
            InvOpKind::InvOp2 => "invop2",
            InvOpKind::InvOp3a => "invop3a",
            InvOpKind::InvOp3b => "invop3b",
        })
    }
}

impl FromStr for InvOpKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "invop1" => Ok(InvOpKind::InvOp1),
            "invop2" => Ok(InvOpKind::InvOp2),
            "invop3a" => Ok(InvOpKind::InvOp3a),
            "invop3b" => Ok(InvOpKind::InvOp3b),
            _ => Err(format!("unknown inverse operation {s:?}")),
        }
    }
}

/// A way to DP-remove `vertex`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RemovabilityCertificate {
    pub vertex: VertexId,
    pub inv_op: InvOpKind,
    /// Non-edges turned into edges. A pair with the stub-node (InvOp1 on a
    /// deficient vertex) becomes the new stub-edge.
    pub restored: Vec<ExtEdge>,
    /// Deficient vertex after the removal.
    pub new_deficient: Option<VertexId>,
    /// Deficient vertex before the removal.
    pub stub_before: Option<VertexId>,
}

impl RemovabilityCertificate {
    /// The forward step that undoes this removal: p-degree, lifts and `r`.
    pub fn inverse_step(&self) -> Result<(usize, Vec<ExtEdge>, Option<usize>), ReduceError> {
        let m = self.restored.len();
        Ok(match self.inv_op {
            InvOpKind::InvOp1 => (2 * m, self.restored.clone(), None),
            InvOpKind::InvOp2 => {
                let x = self.new_deficient.ok_or(ReduceError::Malformed("InvOp2 without x"))?;
                let mut lifts = self.restored.clone();
                lifts.push(ExtEdge::Stub(x));
                (2 * m + 1, lifts, None)
            }
            InvOpKind::InvOp3a => (2 * m + 1, self.restored.clone(), Some(0)),
            InvOpKind::InvOp3b => {
                let u = self.stub_before.ok_or(ReduceError::Malformed("InvOp3b without u"))?;
                let pos = crate::growth::covered_in_order(&self.restored)
                    .iter()
                    .position(|&v| v == u)
                    .ok_or(ReduceError::Malformed("InvOp3b u not covered"))?;
                (2 * m - 1, self.restored.clone(), Some(pos + 1))
            }
        })
    }
}

/// Why no certificate exists for a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Blocked {
    /// The operation forced by parity and stub state has no suitable matching.
    NoMatching(InvOpKind),
    /// Odd degree while the stub-edge sits on a neighbor.
    StubOnNeighbor,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("stale certificate for vertex {0}: {1}")]
    StaleCertificate(VertexId, String),
    #[error("vertices {0} and {1} are adjacent")]
    NotIndependent(VertexId, VertexId),
    #[error("budget exhausted after {} removals", .0.removed_count)]
    BudgetExhausted(Box<ReductionResult>),
    #[error("exact search limited to {limit} vertices, graph has {n}")]
    TooLarge { n: usize, limit: usize },
    #[error("malformed certificate: {0}")]
    Malformed(&'static str),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// The vertex set whose non-edges must be matched, and whether the
/// stub-node belongs to it.
struct Target {
    op: InvOpKind,
    vertices: Vec<VertexId>,
    with_stub: bool,
    /// Pairs needed; for InvOp2 one vertex stays uncovered.
    pairs: usize,
}

fn target(sg: &StubGraph, w: VertexId) -> Result<Result<Target, Blocked>, ReduceError> {
    let g = sg.graph();
    if !g.contains(w) {
        return Err(ReduceError::UnknownVertex(w));
    }
    let deficient = sg.deficient();
    let nbrs = g.neighbors(w).to_vec();
    let d = sg.p_degree(w);
    let t = if d % 2 == 0 {
        Target {
            op: InvOpKind::InvOp1,
            with_stub: deficient == Some(w),
            pairs: d / 2,
            vertices: nbrs,
        }
    } else {
        match deficient {
            None => Target {
                op: InvOpKind::InvOp2,
                with_stub: false,
                pairs: d / 2,
                vertices: nbrs,
            },
            Some(x) if x == w => Target {
                op: InvOpKind::InvOp3a,
                with_stub: false,
                pairs: d / 2,
                vertices: nbrs,
            },
            Some(u) if g.has_edge(u, w) => return Ok(Err(Blocked::StubOnNeighbor)),
            Some(u) => {
                let mut vertices = nbrs;
                vertices.push(u);
                Target {
                    op: InvOpKind::InvOp3b,
                    with_stub: false,
                    pairs: d / 2 + 1,
                    vertices,
                }
            }
        }
    };
    Ok(Ok(t))
}

/// Complement of the graph induced on `t.vertices`, with the stub-node as
/// an extra last vertex joined to everything when it belongs to the set.
fn complement_graph(g: &Graph, t: &Target) -> Graph {
    let k = t.vertices.len();
    let mut h = Graph::with_vertices(k + usize::from(t.with_stub));
    for i in 0..k {
        for j in i + 1..k {
            if !g.has_edge(t.vertices[i], t.vertices[j]) {
                h.add_edge(i.into(), j.into()).expect("fresh edge");
            }
        }
        if t.with_stub {
            h.add_edge(i.into(), k.into()).expect("fresh edge");
        }
    }
    h
}

fn local_to_ext(t: &Target, a: usize, b: usize) -> ExtEdge {
    let k = t.vertices.len();
    let (a, b) = (a.min(b), a.max(b));
    if b == k {
        ExtEdge::Stub(t.vertices[a])
    } else {
        ExtEdge::Real(Edge::new(t.vertices[a], t.vertices[b]))
    }
}

fn certificate_from(
    sg: &StubGraph,
    w: VertexId,
    t: &Target,
    mut restored: Vec<ExtEdge>,
) -> RemovabilityCertificate {
    restored.sort_unstable();
    let new_deficient = match t.op {
        InvOpKind::InvOp1 => {
            let moved = restored.iter().find_map(|e| match e {
                ExtEdge::Stub(y) => Some(*y),
                ExtEdge::Real(_) => None,
            });
            if t.with_stub {
                moved
            } else {
                sg.deficient()
            }
        }
        InvOpKind::InvOp2 => t
            .vertices
            .iter()
            .copied()
            .find(|&v| !restored.iter().any(|e| e.contains(v))),
        InvOpKind::InvOp3a | InvOpKind::InvOp3b => None,
    };
    RemovabilityCertificate {
        vertex: w,
        inv_op: t.op,
        restored,
        new_deficient,
        stub_before: sg.deficient(),
    }
}

/// A certificate for DP-removing `w`, or the reason none exists.
///
/// The applicable inverse operation is forced by the parity of the degree of
/// `w` in `G^s` and by where the stub-edge sits. One maximum matching of the
/// complement of the relevant neighborhood decides existence; for InvOp2 the
/// vertex it leaves uncovered becomes deficient.
pub fn check_removal(
    sg: &StubGraph,
    w: VertexId,
) -> Result<Result<RemovabilityCertificate, Blocked>, ReduceError> {
    let t = match target(sg, w)? {
        Ok(t) => t,
        Err(b) => return Ok(Err(b)),
    };
    let h = complement_graph(sg.graph(), &t);
    let m = maximum_matching(&h);
    if m.len() < t.pairs {
        return Ok(Err(Blocked::NoMatching(t.op)));
    }
    let restored = m
        .edges()
        .iter()
        .map(|e| local_to_ext(&t, e.u().index(), e.v().index()))
        .collect();
    Ok(Ok(certificate_from(sg, w, &t, restored)))
}

/// [`check_removal`] without the reason.
pub fn removability(
    sg: &StubGraph,
    w: VertexId,
) -> Result<Option<RemovabilityCertificate>, ReduceError> {
    Ok(check_removal(sg, w)?.ok())
}

/// Every certificate for `w`, up to `limit` of them, in lexicographic order
/// of the restored pairs.
pub fn all_certificates(
    sg: &StubGraph,
    w: VertexId,
    limit: usize,
) -> Result<Vec<RemovabilityCertificate>, ReduceError> {
    let t = match target(sg, w)? {
        Ok(t) => t,
        Err(_) => return Ok(Vec::new()),
    };
    let h = complement_graph(sg.graph(), &t);
    let n = h.vertex_count();
    // InvOp2 leaves exactly one vertex out; everything else is a perfect matching.
    let skips = if t.op == InvOpKind::InvOp2 { 1 } else { 0 };
    let mut out = Vec::new();
    let mut used = vec![false; n];
    let mut pairs = Vec::new();
    enumerate(&h, &mut used, &mut pairs, skips, limit, &mut |pairs: &[(usize, usize)]| {
        let restored = pairs.iter().map(|&(a, b)| local_to_ext(&t, a, b)).collect();
        out.push(certificate_from(sg, w, &t, restored));
    });
    Ok(out)
}

fn enumerate(
    h: &Graph,
    used: &mut Vec<bool>,
    pairs: &mut Vec<(usize, usize)>,
    skips: usize,
    limit: usize,
    emit: &mut dyn FnMut(&[(usize, usize)]),
) -> usize {
    let Some(a) = used.iter().position(|&u| !u) else {
        emit(pairs);
        return 1;
    };
    let mut found = 0;
    used[a] = true;
    for &b in h.neighbors(a.into()) {
        if found >= limit {
            break;
        }
        if !used[b.index()] {
            used[b.index()] = true;
            pairs.push((a, b.index()));
            found += enumerate(h, used, pairs, skips, limit - found, emit);
            pairs.pop();
            used[b.index()] = false;
        }
    }
    if skips > 0 && found < limit {
        found += enumerate(h, used, pairs, skips - 1, limit - found, emit);
    }
    used[a] = false;
    found
}

/// Applies a certificate after checking it against the current state.
pub fn dp_remove(sg: &mut StubGraph, cert: &RemovabilityCertificate) -> Result<(), ReduceError> {
    let w = cert.vertex;
    let stale = |m: String| ReduceError::StaleCertificate(w, m);
    let t = match target(sg, w)? {
        Ok(t) => t,
        Err(b) => return Err(stale(format!("vertex is not removable ({b:?})"))),
    };
    if t.op != cert.inv_op {
        return Err(stale(format!("{} applies, not {}", t.op, cert.inv_op)));
    }
    if cert.restored.len() != t.pairs {
        return Err(stale(format!("{} pairs needed", t.pairs)));
    }
    let g = sg.graph();
    let mut covered = Vec::with_capacity(2 * t.pairs);
    let mut stub_pairs = 0;
    for e in &cert.restored {
        match *e {
            ExtEdge::Real(e) => {
                if g.has_edge(e.u(), e.v()) {
                    return Err(stale(format!("{e} is already an edge")));
                }
            }
            ExtEdge::Stub(_) if t.with_stub => stub_pairs += 1,
            ExtEdge::Stub(y) => return Err(stale(format!("pair {y}-s is not available"))),
        }
        for v in e.vertices() {
            if !t.vertices.contains(&v) {
                return Err(stale(format!("{v} is outside the neighborhood")));
            }
            covered.push(v);
        }
    }
    covered.sort_unstable();
    if covered.windows(2).any(|p| p[0] == p[1]) || stub_pairs > 1 {
        return Err(stale("restored pairs overlap".into()));
    }
    let expected = certificate_from(sg, w, &t, cert.restored.clone()).new_deficient;
    let uncovered = t.vertices.len() + usize::from(t.with_stub) - covered.len() - stub_pairs;
    let allowed = if t.op == InvOpKind::InvOp2 { 1 } else { 0 };
    if uncovered != allowed || expected != cert.new_deficient {
        return Err(stale("restored pairs do not cover the neighborhood".into()));
    }
    if cert.stub_before.is_some() && cert.stub_before != sg.deficient() {
        return Err(stale("stub-edge has moved".into()));
    }

    let g = sg.graph_mut();
    g.remove_vertex(w)?;
    for e in &cert.restored {
        if let ExtEdge::Real(e) = e {
            g.add_edge(e.u(), e.v())?;
        }
    }
    sg.set_deficient(expected);
    Ok(())
}

/// The removal that undoes `rec` on the state it produced.
pub fn mirrored_certificate(rec: &DpStepRecord) -> RemovabilityCertificate {
    let real: Vec<ExtEdge> = rec
        .lifted
        .iter()
        .copied()
        .filter(|e| matches!(e, ExtEdge::Real(_)))
        .collect();
    let (inv_op, restored, new_deficient) = match rec.op {
        OpKind::Op1 => (InvOpKind::InvOp1, rec.lifted.clone(), rec.stub_before),
        OpKind::Op2 => (InvOpKind::InvOp2, real, rec.stub_before),
        OpKind::Op3a => (InvOpKind::InvOp3a, rec.lifted.clone(), None),
        OpKind::Op3b => (InvOpKind::InvOp3b, rec.lifted.clone(), None),
    };
    let mut restored = restored;
    restored.sort_unstable();
    RemovabilityCertificate {
        vertex: rec.new_vertex,
        inv_op,
        restored,
        new_deficient,
        stub_before: rec.stub_after,
    }
}

/// Whether no vertex can be DP-removed; otherwise the smallest removable id.
pub fn is_irreducible(sg: &StubGraph) -> (bool, Option<VertexId>) {
    for v in sg.graph().vertices() {
        if removability(sg, v).expect("live vertex").is_some() {
            return (false, Some(v));
        }
    }
    (true, None)
}
