use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::GrowthError;
use crate::graph::{Edge, ExtEdge, StubGraph, VertexId};
use crate::matching::{
    bipartition, find_matching_of_size, maximum_matching, Infeasibility,
    Matching, MatchingError, MatchingStrategy,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    Op1,
    Op2,
    Op3a,
    Op3b,
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OpKind::Op1 => "op1",
            OpKind::Op2 => "op2",
            OpKind::Op3a => "op3a",
            OpKind::Op3b => "op3b",
        })
    }
}

impl FromStr for OpKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "op1" => Ok(OpKind::Op1),
            "op2" => Ok(OpKind::Op2),
            "op3a" => Ok(OpKind::Op3a),
            "op3b" => Ok(OpKind::Op3b),
            _ => Err(format!("unknown operation {s:?}")),
        }
    }
}

/// One completed DP-step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DpStepRecord {
    pub new_vertex: VertexId,
    pub p_degree: usize,
    pub op: OpKind,
    /// Position in `∪M` of the vertex that loses its edge to `w` (Op3b), or 0 (Op3a).
    pub r: Option<usize>,
    /// Lifted edges in selection order; may contain the stub-edge.
    pub lifted: Vec<ExtEdge>,
    pub stub_before: Option<VertexId>,
    pub stub_after: Option<VertexId>,
    /// Matching number of the graph the step was applied to, when the
    /// protocol computed it.
    pub nu: Option<usize>,
}

impl DpStepRecord {
    /// The lifted edges of the graph itself, without the stub-edge.
    pub fn matching(&self) -> Matching {
        let edges = self
            .lifted
            .iter()
            .filter_map(|e| match e {
                ExtEdge::Real(e) => Some(*e),
                ExtEdge::Stub(_) => None,
            })
            .collect();
        Matching::from_edges(edges).expect("recorded lifts are disjoint")
    }

    /// Change in the edge count caused by the step.
    pub fn edge_delta(&self) -> isize {
        let lifts = self.lifted.len() as isize;
        if self.op == OpKind::Op3b {
            lifts - 1
        } else {
            lifts
        }
    }
}

/// Covered vertices of `lifts` in selection order, endpoints in canonical
/// order; the stub-node is skipped.
pub fn covered_in_order(lifts: &[ExtEdge]) -> Vec<VertexId> {
    lifts.iter().flat_map(|e| e.vertices()).collect()
}

fn op_for(
    sg: &StubGraph,
    p: usize,
    r: Option<usize>,
) -> Result<(OpKind, usize), GrowthError> {
    let k = p / 2;
    if p % 2 == 0 {
        if r.is_some() {
            return Err(GrowthError::StubMismatch("r given for an even p-degree".into()));
        }
        return Ok((OpKind::Op1, k));
    }
    match (sg.deficient(), r) {
        (Some(_), None) => Ok((OpKind::Op2, k + 1)),
        (Some(_), Some(_)) => Err(GrowthError::StubMismatch(
            "r given while a stub-edge is present (Op2 applies)".into(),
        )),
        (None, None) => Err(GrowthError::StubMismatch(
            "odd p-degree without stub-edge needs r".into(),
        )),
        (None, Some(0)) => Ok((OpKind::Op3a, k)),
        (None, Some(r)) if r <= 2 * k + 2 => Ok((OpKind::Op3b, k + 1)),
        (None, Some(r)) => Err(GrowthError::BadR { r, max: 2 * k + 2 }),
    }
}

/// Applies a DP-step with an explicit set of lifted edges.
///
/// `new_id` reuses a tombstoned id (when undoing a removal); otherwise a
/// fresh id is allocated. The state is left untouched on error.
pub fn apply_step(
    sg: &mut StubGraph,
    p_degree: usize,
    lifted: &[ExtEdge],
    r: Option<usize>,
    new_id: Option<VertexId>,
) -> Result<DpStepRecord, GrowthError> {
    let (op, size) = op_for(sg, p_degree, r)?;
    if lifted.len() != size {
        return Err(GrowthError::InvalidLift(format!(
            "{op} with p-degree {p_degree} lifts {size} edges, got {}",
            lifted.len()
        )));
    }
    let stub_before = sg.deficient();
    let mut seen: Vec<VertexId> = Vec::with_capacity(2 * size);
    let mut stub_lift = None;
    for e in lifted {
        match *e {
            ExtEdge::Real(e) => {
                if !sg.graph().has_edge(e.u(), e.v()) {
                    return Err(GrowthError::InvalidLift(format!("{e} is not an edge")));
                }
            }
            ExtEdge::Stub(x) => {
                if stub_before != Some(x) {
                    return Err(GrowthError::InvalidLift(format!("{x}-s is not the stub-edge")));
                }
                stub_lift = Some(x);
            }
        }
        seen.extend(e.vertices());
    }
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(GrowthError::InvalidLift("lifted edges share an endpoint".into()));
    }
    match op {
        OpKind::Op2 if stub_lift.is_none() => {
            return Err(GrowthError::InvalidLift("Op2 must lift the stub-edge".into()))
        }
        OpKind::Op3a | OpKind::Op3b if stub_lift.is_some() => unreachable!("no stub present"),
        _ => {}
    }
    if let Some(id) = new_id {
        if sg.graph().contains(id) || id.index() >= sg.graph().id_bound() {
            return Err(GrowthError::InvalidLift(format!("{id} is not a tombstoned id")));
        }
    }

    let g = sg.graph_mut();
    let w = match new_id {
        Some(id) => {
            g.revive_vertex(id)?;
            id
        }
        None => g.add_vertex(),
    };
    for e in lifted {
        match *e {
            ExtEdge::Real(e) => {
                g.remove_edge(e.u(), e.v())?;
                g.add_edge(e.u(), w)?;
                g.add_edge(w, e.v())?;
            }
            ExtEdge::Stub(x) => g.add_edge(x, w)?,
        }
    }
    let stub_after = match op {
        OpKind::Op1 if stub_lift.is_some() => Some(w),
        OpKind::Op1 => stub_before,
        OpKind::Op2 => None,
        OpKind::Op3a => Some(w),
        OpKind::Op3b => {
            let r = r.expect("Op3b has r");
            let u = covered_in_order(lifted)[r - 1];
            g.remove_edge(u, w)?;
            Some(u)
        }
    };
    sg.set_deficient(stub_after);
    Ok(DpStepRecord {
        new_vertex: w,
        p_degree,
        op,
        r,
        lifted: lifted.to_vec(),
        stub_before,
        stub_after,
        nu: None,
    })
}

/// Where the requested lifts must come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum LiftPool {
    /// `k` edges of `G^s`; the stub-edge may be among them.
    Any(usize),
    /// The stub-edge plus `k` edges of `G` avoiding the deficient vertex.
    WithStub(usize),
    /// `k` edges of `G`.
    GraphOnly(usize),
}

impl LiftPool {
    pub(crate) fn for_op(op: OpKind, p: usize) -> LiftPool {
        let k = p / 2;
        match op {
            OpKind::Op1 => LiftPool::Any(k),
            OpKind::Op2 => LiftPool::WithStub(k),
            OpKind::Op3a => LiftPool::GraphOnly(k),
            OpKind::Op3b => LiftPool::GraphOnly(k + 1),
        }
    }
}

/// Chooses lifts from a maximum matching `max` of the graph: a uniform subset
/// of the pool described in [`LiftPool`]. The stub-edge joins the pool for
/// Op1 only when its vertex is free in `max`.
pub(crate) fn lifts_from_maximum<R: Rng + ?Sized>(
    max: &[Edge],
    deficient: Option<VertexId>,
    pool: LiftPool,
    rng: &mut R,
) -> Result<Vec<ExtEdge>, GrowthError> {
    let no_matching = |k: usize, available: usize| GrowthError::NoMatching {
        k,
        available,
        reason: Infeasibility::Proven,
    };
    match pool {
        LiftPool::Any(k) | LiftPool::GraphOnly(k) => {
            let mut all: Vec<ExtEdge> = max.iter().map(|&e| ExtEdge::Real(e)).collect();
            if let (LiftPool::Any(_), Some(x)) = (pool, deficient) {
                if !max.iter().any(|e| e.contains(x)) {
                    all.push(ExtEdge::Stub(x));
                }
            }
            if all.len() < k {
                return Err(no_matching(k, all.len()));
            }
            Ok(subset(&all, k, rng))
        }
        LiftPool::WithStub(k) => {
            let x = deficient.ok_or_else(|| GrowthError::StubMismatch("no stub-edge".into()))?;
            let all: Vec<ExtEdge> = max
                .iter()
                .filter(|e| !e.contains(x))
                .map(|&e| ExtEdge::Real(e))
                .collect();
            if all.len() < k {
                return Err(no_matching(k + 1, all.len() + 1));
            }
            let mut lifts = subset(&all, k, rng);
            lifts.push(ExtEdge::Stub(x));
            Ok(lifts)
        }
    }
}

fn subset<R: Rng + ?Sized>(pool: &[ExtEdge], k: usize, rng: &mut R) -> Vec<ExtEdge> {
    rand::seq::index::sample(rng, pool.len(), k)
        .into_iter()
        .map(|i| pool[i])
        .collect()
}

/// Greedy selection over a shuffled edge order of `G^s`.
fn lifts_greedy<R: Rng + ?Sized>(
    sg: &StubGraph,
    pool: LiftPool,
    rng: &mut R,
) -> Result<Vec<ExtEdge>, GrowthError> {
    let g = sg.graph();
    let mut used = vec![false; g.id_bound()];
    let mut out = Vec::new();
    let mut candidates: Vec<ExtEdge> = g.edges().map(ExtEdge::Real).collect();
    let (k, need) = match pool {
        LiftPool::Any(k) => {
            if let Some(x) = sg.deficient() {
                candidates.push(ExtEdge::Stub(x));
            }
            (k, k)
        }
        LiftPool::GraphOnly(k) => (k, k),
        LiftPool::WithStub(k) => {
            let x = sg
                .deficient()
                .ok_or_else(|| GrowthError::StubMismatch("no stub-edge".into()))?;
            used[x.index()] = true;
            (k, k + 1)
        }
    };
    candidates.shuffle(rng);
    for e in candidates {
        if out.len() == k {
            break;
        }
        if e.vertices().all(|v| !used[v.index()]) {
            e.vertices().for_each(|v| used[v.index()] = true);
            out.push(e);
        }
    }
    if let LiftPool::WithStub(_) = pool {
        out.push(ExtEdge::Stub(sg.deficient().expect("checked")));
    }
    if out.len() == need {
        return Ok(out);
    }
    let available = exact_pool_size(sg, pool);
    Err(GrowthError::NoMatching {
        k: need,
        available: out.len(),
        reason: if available < need {
            Infeasibility::Proven
        } else {
            Infeasibility::StrategyFailed
        },
    })
}

/// Largest number of lifts the pool admits.
fn exact_pool_size(sg: &StubGraph, pool: LiftPool) -> usize {
    let g = sg.graph();
    match (pool, sg.deficient()) {
        (LiftPool::GraphOnly(_), _) | (LiftPool::Any(_), None) => maximum_matching(g).len(),
        (LiftPool::Any(_), Some(x)) => {
            let mut h = g.clone();
            let s = h.add_vertex();
            h.add_edge(x, s).expect("fresh vertex");
            maximum_matching(&h).len()
        }
        (LiftPool::WithStub(_), Some(x)) => {
            let mut h = g.clone();
            h.remove_vertex(x).expect("live");
            maximum_matching(&h).len() + 1
        }
        (LiftPool::WithStub(_), None) => 0,
    }
}

/// Selects lifts for one step with the given strategy.
pub(crate) fn choose_lifts<R: Rng + ?Sized>(
    sg: &StubGraph,
    pool: LiftPool,
    strategy: MatchingStrategy,
    rng: &mut R,
) -> Result<Vec<ExtEdge>, GrowthError> {
    match strategy {
        MatchingStrategy::MaximumThenSubset => {
            let max = maximum_matching(sg.graph());
            lifts_from_maximum(max.edges(), sg.deficient(), pool, rng)
        }
        MatchingStrategy::Greedy => lifts_greedy(sg, pool, rng),
        MatchingStrategy::NearUniformBipartiteJs { .. } => {
            let k = match pool {
                LiftPool::Any(k) | LiftPool::GraphOnly(k) => k,
                LiftPool::WithStub(k) => {
                    return Err(GrowthError::NoMatching {
                        k: k + 1,
                        available: 0,
                        reason: Infeasibility::StrategyInapplicable,
                    })
                }
            };
            if bipartition(sg.graph()).is_none() {
                return Err(GrowthError::Matching(MatchingError::NotBipartite));
            }
            match find_matching_of_size(sg.graph(), k, strategy, rng) {
                Ok(m) => Ok(m.into_edges().into_iter().map(ExtEdge::Real).collect()),
                Err(MatchingError::SizeInfeasible {
                    requested,
                    available,
                    reason,
                }) => Err(GrowthError::NoMatching {
                    k: requested,
                    available,
                    reason,
                }),
                Err(e) => Err(e.into()),
            }
        }
    }
}

/// A DP-step inserting a vertex of p-degree `2k` (Op1).
pub fn dp_step_even<R: Rng + ?Sized>(
    sg: &mut StubGraph,
    k: usize,
    strategy: MatchingStrategy,
    rng: &mut R,
) -> Result<DpStepRecord, GrowthError> {
    let lifts = choose_lifts(sg, LiftPool::Any(k), strategy, rng)?;
    apply_step(sg, 2 * k, &lifts, None, None)
}

/// A DP-step inserting a vertex of p-degree `2k + 1`: Op2 when a stub-edge
/// is present (then `r` must be `None`), otherwise Op3a (`r = 0`) or Op3b
/// (`1 <= r <= 2k + 2`).
pub fn dp_step_odd<R: Rng + ?Sized>(
    sg: &mut StubGraph,
    k: usize,
    r: Option<usize>,
    strategy: MatchingStrategy,
    rng: &mut R,
) -> Result<DpStepRecord, GrowthError> {
    let p = 2 * k + 1;
    let (op, _) = op_for(sg, p, r)?;
    let lifts = choose_lifts(sg, LiftPool::for_op(op, p), strategy, rng)?;
    apply_step(sg, p, &lifts, r, None)
}
