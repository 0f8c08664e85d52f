//! Simple undirected graphs with stable vertex identities, and the stub
//! extension used to carry a single odd-degree deficit between steps.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod generators;

/// Dense vertex identifier. Ids are handed out in insertion order and a
/// removed id stays tombstoned until it is explicitly revived.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for VertexId {
    #[inline]
    fn from(i: usize) -> Self {
        VertexId(u32::try_from(i).expect("vertex id overflows u32"))
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Unordered vertex pair stored as `(min, max)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    u: VertexId,
    v: VertexId,
}

impl Edge {
    /// Canonical edge between two distinct vertices.
    ///
    /// Panics if `a == b`; use [`Edge::try_new`] for untrusted input.
    pub fn new(a: VertexId, b: VertexId) -> Self {
        Self::try_new(a, b).expect("edge endpoints must differ")
    }

    pub fn try_new(a: VertexId, b: VertexId) -> Option<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Edge { u: a, v: b }),
            std::cmp::Ordering::Greater => Some(Edge { u: b, v: a }),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn from_indices(a: usize, b: usize) -> Self {
        Edge::new(a.into(), b.into())
    }

    #[inline]
    pub fn u(&self) -> VertexId {
        self.u
    }

    #[inline]
    pub fn v(&self) -> VertexId {
        self.v
    }

    #[inline]
    pub fn endpoints(&self) -> [VertexId; 2] {
        [self.u, self.v]
    }

    pub fn contains(&self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }

    /// The endpoint that is not `x`, if `x` is an endpoint.
    pub fn other(&self, x: VertexId) -> Option<VertexId> {
        if self.u == x {
            Some(self.v)
        } else if self.v == x {
            Some(self.u)
        } else {
            None
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.u, self.v)
    }
}

/// An edge of the extended graph `G^s`: an ordinary edge, or the pair
/// `x s` between a vertex and the stub-node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtEdge {
    Real(Edge),
    Stub(VertexId),
}

impl ExtEdge {
    /// Endpoints other than the stub-node, in canonical order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        let (a, b) = match *self {
            ExtEdge::Real(e) => (e.u(), Some(e.v())),
            ExtEdge::Stub(x) => (x, None),
        };
        std::iter::once(a).chain(b)
    }

    pub fn contains(&self, x: VertexId) -> bool {
        self.vertices().any(|v| v == x)
    }
}

impl From<Edge> for ExtEdge {
    fn from(e: Edge) -> Self {
        ExtEdge::Real(e)
    }
}

impl fmt::Display for ExtEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtEdge::Real(e) => write!(f, "{e}"),
            ExtEdge::Stub(x) => write!(f, "{x}-s"),
        }
    }
}

impl std::str::FromStr for ExtEdge {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once('-')
            .ok_or_else(|| format!("expected `u-v` or `x-s`, got {s:?}"))?;
        let id = |t: &str| {
            t.parse::<u32>()
                .map(VertexId)
                .map_err(|_| format!("bad vertex id {t:?} in {s:?}"))
        };
        let a = id(a)?;
        if b == "s" {
            return Ok(ExtEdge::Stub(a));
        }
        Edge::try_new(a, id(b)?)
            .map(ExtEdge::Real)
            .ok_or_else(|| format!("loop pair {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("loop edge at vertex {0}")]
    LoopEdge(VertexId),
    #[error("edge {0}-{1} already present")]
    DuplicateEdge(VertexId, VertexId),
    #[error("edge {0}-{1} not present")]
    MissingEdge(VertexId, VertexId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("vertex {0} is live and cannot be revived")]
    VertexAlive(VertexId),
    #[error("adjacency invariant broken at vertex {0}: {1}")]
    Corrupt(VertexId, &'static str),
}

/// Undirected simple graph over dense ids with tombstones.
///
/// Adjacency lists are kept sorted, which gives set semantics, cheap
/// membership tests by binary search and fast contiguous iteration for the
/// matching code.
#[derive(Clone, Debug, Default)]
pub struct Graph {
    adj: Vec<Vec<VertexId>>,
    alive: Vec<bool>,
    n: usize,
    m: usize,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Graph with `n` isolated vertices `0..n`.
    pub fn with_vertices(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            alive: vec![true; n],
            n,
            m: 0,
        }
    }

    /// Builds a graph on `0..n` from an edge list, rejecting loops and duplicates.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::with_vertices(n);
        for (a, b) in edges {
            g.add_edge(a.into(), b.into())?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self) -> VertexId {
        let id = VertexId::from(self.adj.len());
        self.adj.push(Vec::new());
        self.alive.push(true);
        self.n += 1;
        id
    }

    /// Brings a tombstoned id back as an isolated vertex. Only used when a
    /// recorded removal is undone.
    pub fn revive_vertex(&mut self, v: VertexId) -> Result<(), GraphError> {
        match self.alive.get(v.index()) {
            Some(true) => Err(GraphError::VertexAlive(v)),
            Some(false) => {
                self.alive[v.index()] = true;
                self.n += 1;
                Ok(())
            }
            None => Err(GraphError::UnknownVertex(v)),
        }
    }

    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        self.alive.get(v.index()).copied().unwrap_or(false)
    }

    fn check(&self, v: VertexId) -> Result<(), GraphError> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(GraphError::UnknownVertex(v))
        }
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(GraphError::LoopEdge(u));
        }
        let pos_u = match self.adj[u.index()].binary_search(&v) {
            Ok(_) => return Err(GraphError::DuplicateEdge(u, v)),
            Err(p) => p,
        };
        self.adj[u.index()].insert(pos_u, v);
        let list_v = &mut self.adj[v.index()];
        let pos_v = list_v.binary_search(&u).unwrap_err();
        list_v.insert(pos_v, u);
        self.m += 1;
        Ok(())
    }

    pub fn remove_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        self.check(u)?;
        self.check(v)?;
        let pos_u = self.adj[u.index()]
            .binary_search(&v)
            .map_err(|_| GraphError::MissingEdge(u, v))?;
        self.adj[u.index()].remove(pos_u);
        let list_v = &mut self.adj[v.index()];
        let pos_v = list_v.binary_search(&u).expect("asymmetric adjacency");
        list_v.remove(pos_v);
        self.m -= 1;
        Ok(())
    }

    /// Deletes `v` and its incident edges; the id is tombstoned.
    pub fn remove_vertex(&mut self, v: VertexId) -> Result<(), GraphError> {
        self.check(v)?;
        let nbrs = std::mem::take(&mut self.adj[v.index()]);
        for u in &nbrs {
            let list = &mut self.adj[u.index()];
            let pos = list.binary_search(&v).expect("asymmetric adjacency");
            list.remove(pos);
        }
        self.m -= nbrs.len();
        self.alive[v.index()] = false;
        self.n -= 1;
        Ok(())
    }

    #[inline]
    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adj
            .get(u.index())
            .map(|l| l.binary_search(&v).is_ok())
            .unwrap_or(false)
    }

    /// Sorted neighbor list; empty for tombstoned or unknown ids.
    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        self.adj.get(v.index()).map(Vec::as_slice).unwrap_or(&[])
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        self.neighbors(v).len()
    }

    /// Number of live vertices.
    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.m
    }

    /// One past the largest id ever handed out (live or tombstoned).
    #[inline]
    pub fn id_bound(&self) -> usize {
        self.adj.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.alive
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(i, _)| VertexId::from(i))
    }

    pub fn tombstones(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.alive
            .iter()
            .enumerate()
            .filter(|(_, &a)| !a)
            .map(|(i, _)| VertexId::from(i))
    }

    /// Edges in ascending canonical order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj.iter().enumerate().flat_map(|(i, list)| {
            let u = VertexId::from(i);
            list.iter().filter(move |&&v| v > u).map(move |&v| Edge { u, v })
        })
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Subgraph induced on `vertices`, relabelled to `0..len` in the given order.
    pub fn induced_subgraph(&self, vertices: &[VertexId]) -> Subgraph {
        let mut g = Graph::with_vertices(vertices.len());
        for (i, &a) in vertices.iter().enumerate() {
            for (j, &b) in vertices.iter().enumerate().skip(i + 1) {
                if self.has_edge(a, b) {
                    g.add_edge(i.into(), j.into()).expect("fresh edge");
                }
            }
        }
        Subgraph {
            graph: g,
            labels: vertices.to_vec(),
        }
    }

    /// The graph induced on the neighbors of `v` (without `v`).
    pub fn neighborhood_graph(&self, v: VertexId) -> Result<Subgraph, GraphError> {
        self.check(v)?;
        Ok(self.induced_subgraph(self.neighbors(v)))
    }

    /// Complement on the same vertex set (tombstones are kept as tombstones).
    pub fn complement(&self) -> Graph {
        let live: Vec<VertexId> = self.vertices().collect();
        let mut adj = vec![Vec::new(); self.adj.len()];
        let mut m = 0;
        for &u in &live {
            let mut it = self.adj[u.index()].iter().peekable();
            let list: &mut Vec<VertexId> = &mut adj[u.index()];
            for &v in &live {
                while it.peek().is_some_and(|&&x| x < v) {
                    it.next();
                }
                let is_nbr = it.peek().is_some_and(|&&x| x == v);
                if v != u && !is_nbr {
                    list.push(v);
                    if v > u {
                        m += 1;
                    }
                }
            }
        }
        Graph {
            adj,
            alive: self.alive.clone(),
            n: self.n,
            m,
        }
    }

    pub fn degree_histogram(&self) -> DegreeHistogram {
        let mut counts = BTreeMap::new();
        for v in self.vertices() {
            *counts.entry(self.degree(v)).or_insert(0) += 1;
        }
        DegreeHistogram { counts }
    }

    /// Checks symmetry, loop-freeness, sortedness and the edge counter.
    pub fn validate(&self) -> Result<(), GraphError> {
        let mut half = 0usize;
        for (i, list) in self.adj.iter().enumerate() {
            let u = VertexId::from(i);
            if !self.alive[i] && !list.is_empty() {
                return Err(GraphError::Corrupt(u, "tombstone with neighbors"));
            }
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(GraphError::Corrupt(u, "adjacency not strictly sorted"));
            }
            for &v in list {
                if v == u {
                    return Err(GraphError::LoopEdge(u));
                }
                if !self.contains(v) {
                    return Err(GraphError::Corrupt(u, "neighbor is not live"));
                }
                if self.adj[v.index()].binary_search(&u).is_err() {
                    return Err(GraphError::Corrupt(u, "asymmetric adjacency"));
                }
            }
            half += list.len();
        }
        if half != 2 * self.m {
            return Err(GraphError::Corrupt(VertexId(0), "edge counter mismatch"));
        }
        if self.alive.iter().filter(|&&a| a).count() != self.n {
            return Err(GraphError::Corrupt(VertexId(0), "vertex counter mismatch"));
        }
        Ok(())
    }

    /// Connected components of the live vertices, each sorted, ordered by
    /// smallest member.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let mut seen = vec![false; self.adj.len()];
        let mut out = Vec::new();
        for s in self.vertices() {
            if seen[s.index()] {
                continue;
            }
            seen[s.index()] = true;
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &v in self.neighbors(u) {
                    if !seen[v.index()] {
                        seen[v.index()] = true;
                        comp.push(v);
                        stack.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn component_count(&self) -> usize {
        self.components().len()
    }

    /// Disjoint union; vertices of `other` are appended after the id bound of
    /// `self`. Returns the id offset used for `other`.
    pub fn append_disjoint(&mut self, other: &Graph) -> usize {
        let offset = self.adj.len();
        for (i, list) in other.adj.iter().enumerate() {
            self.adj
                .push(list.iter().map(|v| VertexId::from(v.index() + offset)).collect());
            self.alive.push(other.alive[i]);
        }
        self.n += other.n;
        self.m += other.m;
        offset
    }

    pub fn is_regular(&self, d: usize) -> bool {
        self.vertices().all(|v| self.degree(v) == d)
    }
}

impl PartialEq for Graph {
    /// Two graphs are equal when they have the same live ids and the same
    /// edges; trailing tombstones are ignored.
    fn eq(&self, other: &Self) -> bool {
        if self.n != other.n || self.m != other.m {
            return false;
        }
        self.vertices().eq(other.vertices())
            && self
                .vertices()
                .all(|v| self.neighbors(v) == other.neighbors(v))
    }
}

impl Eq for Graph {}

/// A relabelled subgraph together with the original id of each vertex.
#[derive(Clone, Debug)]
pub struct Subgraph {
    pub graph: Graph,
    pub labels: Vec<VertexId>,
}

/// `D_i` counts and their cumulative forms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeHistogram {
    pub counts: BTreeMap<usize, usize>,
}

impl DegreeHistogram {
    /// `D_i`: vertices of degree exactly `i`.
    pub fn count(&self, i: usize) -> usize {
        self.counts.get(&i).copied().unwrap_or(0)
    }

    /// `D_{<=q}`: vertices whose degree does not exceed `q`.
    pub fn at_most(&self, q: usize) -> usize {
        self.counts.range(..=q).map(|(_, c)| c).sum()
    }

    /// `D_{>=i}`: vertices with degree at least `i`.
    pub fn at_least(&self, i: usize) -> usize {
        self.counts.range(i..).map(|(_, c)| c).sum()
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    /// `sum_i i * D_i`, i.e. twice the edge count.
    pub fn degree_sum(&self) -> usize {
        self.counts.iter().map(|(d, c)| d * c).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StubError {
    #[error("deficient vertex {0} is not a live vertex")]
    NotLive(VertexId),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A graph together with at most one degree-deficient vertex.
///
/// The stub-node and its stub-edge are implicit: if `deficient` is `x`, the
/// extended graph contains the edge `xs`, which is not stored in `graph`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StubGraph {
    graph: Graph,
    deficient: Option<VertexId>,
}

impl StubGraph {
    pub fn new(graph: Graph) -> Self {
        StubGraph {
            graph,
            deficient: None,
        }
    }

    pub fn with_deficient(graph: Graph, deficient: Option<VertexId>) -> Result<Self, StubError> {
        if let Some(x) = deficient {
            if !graph.contains(x) {
                return Err(StubError::NotLive(x));
            }
        }
        Ok(StubGraph { graph, deficient })
    }

    #[inline]
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    #[inline]
    pub fn deficient(&self) -> Option<VertexId> {
        self.deficient
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    /// Intrinsic degree: actual degree plus one for the deficient vertex.
    pub fn p_degree(&self, v: VertexId) -> usize {
        self.graph.degree(v) + usize::from(self.deficient == Some(v))
    }

    pub(crate) fn graph_mut(&mut self) -> &mut Graph {
        &mut self.graph
    }

    pub(crate) fn set_deficient(&mut self, x: Option<VertexId>) {
        debug_assert!(x.map_or(true, |x| self.graph.contains(x)));
        self.deficient = x;
    }

    pub fn validate(&self) -> Result<(), StubError> {
        self.graph.validate()?;
        match self.deficient {
            Some(x) if !self.graph.contains(x) => Err(StubError::NotLive(x)),
            _ => Ok(()),
        }
    }
}

impl From<Graph> for StubGraph {
    fn from(g: Graph) -> Self {
        StubGraph::new(g)
    }
}

#[cfg(test)]
mod tests {
    use super::generators::*;
    use super::*;
    use proptest::prelude::*;

    fn v(i: usize) -> VertexId {
        VertexId::from(i)
    }

    #[test]
    fn add_vertex_counts() {
        let mut g = Graph::new();
        g.add_vertex();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 0));

        let mut k3 = complete(3);
        k3.add_vertex();
        assert_eq!((k3.vertex_count(), k3.edge_count()), (4, 3));

        let mut g = Graph::new();
        for _ in 0..5 {
            g.add_vertex();
        }
        assert_eq!(g.vertex_count(), 5);
        assert!(g.vertices().all(|x| g.degree(x) == 0));
    }

    #[test]
    fn add_edge_errors() {
        let mut g = Graph::with_vertices(2);
        g.add_edge(v(0), v(1)).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.add_edge(v(0), v(0)), Err(GraphError::LoopEdge(v(0))));
        assert_eq!(
            g.add_edge(v(1), v(0)),
            Err(GraphError::DuplicateEdge(v(1), v(0)))
        );
        assert_eq!(g.add_edge(v(0), v(7)), Err(GraphError::UnknownVertex(v(7))));
    }

    #[test]
    fn removals() {
        let mut k4 = complete(4);
        k4.remove_edge(v(0), v(1)).unwrap();
        assert_eq!(k4.edge_count(), 5);
        assert_eq!(
            k4.remove_edge(v(0), v(1)),
            Err(GraphError::MissingEdge(v(0), v(1)))
        );

        let mut c5 = cycle(5);
        c5.remove_vertex(v(2)).unwrap();
        assert_eq!((c5.vertex_count(), c5.edge_count()), (4, 3));
        assert_eq!(c5.degree_histogram().counts, BTreeMap::from([(1, 2), (2, 2)]));
        assert_eq!(c5.remove_vertex(v(2)), Err(GraphError::UnknownVertex(v(2))));
        c5.validate().unwrap();
    }

    #[test]
    fn revive_only_tombstones() {
        let mut g = complete(3);
        assert_eq!(g.revive_vertex(v(1)), Err(GraphError::VertexAlive(v(1))));
        g.remove_vertex(v(1)).unwrap();
        g.revive_vertex(v(1)).unwrap();
        assert_eq!(g.degree(v(1)), 0);
        assert_eq!(g.vertex_count(), 3);
    }

    #[test]
    fn neighborhoods() {
        let star = star(4);
        let nb = star.neighborhood_graph(v(0)).unwrap();
        assert_eq!((nb.graph.vertex_count(), nb.graph.edge_count()), (4, 0));

        let nb = complete(4).neighborhood_graph(v(2)).unwrap();
        assert_eq!((nb.graph.vertex_count(), nb.graph.edge_count()), (3, 3));
        assert!(complete(4).neighborhood_graph(v(9)).is_err());
    }

    #[test]
    fn complements() {
        let c = complete(4).complement();
        assert_eq!((c.vertex_count(), c.edge_count()), (4, 0));
        let c5 = cycle(5);
        let cc = c5.complement();
        // C5 maps onto its complement via i -> 2i mod 5.
        for e in c5.edges() {
            let (a, b) = (e.u().index(), e.v().index());
            assert!(cc.has_edge(v(2 * a % 5), v(2 * b % 5)));
        }
        assert_eq!(cc.edge_count(), 5);
    }

    #[test]
    fn histograms() {
        assert_eq!(complete(4).degree_histogram().counts, BTreeMap::from([(3, 4)]));
        let h = path(3).degree_histogram();
        assert_eq!(h.counts, BTreeMap::from([(1, 2), (2, 1)]));
        assert_eq!(h.at_most(1), 2);
        assert_eq!(h.at_least(2), 1);
    }

    #[test]
    fn stub_graph_p_degree() {
        let sg = StubGraph::with_deficient(complete(3), Some(v(1))).unwrap();
        assert_eq!(sg.p_degree(v(1)), 3);
        assert_eq!(sg.p_degree(v(0)), 2);
        assert!(StubGraph::with_deficient(complete(3), Some(v(5))).is_err());
    }

    #[test]
    fn equality_ignores_trailing_tombstones() {
        let mut g = complete(3);
        let w = g.add_vertex();
        g.remove_vertex(w).unwrap();
        assert_eq!(g, complete(3));
    }

    proptest! {
        #[test]
        fn complement_involution_and_counts(n in 0usize..10, bits in any::<u64>()) {
            let mut g = Graph::with_vertices(n);
            let mut k = 0;
            for a in 0..n {
                for b in a + 1..n {
                    if bits >> (k % 64) & 1 == 1 {
                        g.add_edge(v(a), v(b)).unwrap();
                    }
                    k += 1;
                }
            }
            let c = g.complement();
            c.validate().unwrap();
            prop_assert_eq!(c.edge_count() + g.edge_count(), n * n.saturating_sub(1) / 2);
            prop_assert_eq!(c.complement(), g.clone());
            let h = g.degree_histogram();
            prop_assert_eq!(h.degree_sum(), 2 * g.edge_count());
        }
    }
}
