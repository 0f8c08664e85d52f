//! Matchings: maximum-cardinality search on general graphs, selection
//! strategies for fixed-size matchings, degree-based lower bounds on the
//! matching number, and the Jerrum–Sinclair chain on bipartite graphs.

mod blossom;
mod bounds;
mod js;
mod strategy;

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Edge, Graph, VertexId};

pub use blossom::{maximum_matching, IncrementalMatching};
pub use bounds::{
    generalized_vizing_bound, matching_bound_report, posa_lower_bound, vizing_lower_bound,
    GeneralizedVizingVariant, MatchingBoundReport,
};
pub use js::{bipartition, js_chain_step, run_js_chain, JsState};
pub use strategy::{find_matching_of_size, random_subset, MatchingStrategy};

/// Why a matching of the requested size was not produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Infeasibility {
    /// The matching number is smaller than the request.
    Proven,
    /// A matching of that size exists but the strategy did not find one.
    StrategyFailed,
    /// The strategy does not apply to this graph.
    StrategyInapplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("no matching of size {requested} ({reason:?}; best known size {available})")]
    SizeInfeasible {
        requested: usize,
        available: usize,
        reason: Infeasibility,
    },
    #[error("graph is not bipartite")]
    NotBipartite,
    #[error("invalid chain state: {0}")]
    InvalidState(String),
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("graph has fewer than two vertices")]
    TooSmall,
    #[error("edges {0} and {1} share an endpoint")]
    NotDisjoint(Edge, Edge),
    #[error("edge {0} is not in the graph")]
    MissingEdge(Edge),
}

/// Pairwise vertex-disjoint edges, kept in the order they were selected.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Matching {
    edges: Vec<Edge>,
}

impl Matching {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_edges(edges: Vec<Edge>) -> Result<Self, MatchingError> {
        let mut ends: Vec<(VertexId, usize)> = edges
            .iter()
            .enumerate()
            .flat_map(|(i, e)| e.endpoints().map(|x| (x, i)))
            .collect();
        ends.sort_unstable();
        if let Some(w) = ends.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(MatchingError::NotDisjoint(edges[w[0].1], edges[w[1].1]));
        }
        Ok(Matching { edges })
    }

    pub fn push(&mut self, e: Edge) -> Result<(), MatchingError> {
        if let Some(f) = self
            .edges
            .iter()
            .find(|f| f.contains(e.u()) || f.contains(e.v()))
        {
            return Err(MatchingError::NotDisjoint(*f, e));
        }
        self.edges.push(e);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn into_edges(self) -> Vec<Edge> {
        self.edges
    }

    /// Covered vertices, in edge order and canonical endpoint order.
    pub fn covered(&self) -> Vec<VertexId> {
        self.edges.iter().flat_map(|e| e.endpoints()).collect()
    }

    pub fn covers(&self, v: VertexId) -> bool {
        self.edges.iter().any(|e| e.contains(v))
    }

    pub fn mate_of(&self, v: VertexId) -> Option<VertexId> {
        self.edges.iter().find_map(|e| e.other(v))
    }

    /// Same edge set irrespective of order.
    pub fn same_edges(&self, other: &Matching) -> bool {
        let mut a = self.edges.clone();
        let mut b = other.edges.clone();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    }

    /// Checks disjointness and that every edge is present in `g`.
    pub fn validate_in(&self, g: &Graph) -> Result<(), MatchingError> {
        let mut seen: HashMap<VertexId, Edge> = HashMap::new();
        for &e in &self.edges {
            if !g.has_edge(e.u(), e.v()) {
                return Err(MatchingError::MissingEdge(e));
            }
            for x in e.endpoints() {
                if let Some(f) = seen.insert(x, e) {
                    return Err(MatchingError::NotDisjoint(f, e));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_rejects_shared_endpoint() {
        let mut m = Matching::new();
        m.push(Edge::from_indices(0, 1)).unwrap();
        assert!(matches!(
            m.push(Edge::from_indices(1, 2)),
            Err(MatchingError::NotDisjoint(_, _))
        ));
        m.push(Edge::from_indices(3, 2)).unwrap();
        assert_eq!(m.covered(), vec![0usize.into(), 1.into(), 2.into(), 3.into()]);
        assert_eq!(m.mate_of(3usize.into()), Some(2usize.into()));
    }
}
