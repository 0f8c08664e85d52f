// The Jerrum-Sinclair chain on perfect and near-perfect matchings of a
// bipartite graph. Its stationary law is uniform over all such matchings.

use rand::Rng;

use super::{maximum_matching, Matching, MatchingError};
use crate::graph::{Edge, Graph, VertexId};

const NONE: u32 = u32::MAX;

/// A state of the chain: a perfect matching, or a matching that misses
/// exactly the two `holes`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JsState {
    Perfect(Matching),
    NearPerfect {
        matching: Matching,
        holes: (VertexId, VertexId),
    },
}

impl JsState {
    pub fn matching(&self) -> &Matching {
        match self {
            JsState::Perfect(m) => m,
            JsState::NearPerfect { matching, .. } => matching,
        }
    }

    pub fn hole_count(&self) -> usize {
        match self {
            JsState::Perfect(_) => 0,
            JsState::NearPerfect { .. } => 2,
        }
    }
}

/// Two-colouring of the live vertices (`true` for the side of the smallest
/// id in each component), or `None` if `g` has an odd cycle.
pub fn bipartition(g: &Graph) -> Option<Vec<bool>> {
    let mut side = vec![None; g.id_bound()];
    for s in g.vertices() {
        if side[s.index()].is_some() {
            continue;
        }
        side[s.index()] = Some(true);
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            let su = side[u.index()].expect("coloured");
            for &v in g.neighbors(u) {
                match side[v.index()] {
                    None => {
                        side[v.index()] = Some(!su);
                        stack.push(v);
                    }
                    Some(sv) if sv == su => return None,
                    Some(_) => {}
                }
            }
        }
    }
    Some(side.into_iter().map(|s| s.unwrap_or(false)).collect())
}

/// One transition of the chain.
///
/// From a perfect matching a uniformly chosen edge is dropped. From a
/// near-perfect matching with holes `u, v` a uniform vertex `x` is drawn: a
/// hole closes the matching with `uv` when that is an edge; otherwise `x`'s
/// partner `y` is swapped for a uniform hole `w` when `xw` is an edge, leaving
/// `y` as the new hole. In every other case the state is kept.
pub fn js_chain_step<R: Rng + ?Sized>(
    g: &Graph,
    state: &JsState,
    rng: &mut R,
) -> Result<JsState, MatchingError> {
    let side = bipartition(g).ok_or(MatchingError::NotBipartite)?;
    let mut chain = JsChain::from_state(g, side, state)?;
    chain.step(g, rng);
    Ok(chain.state())
}

/// Chain state in array form, for long runs.
#[derive(Clone, Debug)]
pub(crate) struct JsChain {
    mate: Vec<u32>,
    holes: Option<(VertexId, VertexId)>,
    live: Vec<VertexId>,
    left: Vec<VertexId>,
}

impl JsChain {
    /// Starts at a maximum matching, which must be perfect.
    pub(crate) fn new(g: &Graph, side: Vec<bool>) -> Result<Self, MatchingError> {
        let m = maximum_matching(g);
        if 2 * m.len() != g.vertex_count() {
            return Err(MatchingError::InvalidState(
                "graph has no perfect matching".into(),
            ));
        }
        JsChain::from_state(g, side, &JsState::Perfect(m))
    }

    pub(crate) fn from_state(
        g: &Graph,
        side: Vec<bool>,
        state: &JsState,
    ) -> Result<Self, MatchingError> {
        let m = state.matching();
        m.validate_in(g)?;
        let mut mate = vec![NONE; g.id_bound()];
        for e in m.edges() {
            mate[e.u().index()] = e.v().0;
            mate[e.v().index()] = e.u().0;
        }
        let live: Vec<VertexId> = g.vertices().collect();
        let holes = match *state {
            JsState::Perfect(_) => None,
            JsState::NearPerfect { holes: (u, v), .. } => {
                if u == v || !g.contains(u) || !g.contains(v) {
                    return Err(MatchingError::InvalidState(format!("bad holes {u}, {v}")));
                }
                Some((u.min(v), u.max(v)))
            }
        };
        let uncovered: Vec<VertexId> = live
            .iter()
            .copied()
            .filter(|v| mate[v.index()] == NONE)
            .collect();
        let expected: Vec<VertexId> = holes.map(|(u, v)| vec![u, v]).unwrap_or_default();
        if uncovered != expected {
            return Err(MatchingError::InvalidState(format!(
                "uncovered vertices {uncovered:?} do not match holes {expected:?}"
            )));
        }
        let left = live.iter().copied().filter(|v| side[v.index()]).collect();
        Ok(JsChain {
            mate,
            holes,
            live,
            left,
        })
    }

    pub(crate) fn is_perfect(&self) -> bool {
        self.holes.is_none()
    }

    pub(crate) fn holes(&self) -> Option<(VertexId, VertexId)> {
        self.holes
    }

    pub(crate) fn step<R: Rng + ?Sized>(&mut self, g: &Graph, rng: &mut R) {
        match self.holes {
            None => {
                if self.left.is_empty() {
                    return;
                }
                // Each matched edge has exactly one endpoint on the left side.
                let a = self.left[rng.gen_range(0..self.left.len())];
                let b = VertexId(self.mate[a.index()]);
                self.mate[a.index()] = NONE;
                self.mate[b.index()] = NONE;
                self.holes = Some((a.min(b), a.max(b)));
            }
            Some((u, v)) => {
                let x = self.live[rng.gen_range(0..self.live.len())];
                if x == u || x == v {
                    if g.has_edge(u, v) {
                        self.mate[u.index()] = v.0;
                        self.mate[v.index()] = u.0;
                        self.holes = None;
                    }
                    return;
                }
                let (w, other) = if rng.gen_bool(0.5) { (u, v) } else { (v, u) };
                if g.has_edge(x, w) {
                    let y = VertexId(self.mate[x.index()]);
                    self.mate[y.index()] = NONE;
                    self.mate[x.index()] = w.0;
                    self.mate[w.index()] = x.0;
                    self.holes = Some((other.min(y), other.max(y)));
                }
            }
        }
    }

    pub(crate) fn matching(&self) -> Matching {
        let edges = self
            .live
            .iter()
            .filter(|v| self.mate[v.index()] != NONE && v.0 < self.mate[v.index()])
            .map(|&v| Edge::new(v, VertexId(self.mate[v.index()])))
            .collect();
        Matching::from_edges(edges).expect("mate array is an involution")
    }

    pub(crate) fn state(&self) -> JsState {
        let matching = self.matching();
        match self.holes {
            None => JsState::Perfect(matching),
            Some(holes) => JsState::NearPerfect { matching, holes },
        }
    }
}

/// Runs the chain from a maximum matching of `g` and calls `visit` after
/// every transition.
pub fn run_js_chain<R, F>(g: &Graph, steps: u64, rng: &mut R, mut visit: F) -> Result<(), MatchingError>
where
    R: Rng + ?Sized,
    F: FnMut(&Matching, Option<(VertexId, VertexId)>),
{
    let side = bipartition(g).ok_or(MatchingError::NotBipartite)?;
    let mut chain = JsChain::new(g, side)?;
    for _ in 0..steps {
        chain.step(g, rng);
        visit(&chain.matching(), chain.holes());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(a: usize, b: usize) -> Edge {
        Edge::from_indices(a, b)
    }

    #[test]
    fn perfect_state_drops_an_edge() {
        let g = cycle(4);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let start = JsState::Perfect(Matching::from_edges(vec![e(0, 1), e(2, 3)]).unwrap());
        let next = js_chain_step(&g, &start, &mut rng).unwrap();
        assert_eq!(next.hole_count(), 2);
        assert_eq!(next.matching().len(), 1);
    }

    #[test]
    fn adjacent_holes_can_close() {
        let g = cycle(4);
        let state = JsState::NearPerfect {
            matching: Matching::from_edges(vec![e(2, 3)]).unwrap(),
            holes: (0usize.into(), 1usize.into()),
        };
        let mut closed = false;
        for seed in 0..32 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let next = js_chain_step(&g, &state, &mut rng).unwrap();
            if let JsState::Perfect(m) = &next {
                assert!(m.same_edges(&Matching::from_edges(vec![e(0, 1), e(2, 3)]).unwrap()));
                closed = true;
            }
            next.matching().validate_in(&g).unwrap();
        }
        assert!(closed);
    }

    #[test]
    fn rejects_bad_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let tri = JsState::Perfect(Matching::new());
        assert_eq!(
            js_chain_step(&complete(3), &tri, &mut rng),
            Err(MatchingError::NotBipartite)
        );
        let wrong = JsState::Perfect(Matching::from_edges(vec![e(0, 1)]).unwrap());
        assert!(matches!(
            js_chain_step(&cycle(4), &wrong, &mut rng),
            Err(MatchingError::InvalidState(_))
        ));
    }

    #[test]
    fn bipartition_detects_odd_cycles() {
        assert!(bipartition(&cycle(6)).is_some());
        assert!(bipartition(&cycle(7)).is_none());
        let side = bipartition(&complete_bipartite(2, 3)).unwrap();
        assert_eq!(side, vec![true, true, false, false, false]);
    }

    #[test]
    fn hole_count_stays_in_range() {
        let g = complete_bipartite(3, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        run_js_chain(&g, 5000, &mut rng, |m, holes| {
            m.validate_in(&g).unwrap();
            assert_eq!(m.len() + holes.map_or(0, |_| 1), 3);
        })
        .unwrap();
    }
}
