use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use super::{all_certificates, dp_remove, removability, RemovabilityCertificate, ReduceError};
use crate::graph::{StubGraph, VertexId};
use crate::growth::apply_step;

/// Largest graph accepted by [`exact_minimum_kernel`].
pub const EXACT_SEARCH_LIMIT: usize = 20;

/// Which removable vertex to take next. Ties go to the smaller id.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderPolicy {
    Random,
    #[default]
    MinDegreeFirst,
    MaxDegreeFirst,
    MostNonEdgesInNeighborhood,
}

impl fmt::Display for OrderPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrderPolicy::Random => "random",
            OrderPolicy::MinDegreeFirst => "min-degree",
            OrderPolicy::MaxDegreeFirst => "max-degree",
            OrderPolicy::MostNonEdgesInNeighborhood => "most-non-edges",
        })
    }
}

impl FromStr for OrderPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(OrderPolicy::Random),
            "min-degree" => Ok(OrderPolicy::MinDegreeFirst),
            "max-degree" => Ok(OrderPolicy::MaxDegreeFirst),
            "most-non-edges" => Ok(OrderPolicy::MostNonEdgesInNeighborhood),
            _ => Err(format!(
                "unknown policy {s:?} (expected random, min-degree, max-degree or most-non-edges)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ReduceOptions {
    pub policy: OrderPolicy,
    /// Maximum number of removals applied, counting ones discarded while
    /// backtracking.
    pub budget: usize,
    /// How many of the most recent choices are revisited once stuck.
    pub backtrack: usize,
    /// Skip removals that would split a component.
    pub preserve_components: bool,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions {
            policy: OrderPolicy::default(),
            budget: usize::MAX,
            backtrack: 0,
            preserve_components: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionResult {
    pub kernel: StubGraph,
    /// Removals in the order applied.
    pub removals: Vec<RemovabilityCertificate>,
    pub removed_count: usize,
    pub irreducible: bool,
}

impl ReductionResult {
    /// Rebuilds the input by undoing the removals in reverse order.
    pub fn reconstruct(&self) -> Result<StubGraph, ReduceError> {
        let mut sg = self.kernel.clone();
        undo(&mut sg, &self.removals)?;
        Ok(sg)
    }
}

fn undo(sg: &mut StubGraph, removals: &[RemovabilityCertificate]) -> Result<(), ReduceError> {
    for cert in removals.iter().rev() {
        let (p, lifts, r) = cert.inverse_step()?;
        apply_step(sg, p, &lifts, r, Some(cert.vertex))
            .map_err(|e| ReduceError::StaleCertificate(cert.vertex, e.to_string()))?;
    }
    Ok(())
}

fn non_edges_in_neighborhood(sg: &StubGraph, v: VertexId) -> usize {
    let g = sg.graph();
    let nb = g.neighbors(v);
    let mut count = 0;
    for (i, &a) in nb.iter().enumerate() {
        count += nb[i + 1..].iter().filter(|&&b| !g.has_edge(a, b)).count();
    }
    count
}

struct Search<'a, R: Rng + ?Sized> {
    opts: ReduceOptions,
    rng: &'a mut R,
    spent: usize,
}

impl<R: Rng + ?Sized> Search<'_, R> {
    fn exhausted(&self) -> bool {
        self.spent >= self.opts.budget
    }

    /// Removable vertices with a certificate each, best first.
    fn candidates(&mut self, sg: &StubGraph) -> Vec<RemovabilityCertificate> {
        let mut found: Vec<RemovabilityCertificate> = sg
            .graph()
            .vertices()
            .filter_map(|v| removability(sg, v).expect("live vertex"))
            .collect();
        if self.opts.preserve_components && !found.is_empty() {
            let before = sg.graph().component_count();
            found.retain(|c| {
                let mut s = sg.clone();
                dp_remove(&mut s, c).expect("fresh certificate");
                s.graph().component_count() <= before
            });
        }
        let g = sg.graph();
        match self.opts.policy {
            OrderPolicy::Random => {
                // A uniformly random vertex first, the rest by id.
                if !found.is_empty() {
                    let i = self.rng.gen_range(0..found.len());
                    found[..=i].rotate_right(1);
                }
            }
            OrderPolicy::MinDegreeFirst => found.sort_by_key(|c| (g.degree(c.vertex), c.vertex)),
            OrderPolicy::MaxDegreeFirst => {
                found.sort_by_key(|c| (std::cmp::Reverse(g.degree(c.vertex)), c.vertex))
            }
            OrderPolicy::MostNonEdgesInNeighborhood => found.sort_by_key(|c| {
                (std::cmp::Reverse(non_edges_in_neighborhood(sg, c.vertex)), c.vertex)
            }),
        }
        found
    }

    /// Removes by policy until stuck or out of budget.
    fn greedy(&mut self, sg: &mut StubGraph, removals: &mut Vec<RemovabilityCertificate>) -> bool {
        while !self.exhausted() {
            let Some(cert) = self.candidates(sg).into_iter().next() else {
                return true;
            };
            dp_remove(sg, &cert).expect("fresh certificate");
            self.spent += 1;
            removals.push(cert);
        }
        false
    }

    /// Greedy descent, then up to `depth` levels of revisiting the most
    /// recent choices. Returns whether the final state is stuck.
    fn descend(
        &mut self,
        state: &mut StubGraph,
        removals: &mut Vec<RemovabilityCertificate>,
        depth: usize,
    ) -> Result<bool, ReduceError> {
        let floor = removals.len();
        let mut stuck = self.greedy(state, removals);
        'improve: while stuck && depth > 0 {
            for j in 1..=depth.min(removals.len() - floor) {
                let keep = removals.len() - j;
                let mut base = state.clone();
                undo(&mut base, &removals[keep..])?;
                let original = removals[keep].vertex;
                for cand in self.candidates(&base) {
                    if cand.vertex == original {
                        continue;
                    }
                    if self.exhausted() {
                        break 'improve;
                    }
                    let mut alt = base.clone();
                    dp_remove(&mut alt, &cand)?;
                    self.spent += 1;
                    let mut tail = vec![cand];
                    let alt_stuck = self.descend(&mut alt, &mut tail, depth - 1)?;
                    if keep + tail.len() > removals.len() {
                        removals.truncate(keep);
                        removals.extend(tail);
                        *state = alt;
                        stuck = alt_stuck;
                        continue 'improve;
                    }
                }
            }
            break;
        }
        Ok(stuck)
    }
}

/// Repeated DP-removals chosen by `opts.policy` until the graph is
/// irreducible. With `opts.backtrack = D > 0`, once stuck each of the last
/// `D` choices is replaced by every other candidate, continuing the same way
/// with depth `D - 1`, and a longer removal sequence replaces the current one.
///
/// Running out of budget yields [`ReduceError::BudgetExhausted`] carrying
/// the best partial result.
pub fn reduce_to_kernel<R: Rng + ?Sized>(
    sg: &StubGraph,
    opts: ReduceOptions,
    rng: &mut R,
) -> Result<ReductionResult, ReduceError> {
    let mut search = Search { opts, rng, spent: 0 };
    let mut state = sg.clone();
    let mut removals = Vec::new();
    let stuck = search.descend(&mut state, &mut removals, opts.backtrack)?;
    let result = ReductionResult {
        irreducible: stuck,
        removed_count: removals.len(),
        kernel: state,
        removals,
    };
    if stuck {
        Ok(result)
    } else {
        Err(ReduceError::BudgetExhausted(Box::new(result)))
    }
}

fn state_key(sg: &StubGraph) -> (Vec<VertexId>, Vec<(VertexId, VertexId)>, Option<VertexId>) {
    let g = sg.graph();
    (
        g.vertices().collect(),
        g.edges().map(|e| (e.u(), e.v())).collect(),
        sg.deficient(),
    )
}

/// The longest removal sequence, by exhaustive search over vertices and
/// certificates. Limited to graphs of at most [`EXACT_SEARCH_LIMIT`] vertices.
pub fn exact_minimum_kernel(sg: &StubGraph) -> Result<ReductionResult, ReduceError> {
    let n = sg.graph().vertex_count();
    if n > EXACT_SEARCH_LIMIT {
        return Err(ReduceError::TooLarge {
            n,
            limit: EXACT_SEARCH_LIMIT,
        });
    }
    type Key = (Vec<VertexId>, Vec<(VertexId, VertexId)>, Option<VertexId>);
    fn dfs(
        sg: &StubGraph,
        path: &mut Vec<RemovabilityCertificate>,
        best: &mut (usize, Vec<RemovabilityCertificate>, StubGraph),
        seen: &mut HashSet<Key>,
    ) {
        if !seen.insert(state_key(sg)) {
            return;
        }
        if path.len() > best.0 {
            *best = (path.len(), path.clone(), sg.clone());
        }
        if sg.graph().vertex_count() == 0 {
            return;
        }
        for v in sg.graph().vertices() {
            for cert in all_certificates(sg, v, usize::MAX).expect("live vertex") {
                let mut next = sg.clone();
                dp_remove(&mut next, &cert).expect("fresh certificate");
                path.push(cert);
                dfs(&next, path, best, seen);
                path.pop();
            }
        }
    }
    let mut best = (0, Vec::new(), sg.clone());
    dfs(sg, &mut Vec::new(), &mut best, &mut HashSet::new());
    let (removed_count, removals, kernel) = best;
    Ok(ReductionResult {
        irreducible: super::is_irreducible(&kernel).0,
        removed_count,
        kernel,
        removals,
    })
}

/// Certificates removing every vertex of the independent set `set`, or
/// `None` if no choice of certificates removes them all.
///
/// Removals of non-adjacent vertices commute, so the order is fixed to the
/// given one; the search is over which certificate each vertex uses, since
/// one vertex's restored edges change its neighbors' neighborhoods.
pub fn remove_independent_set(
    sg: &StubGraph,
    set: &[VertexId],
) -> Result<Option<Vec<RemovabilityCertificate>>, ReduceError> {
    let g = sg.graph();
    for (i, &a) in set.iter().enumerate() {
        if !g.contains(a) {
            return Err(ReduceError::UnknownVertex(a));
        }
        for &b in &set[i + 1..] {
            if a == b || g.has_edge(a, b) {
                return Err(ReduceError::NotIndependent(a, b));
            }
        }
    }
    fn go(
        sg: &StubGraph,
        rest: &[VertexId],
        out: &mut Vec<RemovabilityCertificate>,
    ) -> Result<bool, ReduceError> {
        let Some((&v, tail)) = rest.split_first() else {
            return Ok(true);
        };
        for cert in all_certificates(sg, v, usize::MAX)? {
            let mut next = sg.clone();
            dp_remove(&mut next, &cert)?;
            out.push(cert);
            if go(&next, tail, out)? {
                return Ok(true);
            }
            out.pop();
        }
        Ok(false)
    }
    let mut out = Vec::new();
    Ok(go(sg, set, &mut out)?.then_some(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::*;
    use crate::graph::Graph;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(i: usize) -> VertexId {
        VertexId::from(i)
    }

    #[test]
    fn cycles_reduce_completely() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for policy in [
            OrderPolicy::Random,
            OrderPolicy::MinDegreeFirst,
            OrderPolicy::MaxDegreeFirst,
            OrderPolicy::MostNonEdgesInNeighborhood,
        ] {
            let opts = ReduceOptions {
                policy,
                ..Default::default()
            };
            let sg = StubGraph::new(cycle(8));
            let res = reduce_to_kernel(&sg, opts, &mut rng).unwrap();
            assert!(res.irreducible);
            assert_eq!(res.reconstruct().unwrap(), sg);
            // A cycle shrinks to a triangle, which is irreducible.
            assert_eq!(res.kernel.graph().vertex_count(), 3);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let opts = ReduceOptions {
            budget: 2,
            ..Default::default()
        };
        match reduce_to_kernel(&StubGraph::new(cycle(9)), opts, &mut rng) {
            Err(ReduceError::BudgetExhausted(partial)) => {
                assert_eq!(partial.removed_count, 2);
                assert!(!partial.irreducible);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn backtracking_never_loses_removals() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for seed in 0..20 {
            let mut grng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_bounded_degree(12, 4, 60, &mut grng);
            let sg = StubGraph::new(g);
            let plain = reduce_to_kernel(&sg, ReduceOptions::default(), &mut rng).unwrap();
            let opts = ReduceOptions {
                backtrack: 3,
                ..Default::default()
            };
            let deep = reduce_to_kernel(&sg, opts, &mut rng).unwrap();
            assert!(deep.removed_count >= plain.removed_count);
            assert_eq!(deep.reconstruct().unwrap(), sg);
        }
    }

    #[test]
    fn exact_search_is_at_least_as_good() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for seed in 0..10 {
            let mut grng = ChaCha8Rng::seed_from_u64(seed);
            let sg = StubGraph::new(random_bounded_degree(8, 3, 30, &mut grng));
            let greedy = reduce_to_kernel(&sg, ReduceOptions::default(), &mut rng).unwrap();
            let exact = exact_minimum_kernel(&sg).unwrap();
            assert!(exact.removed_count >= greedy.removed_count);
            assert_eq!(exact.reconstruct().unwrap(), sg);
        }
        assert!(matches!(
            exact_minimum_kernel(&StubGraph::new(empty(21))),
            Err(ReduceError::TooLarge { .. })
        ));
    }

    #[test]
    fn independent_removals_commute() {
        let sg = StubGraph::new(cycle(6));
        let a = remove_independent_set(&sg, &[v(0), v(3)]).unwrap().unwrap();
        let b = remove_independent_set(&sg, &[v(3), v(0)]).unwrap().unwrap();
        let apply = |certs: &[RemovabilityCertificate]| {
            let mut s = sg.clone();
            for c in certs {
                dp_remove(&mut s, c).unwrap();
            }
            s
        };
        assert_eq!(apply(&a), apply(&b));
        assert!(matches!(
            remove_independent_set(&sg, &[v(0), v(1)]),
            Err(ReduceError::NotIndependent(..))
        ));
        let k4_plus = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(remove_independent_set(&StubGraph::new(k4_plus), &[v(0), v(4)]).unwrap(), None);
    }
}
