use std::fmt;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::Serialize;

use super::js::{bipartition, JsChain};
use super::{maximum_matching, Infeasibility, Matching, MatchingError};
use crate::graph::{Edge, Graph};

/// How a matching of a prescribed size is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum MatchingStrategy {
    /// Uniform `k`-subset of one maximum matching.
    #[default]
    MaximumThenSubset,
    /// Greedy over a uniformly shuffled edge order.
    Greedy,
    /// `k`-subset of a perfect matching sampled with the Jerrum-Sinclair
    /// chain after `steps` transitions. Bipartite graphs only.
    NearUniformBipartiteJs { steps: u64 },
}

impl fmt::Display for MatchingStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatchingStrategy::MaximumThenSubset => write!(f, "max-subset"),
            MatchingStrategy::Greedy => write!(f, "greedy"),
            MatchingStrategy::NearUniformBipartiteJs { steps } => write!(f, "js:{steps}"),
        }
    }
}

impl FromStr for MatchingStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "max-subset" | "maximum-then-subset" => Ok(MatchingStrategy::MaximumThenSubset),
            "greedy" => Ok(MatchingStrategy::Greedy),
            "js" => Ok(MatchingStrategy::NearUniformBipartiteJs { steps: 10_000 }),
            _ => match s.strip_prefix("js:") {
                Some(n) => n
                    .parse()
                    .map(|steps| MatchingStrategy::NearUniformBipartiteJs { steps })
                    .map_err(|e| format!("bad js step count {n:?}: {e}")),
                None => Err(format!(
                    "unknown matching strategy {s:?} (expected max-subset, greedy or js[:steps])"
                )),
            },
        }
    }
}

/// Uniformly random `k`-subset of `pool`, in the order drawn.
pub fn random_subset<R: Rng + ?Sized>(pool: &[Edge], k: usize, rng: &mut R) -> Vec<Edge> {
    assert!(k <= pool.len(), "subset larger than pool");
    index::sample(rng, pool.len(), k)
        .into_iter()
        .map(|i| pool[i])
        .collect()
}

/// Picks disjoint edges from a uniformly shuffled edge order until `k` are
/// found. Returns what it found if that is fewer than `k`.
pub(crate) fn greedy_matching<R: Rng + ?Sized>(g: &Graph, k: usize, rng: &mut R) -> Vec<Edge> {
    let mut edges: Vec<Edge> = g.edges().collect();
    edges.shuffle(rng);
    let mut used = vec![false; g.id_bound()];
    let mut out = Vec::with_capacity(k);
    for e in edges {
        if out.len() == k {
            break;
        }
        let (a, b) = (e.u().index(), e.v().index());
        if !used[a] && !used[b] {
            used[a] = true;
            used[b] = true;
            out.push(e);
        }
    }
    out
}

/// A matching of exactly `k` edges chosen by `strategy`.
pub fn find_matching_of_size<R: Rng + ?Sized>(
    g: &Graph,
    k: usize,
    strategy: MatchingStrategy,
    rng: &mut R,
) -> Result<Matching, MatchingError> {
    let infeasible = |available: usize, reason| MatchingError::SizeInfeasible {
        requested: k,
        available,
        reason,
    };
    match strategy {
        MatchingStrategy::MaximumThenSubset => {
            let max = maximum_matching(g);
            if max.len() < k {
                return Err(infeasible(max.len(), Infeasibility::Proven));
            }
            Matching::from_edges(random_subset(max.edges(), k, rng))
        }
        MatchingStrategy::Greedy => {
            let found = greedy_matching(g, k, rng);
            if found.len() == k {
                return Matching::from_edges(found);
            }
            let nu = maximum_matching(g).len();
            let reason = if nu < k {
                Infeasibility::Proven
            } else {
                Infeasibility::StrategyFailed
            };
            Err(infeasible(found.len(), reason))
        }
        MatchingStrategy::NearUniformBipartiteJs { steps } => {
            let nu = maximum_matching(g).len();
            if nu < k {
                return Err(infeasible(nu, Infeasibility::Proven));
            }
            if k == 0 {
                return Ok(Matching::new());
            }
            let side = bipartition(g).ok_or(MatchingError::NotBipartite)?;
            let mut chain = match JsChain::new(g, side) {
                Ok(c) => c,
                Err(MatchingError::InvalidState(_)) => {
                    return Err(infeasible(nu, Infeasibility::StrategyInapplicable))
                }
                Err(e) => return Err(e),
            };
            for _ in 0..steps {
                chain.step(g, rng);
            }
            // Run on until the chain sits at a perfect matching.
            while !chain.is_perfect() {
                chain.step(g, rng);
            }
            let pm = chain.matching();
            Matching::from_edges(random_subset(pm.edges(), k, rng))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sizes_and_failures() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for s in [
            MatchingStrategy::MaximumThenSubset,
            MatchingStrategy::Greedy,
        ] {
            let m = find_matching_of_size(&complete(4), 2, s, &mut rng).unwrap();
            assert_eq!(m.len(), 2);
            m.validate_in(&complete(4)).unwrap();
            let e = find_matching_of_size(&cycle(5), 3, s, &mut rng).unwrap_err();
            assert!(matches!(
                e,
                MatchingError::SizeInfeasible {
                    reason: Infeasibility::Proven,
                    ..
                }
            ));
            assert_eq!(find_matching_of_size(&star(5), 1, s, &mut rng).unwrap().len(), 1);
        }
    }

    #[test]
    fn greedy_reports_spurious_failure() {
        // P4: picking the middle edge first blocks a perfect matching.
        let g = path(4);
        let mut saw_failure = false;
        for seed in 0..64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            match find_matching_of_size(&g, 2, MatchingStrategy::Greedy, &mut rng) {
                Ok(m) => assert_eq!(m.len(), 2),
                Err(MatchingError::SizeInfeasible { reason, .. }) => {
                    assert_eq!(reason, Infeasibility::StrategyFailed);
                    saw_failure = true;
                }
                Err(e) => panic!("{e}"),
            }
        }
        assert!(saw_failure);
    }

    #[test]
    fn js_strategy_on_bipartite_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = MatchingStrategy::NearUniformBipartiteJs { steps: 50 };
        let g = complete_bipartite(3, 3);
        let m = find_matching_of_size(&g, 2, s, &mut rng).unwrap();
        assert_eq!(m.len(), 2);
        m.validate_in(&g).unwrap();
        assert_eq!(
            find_matching_of_size(&complete(3), 1, s, &mut rng),
            Err(MatchingError::NotBipartite)
        );
        assert!(matches!(
            find_matching_of_size(&star(3), 1, s, &mut rng),
            Err(MatchingError::SizeInfeasible {
                reason: Infeasibility::StrategyInapplicable,
                ..
            })
        ));
    }

    #[test]
    fn parses_strategy_names() {
        for s in ["max-subset", "greedy", "js:7"] {
            assert_eq!(s.parse::<MatchingStrategy>().unwrap().to_string(), s);
        }
        assert!("best".parse::<MatchingStrategy>().is_err());
    }

    #[test]
    fn random_subset_is_uniform_enough() {
        let pool: Vec<Edge> = (0..4).map(|i| Edge::from_indices(2 * i, 2 * i + 1)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut hits = [0usize; 4];
        for _ in 0..40_000 {
            for e in random_subset(&pool, 2, &mut rng) {
                hits[e.u().index() / 2] += 1;
            }
        }
        // Each edge is chosen with probability 1/2.
        for h in hits {
            assert!((h as f64 - 20_000.0).abs() < 4.0 * 100.0, "{hits:?}");
        }
    }
}
