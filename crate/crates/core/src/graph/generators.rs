//! Small deterministic and seeded graph families used as seeds and in tests.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Graph, VertexId};

pub fn empty(n: usize) -> Graph {
    Graph::with_vertices(n)
}

pub fn complete(n: usize) -> Graph {
    let mut g = Graph::with_vertices(n);
    for a in 0..n {
        for b in a + 1..n {
            g.add_edge(a.into(), b.into()).expect("fresh edge");
        }
    }
    g
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "cycle needs at least 3 vertices");
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("valid cycle")
}

pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("valid path")
}

/// `K_{1,leaves}` with the center at id 0.
pub fn star(leaves: usize) -> Graph {
    Graph::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i))).expect("valid star")
}

/// `K_{a,b}` with parts `0..a` and `a..a+b`.
pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    let mut g = Graph::with_vertices(a + b);
    for i in 0..a {
        for j in a..a + b {
            g.add_edge(i.into(), j.into()).expect("fresh edge");
        }
    }
    g
}

pub fn petersen() -> Graph {
    let outer = (0..5).map(|i| (i, (i + 1) % 5));
    let spokes = (0..5).map(|i| (i, i + 5));
    let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
    Graph::from_edges(10, outer.chain(spokes).chain(inner)).expect("valid petersen")
}

/// Circulant graph on `n` vertices joining `i` to `i +- s` for each offset.
pub fn circulant(n: usize, offsets: &[usize]) -> Graph {
    let mut g = Graph::with_vertices(n);
    for i in 0..n {
        for &s in offsets {
            let j = (i + s) % n;
            if i != j && !g.has_edge(i.into(), j.into()) {
                g.add_edge(i.into(), j.into()).expect("fresh edge");
            }
        }
    }
    g
}

pub fn disjoint_union(parts: &[Graph]) -> Graph {
    let mut g = Graph::new();
    for p in parts {
        g.append_disjoint(p);
    }
    g
}

/// Erdős–Rényi `G(n, p)`.
pub fn gnp<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut g = Graph::with_vertices(n);
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(a.into(), b.into()).expect("fresh edge");
            }
        }
    }
    g
}

/// Uniform-ish random `d`-regular simple graph by repeated pairing.
/// Returns `None` if `n * d` is odd or no simple pairing was found.
pub fn random_regular<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Option<Graph> {
    if (n * d) % 2 == 1 || d >= n {
        return None;
    }
    'attempt: for _ in 0..1000 {
        let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
        points.shuffle(rng);
        let mut g = Graph::with_vertices(n);
        for pair in points.chunks(2) {
            let (a, b) = (VertexId::from(pair[0]), VertexId::from(pair[1]));
            if a == b || g.has_edge(a, b) {
                continue 'attempt;
            }
            g.add_edge(a, b).expect("checked");
        }
        return Some(g);
    }
    None
}

/// Random graph with maximum degree at most `max_degree`: `attempts` random
/// vertex pairs are offered and kept when both endpoints have spare degree.
pub fn random_bounded_degree<R: Rng + ?Sized>(
    n: usize,
    max_degree: usize,
    attempts: usize,
    rng: &mut R,
) -> Graph {
    let mut g = Graph::with_vertices(n);
    if n < 2 {
        return g;
    }
    for _ in 0..attempts {
        let a = VertexId::from(rng.gen_range(0..n));
        let b = VertexId::from(rng.gen_range(0..n));
        if a != b && !g.has_edge(a, b) && g.degree(a) < max_degree && g.degree(b) < max_degree {
            g.add_edge(a, b).expect("checked");
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn families_have_expected_sizes() {
        assert_eq!(complete(6).edge_count(), 15);
        assert_eq!(cycle(7).edge_count(), 7);
        assert_eq!(path(4).edge_count(), 3);
        assert_eq!(star(9).max_degree(), 9);
        assert_eq!(complete_bipartite(3, 3).edge_count(), 9);
        let p = petersen();
        assert!(p.is_regular(3));
        assert_eq!(p.edge_count(), 15);
        assert!(circulant(9, &[1, 2]).is_regular(4));
    }

    #[test]
    fn random_families_respect_constraints() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_regular(12, 4, &mut rng).unwrap();
        assert!(g.is_regular(4));
        g.validate().unwrap();
        let h = random_bounded_degree(30, 3, 200, &mut rng);
        assert!(h.max_degree() <= 3);
        assert!(random_regular(5, 3, &mut rng).is_none());
    }
}
