use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::blockers::block_all_except;
use super::formula::{unit_propagate, Formula};
use super::GadgetError;
use crate::graph::{Edge, Graph, StubGraph, VertexId};
use crate::reduce::remove_independent_set;

/// Ring vertex `j` of a variable gadget is adjacent to ring vertices at
/// circular distance 2, 3 and 4. Literal non-edge `e_j` (1-based) joins
/// ring vertices `j - 1` and `j mod 8`.
fn literal_pair(j: usize) -> (usize, usize) {
    (j - 1, j % 8)
}

/// `K_8 − C_8` on ring vertices 0..8 plus the variable vertex 8 joined to
/// all of them; the second value lists the literal non-edges `e_1..e_8`.
pub fn variable_gadget() -> (Graph, Vec<Edge>) {
    let mut g = Graph::with_vertices(9);
    for a in 0..8usize {
        for b in a + 1..8 {
            let d = (b - a).min(8 - (b - a));
            if d >= 2 {
                g.add_edge(a.into(), b.into()).unwrap();
            }
        }
        g.add_edge(a.into(), 8.into()).unwrap();
    }
    let literals = (1..=8)
        .map(|j| {
            let (a, b) = literal_pair(j);
            Edge::from_indices(a, b)
        })
        .collect();
    (g, literals)
}

/// Literal edges tried, in order, for positive and negative occurrences.
const POSITIVE: [usize; 4] = [2, 4, 6, 8];
const NEGATIVE: [usize; 4] = [5, 7, 1, 3];

#[derive(Clone, Debug)]
pub struct GadgetInstance {
    pub graph: Graph,
    /// Vertex `x_i` for variable `i` (index `i - 1`).
    pub variable_vertices: Vec<VertexId>,
    /// Clause vertices of the formula left after unit propagation.
    pub clause_vertices: Vec<VertexId>,
    pub dummy_vertices: Vec<VertexId>,
    /// Clause vertex that can never be removed, present when unit
    /// propagation already refutes the formula.
    pub conflict_vertex: Option<VertexId>,
    /// `(variable, clause index) → literal non-edge` in final vertex ids.
    pub literal_edge_map: BTreeMap<(usize, usize), Edge>,
    /// Literals fixed by unit propagation.
    pub forced: Vec<i32>,
    /// Clauses the graph encodes.
    pub encoded: Formula,
    pub m_target: usize,
}

impl GadgetInstance {
    /// `X ∪ C`.
    pub fn target_set(&self) -> Vec<VertexId> {
        let mut s = self.variable_vertices.clone();
        s.extend(&self.clause_vertices);
        s.extend(self.conflict_vertex);
        s
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BuildOptions {
    /// Pair odd-degree vertices onto shared blocker cliques.
    pub even_blockers: bool,
}

/// Endpoint identifications of one clause: literal edge `i` is traversed
/// reversed when bit `i` of the flip mask is set, each edge's end is glued
/// to the next edge's start (closing the cycle for triangles), and cherries
/// get an edge between their two free ends.
struct Oriented {
    merges: Vec<(usize, usize)>,
    corners: Vec<usize>,
    cherry: Option<(usize, usize)>,
}

fn oriented(ends: &[(usize, usize)], flips: usize) -> Oriented {
    let e: Vec<(usize, usize)> = ends
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| if flips >> i & 1 == 1 { (b, a) } else { (a, b) })
        .collect();
    match e.len() {
        3 => Oriented {
            merges: vec![(e[0].1, e[1].0), (e[1].1, e[2].0), (e[2].1, e[0].0)],
            corners: vec![e[0].0, e[1].0, e[2].0],
            cherry: None,
        },
        2 => Oriented {
            merges: vec![(e[0].1, e[1].0)],
            corners: vec![e[0].0, e[0].1, e[1].1],
            cherry: Some((e[0].0.min(e[1].1), e[0].0.max(e[1].1))),
        },
        _ => unreachable!("propagation leaves clauses of 2 or 3 literals"),
    }
}

/// Raw vertex `9i + r` is ring vertex `r` of variable `i` (`r = 8` is
/// `x_i`). Every raw vertex is glued to at most one other.
struct Identification {
    partner: Vec<Option<usize>>,
    cherry: BTreeSet<(usize, usize)>,
    nv: usize,
}

impl Identification {
    fn raw_adjacent(&self, x: usize, y: usize) -> bool {
        if x / 9 != y / 9 || x == y {
            return false;
        }
        let (r, s) = (x % 9, y % 9);
        if r == 8 || s == 8 {
            return true;
        }
        let d = r.abs_diff(s);
        d.min(8 - d) >= 2
    }

    fn class(&self, x: usize) -> impl Iterator<Item = usize> {
        std::iter::once(x).chain(self.partner[x])
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        self.class(a).any(|x| {
            self.class(b)
                .any(|y| self.raw_adjacent(x, y) || self.cherry.contains(&(x.min(y), x.max(y))))
        })
    }

    /// Every literal pair is still a non-edge of the quotient.
    fn consistent(&self) -> bool {
        (0..self.nv).all(|i| {
            (1..=8).all(|j| {
                let (a, b) = literal_pair(j);
                !self.adjacent(9 * i + a, 9 * i + b)
            })
        })
    }

    /// Lexicographically first flip sequence without collisions.
    fn search(&mut self, ends: &[Vec<(usize, usize)>], flips: &mut Vec<usize>) -> bool {
        let Some(clause) = ends.get(flips.len()) else {
            return true;
        };
        for f in 0..1usize << clause.len() {
            let o = oriented(clause, f);
            for &(x, y) in &o.merges {
                self.partner[x] = Some(y);
                self.partner[y] = Some(x);
            }
            let fresh = o.cherry.is_some_and(|c| self.cherry.insert(c));
            flips.push(f);
            if self.consistent() && self.search(ends, flips) {
                return true;
            }
            flips.pop();
            if fresh {
                self.cherry.remove(&o.cherry.unwrap());
            }
            for &(x, y) in &o.merges {
                self.partner[x] = None;
                self.partner[y] = None;
            }
        }
        false
    }
}

/// Graph whose vertex set `X ∪ C` can be removed entirely iff `phi` is
/// satisfiable. Unit clauses are propagated away first.
pub fn build_reduction(phi: &Formula, opts: BuildOptions) -> Result<GadgetInstance, GadgetError> {
    if !phi.is_three_sat_three() {
        return Err(GadgetError::NotThreeSatThree);
    }
    let simplified = unit_propagate(phi);
    let enc = simplified.formula;
    let nv = phi.num_vars;
    // Raw ids: variable i (0-based) owns 9i..9i+8 (ring) and 9i+8 (x_i).
    let ring = |i: usize, r: usize| 9 * i + r;

    // Literal edge chosen for each occurrence, endpoint-disjoint per variable.
    let mut used: Vec<Vec<usize>> = vec![Vec::new(); nv];
    let mut literal: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (ci, clause) in enc.clauses.iter().enumerate() {
        for &l in clause {
            let v = l.unsigned_abs() as usize - 1;
            let prefs = if l > 0 { POSITIVE } else { NEGATIVE };
            let j = prefs
                .into_iter()
                .find(|&j| {
                    let (a, b) = literal_pair(j);
                    !used[v].contains(&a) && !used[v].contains(&b)
                })
                .expect("three occurrences always fit");
            let (a, b) = literal_pair(j);
            used[v].extend([a, b]);
            literal.insert((v + 1, ci), j);
        }
    }

    // Literal edge endpoints per clause, in canonical order.
    let ends: Vec<Vec<(usize, usize)>> = enc
        .clauses
        .iter()
        .enumerate()
        .map(|(ci, clause)| {
            clause
                .iter()
                .map(|&l| {
                    let v = l.unsigned_abs() as usize - 1;
                    let (a, b) = literal_pair(literal[&(v + 1, ci)]);
                    let (a, b) = (ring(v, a), ring(v, b));
                    (a.min(b), a.max(b))
                })
                .collect()
        })
        .collect();
    let mut id = Identification {
        partner: vec![None; 9 * nv],
        cherry: BTreeSet::new(),
        nv,
    };
    let mut flips = Vec::with_capacity(ends.len());
    if !id.search(&ends, &mut flips) {
        return Err(GadgetError::Collision);
    }
    let mut corners: Vec<Vec<usize>> = Vec::new();
    for (e, &f) in ends.iter().zip(&flips) {
        corners.push(oriented(e, f).corners);
    }

    // Compact the quotient.
    let mut id_of = vec![usize::MAX; 9 * nv];
    let mut next = 0;
    for raw in 0..9 * nv {
        let root = id.partner[raw].map_or(raw, |p| p.min(raw));
        if id_of[root] == usize::MAX {
            id_of[root] = next;
            next += 1;
        }
        id_of[raw] = id_of[root];
    }
    let mut g = Graph::with_vertices(next);
    let (h, _) = variable_gadget();
    for i in 0..nv {
        for e in h.edges() {
            let (a, b) = (id_of[9 * i + e.u().index()], id_of[9 * i + e.v().index()]);
            if !g.has_edge(a.into(), b.into()) {
                g.add_edge(a.into(), b.into())?;
            }
        }
    }
    for &(a, b) in &id.cherry {
        let (a, b) = (id_of[a], id_of[b]);
        if !g.has_edge(a.into(), b.into()) {
            g.add_edge(a.into(), b.into())?;
        }
    }
    let variable_vertices: Vec<VertexId> = (0..nv).map(|i| VertexId::from(id_of[ring(i, 8)])).collect();
    let mut clause_vertices = Vec::new();
    let mut dummy_vertices = Vec::new();
    for cs in &corners {
        let c = g.add_vertex();
        for &raw in cs {
            g.add_edge(c, id_of[raw].into())?;
        }
        let d = g.add_vertex();
        g.add_edge(c, d)?;
        clause_vertices.push(c);
        dummy_vertices.push(d);
    }
    // A refuted formula gets a clause vertex over a triangle of edges.
    let mut conflict_vertex = None;
    if simplified.conflict {
        let t: Vec<VertexId> = (0..3).map(|_| g.add_vertex()).collect();
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            g.add_edge(t[a], t[b])?;
        }
        let c = g.add_vertex();
        let d = g.add_vertex();
        for &v in &t {
            g.add_edge(c, v)?;
        }
        g.add_edge(c, d)?;
        conflict_vertex = Some(c);
        dummy_vertices.push(d);
    }
    let literal_edge_map = literal
        .iter()
        .map(|(&(v, ci), &j)| {
            let (a, b) = literal_pair(j);
            ((v, ci), Edge::from_indices(id_of[ring(v - 1, a)], id_of[ring(v - 1, b)]))
        })
        .collect();

    let mut keep = variable_vertices.clone();
    keep.extend(&clause_vertices);
    keep.extend(conflict_vertex);
    block_all_except(&mut g, &keep, opts.even_blockers)?;
    Ok(GadgetInstance {
        m_target: keep.len(),
        graph: g,
        variable_vertices,
        clause_vertices,
        dummy_vertices,
        conflict_vertex,
        literal_edge_map,
        forced: simplified.forced,
        encoded: enc,
    })
}

/// Satisfiability by brute force next to removability of `X ∪ C`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub satisfiable: bool,
    pub removable: bool,
}

impl Verification {
    pub fn agrees(self) -> bool {
        self.satisfiable == self.removable
    }
}

/// Largest formula [`verify_reduction`] accepts.
pub const VERIFY_VAR_LIMIT: usize = 8;

pub fn verify_reduction(inst: &GadgetInstance, phi: &Formula) -> Result<Verification, GadgetError> {
    if phi.num_vars > VERIFY_VAR_LIMIT {
        return Err(GadgetError::TooLarge {
            vars: phi.num_vars,
            limit: VERIFY_VAR_LIMIT,
        });
    }
    let satisfiable = phi.brute_force_sat().is_some();
    let removable = remove_independent_set(&StubGraph::new(inst.graph.clone()), &inst.target_set())?.is_some();
    Ok(Verification { satisfiable, removable })
}

/// Largest padded graph [`padded_instance`] builds.
pub const PADDING_VERTEX_LIMIT: usize = 5_000_000;

/// Appends `⌈m^(1/ε)⌉` disjoint copies of `K_28`, `m` the target count, so
/// that `m ≤ n^ε`.
pub fn padded_instance(inst: &GadgetInstance, epsilon: f64) -> Result<Graph, GadgetError> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(GadgetError::BadEpsilon(epsilon));
    }
    let m = inst.m_target as f64;
    let copies = m.powf(1.0 / epsilon).ceil();
    let n = inst.graph.vertex_count() as f64 + 28.0 * copies;
    if !n.is_finite() || n > PADDING_VERTEX_LIMIT as f64 {
        return Err(GadgetError::PaddingTooLarge { vertices: n });
    }
    let mut g = inst.graph.clone();
    let k28 = crate::graph::generators::complete(28);
    for _ in 0..copies as usize {
        g.append_disjoint(&k28);
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduce::all_certificates;
    use crate::graph::ExtEdge;

    #[test]
    fn variable_vertex_has_two_removals() {
        let (g, lits) = variable_gadget();
        assert_eq!(g.degree(8.into()), 8);
        assert!((0..8).all(|v| g.degree(v.into()) == 6));
        let certs = all_certificates(&StubGraph::new(g), 8.into(), usize::MAX).unwrap();
        let mut got: Vec<Vec<ExtEdge>> = certs.into_iter().map(|c| c.restored).collect();
        got.sort();
        let parity = |p: usize| {
            let mut v: Vec<ExtEdge> = (0..8).filter(|j| j % 2 == p).map(|j| ExtEdge::Real(lits[j])).collect();
            v.sort();
            v
        };
        let mut want = vec![parity(0), parity(1)];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn single_clause_instance() {
        let phi = Formula::new(3, vec![vec![1, -2, 3]]).unwrap();
        let inst = build_reduction(&phi, BuildOptions::default()).unwrap();
        assert_eq!(inst.m_target, 4);
        assert!(inst.graph.max_degree() <= 28);
        let v = verify_reduction(&inst, &phi).unwrap();
        assert!(v.satisfiable && v.removable);
    }

    #[test]
    fn contradiction_is_not_removable() {
        let phi = Formula::new(1, vec![vec![1], vec![-1]]).unwrap();
        let inst = build_reduction(&phi, BuildOptions::default()).unwrap();
        assert!(inst.conflict_vertex.is_some());
        let v = verify_reduction(&inst, &phi).unwrap();
        assert_eq!(v, Verification { satisfiable: false, removable: false });
    }

    #[test]
    fn padding_reaches_the_exponent() {
        let phi = Formula::new(3, vec![vec![1, 2, 3]]).unwrap();
        let inst = build_reduction(&phi, BuildOptions::default()).unwrap();
        let g = padded_instance(&inst, 0.5).unwrap();
        let added = g.vertex_count() - inst.graph.vertex_count();
        assert_eq!(added, 28 * 16);
        assert!(inst.m_target as f64 <= (g.vertex_count() as f64).powf(0.5));
        assert!(padded_instance(&inst, 0.01).is_err());
        assert!(padded_instance(&inst, 0.0).is_err());
    }
}
