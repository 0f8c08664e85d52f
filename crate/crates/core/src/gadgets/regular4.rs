use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::GadgetError;
use crate::graph::{Graph, VertexId};

/// `G_k` on `4k` vertices: consecutive blocks of four form `K_4`, and block
/// `i` sends `v_{4i-1} v_{4i+1}` and `v_{4i} v_{4i+2}` to the next block
/// (1-based, indices mod `4k`).
pub fn irreducible_4regular(k: usize) -> Result<Graph, GadgetError> {
    if k < 3 {
        return Err(GadgetError::KTooSmall(k));
    }
    let n = 4 * k;
    let v = |i: usize| (i - 1) % n;
    let mut g = Graph::with_vertices(n);
    for i in 1..=k {
        let block = [4 * i - 3, 4 * i - 2, 4 * i - 1, 4 * i];
        for (a, &x) in block.iter().enumerate() {
            for &y in &block[a + 1..] {
                g.add_edge(v(x).into(), v(y).into())?;
            }
        }
        g.add_edge(v(4 * i - 1).into(), v(4 * i + 1).into())?;
        g.add_edge(v(4 * i).into(), v(4 * i + 2).into())?;
    }
    Ok(g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BlockKind {
    K5,
    K5MinusEdge,
    K4,
    /// Any other class of the relation.
    Other,
}

/// Disjoint blocks of the given kinds with their degree-3 vertices matched
/// at random across distinct blocks. `None` if `attempts` shuffles all fail
/// (always when the degree-3 count is odd or one block holds most of them).
pub fn random_block_4regular<R: Rng + ?Sized>(kinds: &[BlockKind], attempts: usize, rng: &mut R) -> Option<Graph> {
    let mut g = Graph::new();
    let mut ports: Vec<(usize, VertexId)> = Vec::new();
    for (b, kind) in kinds.iter().enumerate() {
        let (n, missing) = match kind {
            BlockKind::K5 => (5, None),
            BlockKind::K5MinusEdge => (5, Some((0, 1))),
            BlockKind::K4 => (4, None),
            BlockKind::Other => return None,
        };
        let vs: Vec<VertexId> = (0..n).map(|_| g.add_vertex()).collect();
        for i in 0..n {
            for j in i + 1..n {
                if missing != Some((i, j)) {
                    g.add_edge(vs[i], vs[j]).expect("fresh block");
                }
            }
        }
        for v in vs {
            if g.degree(v) == 3 {
                ports.push((b, v));
            }
        }
            }
    if ports.len() % 2 == 1 {
        return None;
    }
    'attempt: for _ in 0..attempts {
        ports.shuffle(rng);
        let mut h = g.clone();
        for pair in ports.chunks(2) {
            let ((ba, a), (bb, b)) = (pair[0], pair[1]);
            if ba == bb || h.has_edge(a, b) {
                continue 'attempt;
            }
            h.add_edge(a, b).expect("checked");
        }
        return Some(h);
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub vertices: Vec<VertexId>,
    pub kind: BlockKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FourRegularStructure {
    /// Every block is `K_5`, `K_5 − e` or `K_4`.
    pub indecomposable: bool,
    pub blocks: Vec<Block>,
}

/// Classes of `u ~ v` ("`u` lies on a triangle of `G[Γ(v)]`"), closed
/// transitively, and whether each induces one of `K_5`, `K_5 − e`, `K_4`.
/// Edges between classes then form a matching on degree-3 block vertices
/// because the graph is 4-regular.
pub fn check_4regular_indecomposable_structure(g: &Graph) -> Result<FourRegularStructure, GadgetError> {
    for v in g.vertices() {
        if g.degree(v) != 4 {
            return Err(GadgetError::NotFourRegular(v, g.degree(v)));
        }
    }
    let mut parent: Vec<usize> = (0..g.id_bound()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut x = x;
        while p[x] != r {
            let nx = p[x];
            p[x] = r;
            x = nx;
        }
        r
    }
    for v in g.vertices() {
        let nb = g.neighbors(v);
        for (i, &a) in nb.iter().enumerate() {
            for (j, &b) in nb.iter().enumerate().skip(i + 1) {
                if !g.has_edge(a, b) {
                    continue;
                }
                for &c in &nb[j + 1..] {
                    if g.has_edge(a, c) && g.has_edge(b, c) {
                        for u in [a, b, c] {
                            let (ru, rv) = (find(&mut parent, u.index()), find(&mut parent, v.index()));
                            parent[ru.max(rv)] = ru.min(rv);
                        }
                    }
                }
            }
        }
    }
    let mut classes: std::collections::BTreeMap<usize, Vec<VertexId>> = Default::default();
    for v in g.vertices() {
        classes.entry(find(&mut parent, v.index())).or_default().push(v);
    }
    let blocks: Vec<Block> = classes
        .into_values()
        .map(|vertices| {
            let sub = g.induced_subgraph(&vertices).graph;
            let kind = match (vertices.len(), sub.edge_count()) {
                (5, 10) => BlockKind::K5,
                (5, 9) => BlockKind::K5MinusEdge,
                (4, 6) => BlockKind::K4,
                _ => BlockKind::Other,
            };
            Block { vertices, kind }
        })
        .collect();
    Ok(FourRegularStructure {
        indecomposable: blocks.iter().all(|b| b.kind != BlockKind::Other),
        blocks,
    })
}
