// Maximum-cardinality matching on general graphs.
//
// Edmonds' blossom method with lazy contraction through a `base` array. A
// search phase grows an alternating forest rooted at every exposed vertex at
// once, so a phase that ends without an augmenting path certifies that the
// current matching is maximum. This is what makes incremental repair cheap:
// after a local change we patch the matching greedily and pay for a single
// failing phase at the end.

use super::Matching;
use crate::graph::{Edge, Graph, VertexId};

const NONE: u32 = u32::MAX;

/// Returns a maximum matching of `g`, edges ordered by their smaller endpoint.
pub fn maximum_matching(g: &Graph) -> Matching {
    IncrementalMatching::new(g).matching()
}

#[derive(Clone, Debug, Default)]
struct Forest {
    base: Vec<u32>,
    parent: Vec<u32>,
    root: Vec<u32>,
    even: Vec<bool>,
    mark: Vec<u32>,
    blossom: Vec<u32>,
    stamp: u32,
    labeled: Vec<u32>,
    queue: Vec<u32>,
}

impl Forest {
    fn reset(&mut self, n: usize) {
        self.base.clear();
        self.base.extend(0..n as u32);
        self.parent.clear();
        self.parent.resize(n, NONE);
        self.root.clear();
        self.root.resize(n, NONE);
        self.even.clear();
        self.even.resize(n, false);
        if self.mark.len() < n {
            self.mark.resize(n, 0);
            self.blossom.resize(n, 0);
        }
        self.labeled.clear();
        self.queue.clear();
    }

    fn next_stamp(&mut self) -> u32 {
        if self.stamp == u32::MAX {
            self.mark.iter_mut().for_each(|x| *x = 0);
            self.blossom.iter_mut().for_each(|x| *x = 0);
            self.stamp = 0;
        }
        self.stamp += 1;
        self.stamp
    }

    fn lca(&mut self, a: u32, b: u32, mate: &[u32]) -> u32 {
        let s = self.next_stamp();
        let mut a = a;
        loop {
            a = self.base[a as usize];
            self.mark[a as usize] = s;
            if mate[a as usize] == NONE {
                break;
            }
            a = self.parent[mate[a as usize] as usize];
        }
        let mut b = b;
        loop {
            b = self.base[b as usize];
            if self.mark[b as usize] == s {
                return b;
            }
            b = self.parent[mate[b as usize] as usize];
        }
    }

    fn mark_path(&mut self, mut v: u32, b: u32, mut child: u32, mate: &[u32], s: u32) {
        while self.base[v as usize] != b {
            let mv = mate[v as usize];
            self.blossom[self.base[v as usize] as usize] = s;
            self.blossom[self.base[mv as usize] as usize] = s;
            self.parent[v as usize] = child;
            child = mv;
            v = self.parent[mv as usize];
        }
    }

    /// Re-matches along the tree path starting at the (old) mate `v` of a
    /// vertex that has just been matched elsewhere.
    fn flip(&self, mut v: u32, mate: &mut [u32]) {
        while v != NONE {
            let pv = self.parent[v as usize];
            let ppv = mate[pv as usize];
            mate[v as usize] = pv;
            mate[pv as usize] = v;
            v = ppv;
        }
    }

    /// One search phase. Returns true if the matching was augmented.
    fn augment(&mut self, g: &Graph, mate: &mut [u32]) -> bool {
        let n = g.id_bound();
        self.reset(n);
        for v in g.vertices() {
            let i = v.index();
            if mate[i] == NONE && g.degree(v) > 0 {
                self.even[i] = true;
                self.root[i] = i as u32;
                self.labeled.push(i as u32);
                self.queue.push(i as u32);
            }
        }
        if self.queue.len() < 2 {
            return false;
        }
        let mut head = 0;
        while head < self.queue.len() {
            let v = self.queue[head];
            head += 1;
            for &to in g.neighbors(VertexId(v)) {
                let to = to.0;
                if self.base[v as usize] == self.base[to as usize] || mate[v as usize] == to {
                    continue;
                }
                if self.even[to as usize] {
                    if self.root[v as usize] != self.root[to as usize] {
                        let (ya, yb) = (mate[v as usize], mate[to as usize]);
                        mate[v as usize] = to;
                        mate[to as usize] = v;
                        self.flip(ya, mate);
                        self.flip(yb, mate);
                        return true;
                    }
                    let cb = self.lca(v, to, mate);
                    let s = self.next_stamp();
                    self.mark_path(v, cb, to, mate, s);
                    self.mark_path(to, cb, v, mate, s);
                    let tree = self.root[v as usize];
                    for idx in 0..self.labeled.len() {
                        let i = self.labeled[idx] as usize;
                        if self.blossom[self.base[i] as usize] == s {
                            self.base[i] = cb;
                            if !self.even[i] {
                                self.even[i] = true;
                                self.root[i] = tree;
                                self.queue.push(i as u32);
                            }
                        }
                    }
                } else if self.parent[to as usize] == NONE {
                    // `to` is matched: every exposed vertex with an edge is a root.
                    let tree = self.root[v as usize];
                    self.parent[to as usize] = v;
                    self.root[to as usize] = tree;
                    self.labeled.push(to);
                    let m = mate[to as usize];
                    self.even[m as usize] = true;
                    self.root[m as usize] = tree;
                    self.labeled.push(m);
                    self.queue.push(m);
                }
            }
        }
        false
    }
}

/// A maximum matching kept up to date while the graph changes.
///
/// Callers report lost edges with [`IncrementalMatching::edge_removed`] or
/// [`IncrementalMatching::vertex_removed`] and then call
/// [`IncrementalMatching::repair`].
#[derive(Clone, Debug, Default)]
pub struct IncrementalMatching {
    mate: Vec<u32>,
    size: usize,
    forest: Forest,
}

impl IncrementalMatching {
    pub fn new(g: &Graph) -> Self {
        let mut m = IncrementalMatching::default();
        m.repair(g, None);
        m
    }

    /// Current matching size; equals the matching number after a repair.
    pub fn nu(&self) -> usize {
        self.size
    }

    pub fn mate(&self, v: VertexId) -> Option<VertexId> {
        match self.mate.get(v.index()) {
            Some(&m) if m != NONE => Some(VertexId(m)),
            _ => None,
        }
    }

    pub fn matching(&self) -> Matching {
        Matching::from_edges(self.edges()).expect("mate array is an involution")
    }

    /// Matched edges in ascending order of the smaller endpoint.
    pub fn edges(&self) -> Vec<Edge> {
        self.mate
            .iter()
            .enumerate()
            .filter(|&(i, &m)| m != NONE && (i as u32) < m)
            .map(|(i, &m)| Edge::new(VertexId::from(i), VertexId(m)))
            .collect()
    }

    pub fn edge_removed(&mut self, u: VertexId, v: VertexId) {
        if self.mate(u) == Some(v) {
            self.mate[u.index()] = NONE;
            self.mate[v.index()] = NONE;
            self.size -= 1;
        }
    }

    pub fn vertex_removed(&mut self, v: VertexId) {
        if let Some(u) = self.mate(v) {
            self.edge_removed(u, v);
        }
    }

    /// Discards the current matching and rebuilds it from scratch.
    pub fn recompute(&mut self, g: &Graph) {
        self.mate.clear();
        self.size = 0;
        self.repair(g, None);
    }

    /// Restores maximality. `upper_bound`, when known, lets the search stop
    /// without a final failing phase once the bound is reached.
    pub fn repair(&mut self, g: &Graph, upper_bound: Option<usize>) {
        let n = g.id_bound();
        if self.mate.len() < n {
            self.mate.resize(n, NONE);
        }
        debug_assert!(self.is_consistent(g));
        for v in g.vertices() {
            if self.mate[v.index()] != NONE {
                continue;
            }
            for &u in g.neighbors(v) {
                if self.mate[u.index()] == NONE {
                    self.mate[v.index()] = u.0;
                    self.mate[u.index()] = v.0;
                    self.size += 1;
                    break;
                }
            }
        }
        while upper_bound.map_or(true, |ub| self.size < ub) {
            if self.forest.augment(g, &mut self.mate) {
                self.size += 1;
            } else {
                break;
            }
        }
    }

    fn is_consistent(&self, g: &Graph) -> bool {
        let mut count = 0;
        for (i, &m) in self.mate.iter().enumerate() {
            if m == NONE {
                continue;
            }
            let (a, b) = (VertexId::from(i), VertexId(m));
            if self.mate.get(m as usize) != Some(&(i as u32)) || !g.has_edge(a, b) {
                return false;
            }
            count += 1;
        }
        count == 2 * self.size
    }
}
