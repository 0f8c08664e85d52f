use crate::graph::{Graph, GraphError, VertexId};

/// Joins `x` to every vertex of a new clique `K_{d(x)+2}`. No sequence of
/// DP-removals can then remove `x` or any clique vertex. Returns the clique.
pub fn attach_blocker(g: &mut Graph, x: VertexId) -> Result<Vec<VertexId>, GraphError> {
    let size = checked_degree(g, x)? + 2;
    let clique = add_clique(g, size);
    for &k in &clique {
        g.add_edge(x, k)?;
    }
    Ok(clique)
}

/// Joins both `u` and `v` to a shared clique `K_{max(d(u), d(v))+2}`. With
/// `u` and `v` of odd degree this keeps every degree in the graph even
/// apart from the clique's.
pub fn attach_shared_blocker(g: &mut Graph, u: VertexId, v: VertexId) -> Result<Vec<VertexId>, GraphError> {
    let size = checked_degree(g, u)?.max(checked_degree(g, v)?) + 2;
    let clique = add_clique(g, size);
    for &k in &clique {
        g.add_edge(u, k)?;
        g.add_edge(v, k)?;
    }
    Ok(clique)
}

fn checked_degree(g: &Graph, x: VertexId) -> Result<usize, GraphError> {
    if !g.contains(x) {
        return Err(GraphError::UnknownVertex(x));
    }
    Ok(g.degree(x))
}

fn add_clique(g: &mut Graph, size: usize) -> Vec<VertexId> {
    let clique: Vec<VertexId> = (0..size).map(|_| g.add_vertex()).collect();
    for (i, &a) in clique.iter().enumerate() {
        for &b in &clique[i + 1..] {
            g.add_edge(a, b).expect("fresh clique");
        }
    }
    clique
}

/// Blocks every vertex outside `keep`: one clique per vertex, or with
/// `even` set, odd-degree vertices are paired onto shared cliques.
pub fn block_all_except(g: &mut Graph, keep: &[VertexId], even: bool) -> Result<(), GraphError> {
    let targets: Vec<VertexId> = g.vertices().filter(|v| !keep.contains(v)).collect();
    if !even {
        for v in targets {
            attach_blocker(g, v)?;
        }
        return Ok(());
    }
    let (odd, rest): (Vec<VertexId>, Vec<VertexId>) = targets.iter().partition(|&&v| g.degree(v) % 2 == 1);
    for v in rest {
        attach_blocker(g, v)?;
    }
    for pair in odd.chunks(2) {
        match *pair {
            [u, v] => attach_shared_blocker(g, u, v)?,
            [u] => attach_blocker(g, u)?,
            _ => unreachable!(),
        };
    }
    Ok(())
}
