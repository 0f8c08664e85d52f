use std::collections::HashSet;

use serde::Serialize;

use super::GadgetError;
use crate::graph::StubGraph;
use crate::io::write_edge_list;
use crate::reduce::{all_certificates, dp_remove, is_irreducible, RemovabilityCertificate, ReductionResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum KernelComponent {
    K3,
    K4,
    /// Triangle on the deficient vertex, with a pendant leaf on up to two of
    /// the other triangle vertices.
    StubTriangle { pendants: usize },
    Other,
}

/// Shape of each component of a kernel candidate with maximum p-degree 3.
pub fn kernel_components(sg: &StubGraph) -> Result<Vec<KernelComponent>, GadgetError> {
    let g = sg.graph();
    let maxp = g.vertices().map(|v| sg.p_degree(v)).max().unwrap_or(0);
    if maxp > 3 {
        return Err(GadgetError::DegreeTooHigh(maxp));
    }
    let mut out = Vec::new();
    for comp in g.components() {
        let edges: usize = comp.iter().map(|&v| g.degree(v)).sum::<usize>() / 2;
        let stub = sg.deficient().filter(|s| comp.contains(s));
        let kind = match (stub, comp.len(), edges) {
            (None, 3, 3) => KernelComponent::K3,
            (None, 4, 6) => KernelComponent::K4,
            (Some(s), n, e) if g.degree(s) == 2 && e == n => {
                let [a, b] = [g.neighbors(s)[0], g.neighbors(s)[1]];
                let leaves = comp.iter().filter(|&&v| v != s && v != a && v != b).count();
                let pendant_ok = comp
                    .iter()
                    .filter(|&&v| v != s && v != a && v != b)
                    .all(|&v| g.degree(v) == 1 && (g.has_edge(v, a) || g.has_edge(v, b)));
                if g.has_edge(a, b) && leaves == n - 3 && pendant_ok && g.degree(a) <= 3 && g.degree(b) <= 3 {
                    KernelComponent::StubTriangle { pendants: leaves }
                } else {
                    KernelComponent::Other
                }
            }
            _ => KernelComponent::Other,
        };
        out.push(kind);
    }
    Ok(out)
}

/// Every component is `K_3`, `K_4` or the stub triangle with at most two
/// pendant edges. The empty graph passes.
pub fn check_low_degree_kernel(sg: &StubGraph) -> Result<bool, GadgetError> {
    Ok(kernel_components(sg)?.iter().all(|&c| c != KernelComponent::Other))
}

/// Searches for a removal sequence that never increases the number of
/// components and ends in a kernel passing [`check_low_degree_kernel`].
/// Vertices are tried by ascending degree, every certificate of each.
/// `None` when `node_limit` states are visited without success.
pub fn decompose_low_degree(sg: &StubGraph, node_limit: usize) -> Result<Option<ReductionResult>, GadgetError> {
    kernel_components(sg)?;
    let mut dfs = Decompose {
        seen: HashSet::new(),
        nodes: 0,
        limit: node_limit,
        path: Vec::new(),
    };
    let Some(kernel) = dfs.run(sg)? else {
        return Ok(None);
    };
    Ok(Some(ReductionResult {
        irreducible: is_irreducible(&kernel).0,
        removed_count: dfs.path.len(),
        removals: dfs.path,
        kernel,
    }))
}

struct Decompose {
    seen: HashSet<String>,
    nodes: usize,
    limit: usize,
    path: Vec<RemovabilityCertificate>,
}

impl Decompose {
    fn run(&mut self, sg: &StubGraph) -> Result<Option<StubGraph>, GadgetError> {
        if check_low_degree_kernel(sg)? {
            return Ok(Some(sg.clone()));
        }
        if self.nodes >= self.limit || !self.seen.insert(write_edge_list(sg)) {
            return Ok(None);
        }
        self.nodes += 1;
        let g = sg.graph();
        let components = g.component_count();
        let mut order: Vec<_> = g.vertices().collect();
        order.sort_by_key(|&v| (g.degree(v), v));
        for v in order {
            for cert in all_certificates(sg, v, usize::MAX)? {
                let mut next = sg.clone();
                dp_remove(&mut next, &cert)?;
                if next.graph().component_count() > components {
                    continue;
                }
                self.path.push(cert);
                if let Some(k) = self.run(&next)? {
                    return Ok(Some(k));
                }
                self.path.pop();
            }
        }
        Ok(None)
    }
}
