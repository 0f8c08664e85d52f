//! Edge-list text format.
//!
//! ```text
//! # n=5
//! 0 1
//! 1 2
//! ! removed=4
//! ! deficient=2
//! ```
//!
//! `n` is the id bound. Edges are listed once each in canonical ascending
//! order; tombstoned ids and the deficient vertex follow as `!` lines.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Graph, GraphError, StubGraph, VertexId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EdgeListError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing `# n=` header")]
    MissingHeader,
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
}

pub fn write_edge_list(sg: &StubGraph) -> String {
    let g = sg.graph();
    let mut out = String::new();
    writeln!(out, "# n={}", g.id_bound()).unwrap();
    for e in g.edges() {
        writeln!(out, "{} {}", e.u(), e.v()).unwrap();
    }
    let removed: Vec<String> = g.tombstones().map(|v| v.to_string()).collect();
    if !removed.is_empty() {
        writeln!(out, "! removed={}", removed.join(",")).unwrap();
    }
    if let Some(x) = sg.deficient() {
        writeln!(out, "! deficient={x}").unwrap();
    }
    out
}

pub fn write_graph(g: &Graph) -> String {
    write_edge_list(&StubGraph::new(g.clone()))
}

pub fn parse_edge_list(text: &str) -> Result<StubGraph, EdgeListError> {
    let syntax = |line: usize, msg: String| EdgeListError::Syntax { line, msg };
    let id = |line: usize, s: &str| {
        s.parse::<usize>()
            .map(VertexId::from)
            .map_err(|_| syntax(line, format!("bad vertex id {s:?}")))
    };
    let mut g: Option<Graph> = None;
    let mut edges = Vec::new();
    let mut removed = Vec::new();
    let mut deficient = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        if let Some(c) = l.strip_prefix('#') {
            if let Some(n) = c.trim().strip_prefix("n=") {
                if g.is_some() {
                    return Err(syntax(line, "duplicate header".into()));
                }
                let n = n.parse().map_err(|_| syntax(line, format!("bad vertex count {n:?}")))?;
                g = Some(Graph::with_vertices(n));
            }
            continue;
        }
        if let Some(d) = l.strip_prefix('!') {
            let (key, value) = d
                .trim()
                .split_once('=')
                .ok_or_else(|| syntax(line, format!("bad directive {l:?}")))?;
            match key {
                "removed" => {
                    for s in value.split(',').filter(|s| !s.is_empty()) {
                        removed.push((line, id(line, s)?));
                    }
                }
                "deficient" => deficient = Some((line, id(line, value)?)),
                _ => return Err(syntax(line, format!("unknown directive {key:?}"))),
            }
            continue;
        }
        let mut it = l.split_whitespace();
        let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
            return Err(syntax(line, format!("expected `u v`, got {l:?}")));
        };
        edges.push((line, id(line, a)?, id(line, b)?));
    }
    let mut g = g.ok_or(EdgeListError::MissingHeader)?;
    for (line, v) in removed {
        g.remove_vertex(v)
            .map_err(|source| EdgeListError::Graph { line, source })?;
    }
    for (line, a, b) in edges {
        g.add_edge(a, b)
            .map_err(|source| EdgeListError::Graph { line, source })?;
    }
    match deficient {
        None => Ok(StubGraph::new(g)),
        Some((line, x)) => StubGraph::with_deficient(g, Some(x)).map_err(|e| syntax(line, e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::*;
    use proptest::prelude::*;

    #[test]
    fn stub_and_tombstones_survive() {
        let mut g = cycle(5);
        g.remove_vertex(VertexId::from(4)).unwrap();
        let sg = StubGraph::with_deficient(g, Some(VertexId::from(2))).unwrap();
        let text = write_edge_list(&sg);
        assert_eq!(text, "# n=5\n0 1\n1 2\n2 3\n! removed=4\n! deficient=2\n");
        assert_eq!(parse_edge_list(&text).unwrap(), sg);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(parse_edge_list("0 1\n"), Err(EdgeListError::MissingHeader));
        let e = parse_edge_list("# n=3\n0 1\n1 1\n").unwrap_err();
        assert!(matches!(e, EdgeListError::Graph { line: 3, .. }), "{e:?}");
        let e = parse_edge_list("# n=3\n\n0 x\n").unwrap_err();
        assert_eq!(e.to_string(), "line 3: bad vertex id \"x\"");
    }

    #[test]
    fn comments_and_order_do_not_matter() {
        let g = parse_edge_list("# n=3\n# a triangle\n2 1\n\n0 2\n1 0\n").unwrap();
        assert_eq!(write_edge_list(&g), write_graph(&complete(3)));
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(seed in any::<u64>(), n in 0usize..20) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let g = gnp(n, 0.3, &mut rng);
            let text = write_graph(&g);
            let back = parse_edge_list(&text).unwrap();
            prop_assert_eq!(back.graph(), &g);
            prop_assert_eq!(write_edge_list(&back), text);
        }
    }
}
