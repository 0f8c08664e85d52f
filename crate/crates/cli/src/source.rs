//! Graph inputs: an edge-list file, or a built-in family written as
//! `gen:<family>[:<arg>]`, with `+` for disjoint unions
//! (`gen:complete:4+complete:4`).

use anyhow::{bail, Context, Result};
use dpg_core::gadgets::irreducible_4regular;
use dpg_core::graph::generators;
use dpg_core::io::parse_edge_list;
use dpg_core::{Graph, StubGraph};

use crate::manifest::Recorder;

fn family(spec: &str) -> Result<Graph> {
    let (name, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let n = || -> Result<usize> { arg.parse().with_context(|| format!("bad size in {spec:?}")) };
    Ok(match name {
        "complete" => generators::complete(n()?),
        "cycle" => generators::cycle(n()?),
        "path" => generators::path(n()?),
        "empty" => generators::empty(n()?),
        "star" => generators::star(n()?),
        "petersen" => generators::petersen(),
        "irreducible4" => irreducible_4regular(n()?)?,
        _ => bail!("unknown family {name:?} (complete, cycle, path, empty, star, petersen, irreducible4)"),
    })
}

pub fn generated(spec: &str) -> Result<Graph> {
    let parts: Vec<Graph> = spec.split('+').map(family).collect::<Result<_>>()?;
    Ok(generators::disjoint_union(&parts))
}

/// Reads `src` as a generator spec or an edge-list file.
pub fn load_graph(src: &str, rec: &mut Recorder) -> Result<StubGraph> {
    if let Some(spec) = src.strip_prefix("gen:") {
        return Ok(StubGraph::new(generated(spec)?));
    }
    let text = rec.read(src)?;
    parse_edge_list(&text).with_context(|| format!("parsing {src}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unions() {
        let g = generated("complete:4+complete:4").unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (8, 12));
        assert!(generated("cube:3").is_err());
        assert!(generated("complete:x").is_err());
    }
}
