use std::collections::HashSet;
use std::fs;
use std::path::Path;

use qgscatter::graph::ensure_valid;
use qgscatter::graph::file::parse_graph;
use qgscatter::{Error, Link, MetricGraph, Port, VertexConditions};
use serde::Deserialize;

use crate::CliError;

pub struct GraphInput {
    pub path: String,
    pub graph: MetricGraph,
    pub conditions: VertexConditions,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::new(2, format!("{}: {e}", path.display())))
}

/// Parses and validates a graph description file.
pub fn load_graph(path: &Path) -> Result<GraphInput, CliError> {
    let text = read(path)?;
    let name = path.display().to_string();
    let (graph, conditions) = parse_graph(&text).map_err(|e| CliError::from_error(&e).context(&name))?;
    ensure_valid(&graph, &conditions).map_err(|e| CliError::from_error(&e).context(&name))?;
    Ok(GraphInput {
        path: name,
        graph,
        conditions,
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinksFile {
    links: Vec<LinkEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkEntry {
    a: PortEntry,
    b: PortEntry,
    length: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PortEntry {
    graph: usize,
    ray: usize,
}

/// Reads a link file and checks it against the pieces: every port must name
/// an existing ray, be used at most once and carry a potential that fits on
/// the link together with its partner's.
pub fn load_links(path: &Path, pieces: &[GraphInput]) -> Result<Vec<Link>, CliError> {
    let name = path.display().to_string();
    let text = read(path)?;
    let file: LinksFile = serde_json::from_str(&text)
        .map_err(|e| CliError::from_error(&Error::Parse(e.to_string())).context(&name))?;
    let invalid = |msg: String| CliError::from_error(&Error::InvalidLink(msg)).context(&name);
    let mut used = HashSet::new();
    let mut links = Vec::with_capacity(file.links.len());
    for (l, entry) in file.links.iter().enumerate() {
        if !(entry.length.is_finite() && entry.length > 0.0) {
            return Err(invalid(format!("links[{l}].length = {} must be positive", entry.length)));
        }
        let mut support = 0.0;
        for (side, port) in [("a", &entry.a), ("b", &entry.b)] {
            let piece = pieces.get(port.graph).ok_or_else(|| {
                invalid(format!(
                    "links[{l}].{side}.graph = {} but only {} graph files were given",
                    port.graph,
                    pieces.len()
                ))
            })?;
            let ray = piece.graph.rays().get(port.ray).ok_or_else(|| {
                invalid(format!(
                    "links[{l}].{side}.ray = {} but {} has {} rays",
                    port.ray,
                    piece.path,
                    piece.graph.ray_count()
                ))
            })?;
            if !used.insert((port.graph, port.ray)) {
                return Err(invalid(format!(
                    "links[{l}].{side}: ray {} of graph {} is linked twice",
                    port.ray, port.graph
                )));
            }
            support += ray.potential.support_end();
        }
        if support > entry.length {
            return Err(invalid(format!(
                "links[{l}]: ray potentials extend {support} along a link of length {}",
                entry.length
            )));
        }
        links.push(Link::new(
            Port::new(entry.a.graph, entry.a.ray),
            Port::new(entry.b.graph, entry.b.ray),
            entry.length,
        ));
    }
    Ok(links)
}
