use super::{End, MetricGraph, Ray, VertexConditions};
use crate::error::{Error, Result};
use crate::factorization::{Link, Port};

/// A single-vertex graph cut out of a larger graph.
#[derive(Debug, Clone)]
pub struct Star {
    /// Vertex of the parent graph this star was built around.
    pub vertex: usize,
    pub graph: MetricGraph,
    pub conditions: VertexConditions,
    /// Parent end that each star ray stands for, in star ray order.
    pub ends: Vec<End>,
}

#[derive(Debug, Clone)]
pub struct StarDecomposition {
    pub stars: Vec<Star>,
    /// One link per parent edge, in edge order.
    pub links: Vec<Link>,
    /// Star port carrying each parent ray, in parent ray order.
    pub ray_ports: Vec<Port>,
}

/// Splits the graph into one star per vertex, cutting every edge at its cut
/// point. Each edge becomes a link between the two truncated rays whose
/// joined length is the edge length.
///
/// Fails when a cut point falls strictly inside a nonzero piece of an edge
/// potential.
pub fn star_decomposition(
    graph: &MetricGraph,
    conditions: &VertexConditions,
) -> Result<StarDecomposition> {
    super::ensure_valid(graph, conditions)?;
    for (e, edge) in graph.edges().iter().enumerate() {
        let c = edge.cut_point();
        let eps = 1e-12 * edge.length;
        let crosses = edge
            .potential
            .intervals()
            .any(|(a, b, q)| q != 0.0 && a < c - eps && b > c + eps);
        if crosses {
            return Err(Error::CutInsidePotential { edge: e, cut: c });
        }
    }

    let mut stars = Vec::with_capacity(graph.vertex_count());
    let mut ray_ports = vec![Port { piece: 0, ray: 0 }; graph.ray_count()];
    let mut start_port = vec![Port { piece: 0, ray: 0 }; graph.edge_count()];
    let mut end_port = start_port.clone();

    for v in 0..graph.vertex_count() {
        let ends = graph.vertex_ends(v);
        let rays = ends
            .iter()
            .enumerate()
            .map(|(local, end)| {
                let port = Port {
                    piece: v,
                    ray: local,
                };
                match *end {
                    End::Ray(j) => {
                        ray_ports[j] = port;
                        Ray::new(0).with_potential(graph.rays()[j].potential.clone())
                    }
                    End::EdgeStart(e) => {
                        start_port[e] = port;
                        let edge = &graph.edges()[e];
                        Ray::new(0).with_potential(edge.potential.restrict(0.0, edge.cut_point()))
                    }
                    End::EdgeEnd(e) => {
                        end_port[e] = port;
                        let edge = &graph.edges()[e];
                        let back = edge.potential.reversed(edge.length);
                        Ray::new(0).with_potential(back.restrict(0.0, edge.length - edge.cut_point()))
                    }
                }
            })
            .collect();
        stars.push(Star {
            vertex: v,
            graph: MetricGraph::new(1, Vec::new(), rays),
            conditions: VertexConditions::new(vec![conditions.get(v).clone()]),
            ends,
        });
    }

    let links = graph
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| Link {
            a: start_port[e],
            b: end_port[e],
            length: edge.length,
        })
        .collect();

    Ok(StarDecomposition {
        stars,
        links,
        ray_ports,
    })
}
