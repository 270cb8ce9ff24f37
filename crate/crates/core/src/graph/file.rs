//! JSON graph description.
//!
//! ```json
//! {
//!   "vertices": 2,
//!   "edges": [{"u": 0, "v": 1, "length": 1.0,
//!              "potential": [{"width": 0.2, "q": 3.0}], "cut": 0.5}],
//!   "rays": [{"vertex": 0}, {"vertex": 1, "potential": []}],
//!   "conditions": "kirchhoff"
//! }
//! ```
//!
//! `potential` and `cut` are optional. `conditions` is either the string
//! `"kirchhoff"` or one entry per vertex, each being `"kirchhoff"`,
//! `"dirichlet"`, `"neumann"` or `{"A": [[[re, im], ...], ...], "B": ...}`.
//! Unknown fields are rejected.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{
    complex_from_pair, Edge, MetricGraph, PiecewisePotential, Ray, Segment, VertexCondition,
    VertexConditions,
};
use crate::error::{Error, Result};
use crate::linalg::CMat;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    pub width: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub u: usize,
    pub v: usize,
    pub length: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub potential: Vec<SegmentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RaySpec {
    pub vertex: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub potential: Vec<SegmentSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub vertices: usize,
    #[serde(default)]
    pub edges: Vec<EdgeSpec>,
    pub rays: Vec<RaySpec>,
    pub conditions: Value,
}

fn potential_from(spec: &[SegmentSpec]) -> PiecewisePotential {
    PiecewisePotential::new(
        spec.iter()
            .map(|s| Segment {
                width: s.width,
                q: s.q,
            })
            .collect(),
    )
}

fn potential_to(p: &PiecewisePotential) -> Vec<SegmentSpec> {
    p.segments()
        .iter()
        .map(|s| SegmentSpec {
            width: s.width,
            q: s.q,
        })
        .collect()
}

fn parse_matrix(value: &Value, field: &str, degree: usize) -> Result<CMat> {
    let err = |msg: String| Error::Parse(format!("{field}: {msg}"));
    let rows = value
        .as_array()
        .ok_or_else(|| err("expected an array of rows".into()))?;
    if rows.len() != degree {
        return Err(err(format!("expected {degree} rows, found {}", rows.len())));
    }
    let mut m = CMat::zeros(degree, degree);
    for (i, row) in rows.iter().enumerate() {
        let entries = row
            .as_array()
            .ok_or_else(|| err(format!("row {i} is not an array")))?;
        if entries.len() != degree {
            return Err(err(format!(
                "row {i}: expected {degree} entries, found {}",
                entries.len()
            )));
        }
        for (j, entry) in entries.iter().enumerate() {
            let pair: [f64; 2] = serde_json::from_value(entry.clone())
                .map_err(|_| err(format!("entry [{i}][{j}] must be [re, im]")))?;
            m[(i, j)] = complex_from_pair(pair);
        }
    }
    Ok(m)
}

fn parse_vertex_condition(value: &Value, v: usize, degree: usize) -> Result<VertexCondition> {
    match value {
        Value::String(name) => named_condition(name, degree)
            .ok_or_else(|| Error::Parse(format!("conditions[{v}]: unknown condition `{name}`"))),
        Value::Object(map) => {
            if let Some(extra) = map.keys().find(|k| *k != "A" && *k != "B") {
                return Err(Error::Parse(format!("conditions[{v}]: unknown field `{extra}`")));
            }
            let get = |key: &str| {
                map.get(key)
                    .ok_or_else(|| Error::Parse(format!("conditions[{v}]: missing field `{key}`")))
            };
            let a = parse_matrix(get("A")?, &format!("conditions[{v}].A"), degree)?;
            let b = parse_matrix(get("B")?, &format!("conditions[{v}].B"), degree)?;
            Ok(VertexCondition::new(a, b))
        }
        _ => Err(Error::Parse(format!(
            "conditions[{v}]: expected a name or an object with fields `A` and `B`"
        ))),
    }
}

fn named_condition(name: &str, degree: usize) -> Option<VertexCondition> {
    match name {
        "kirchhoff" => Some(VertexCondition::kirchhoff(degree)),
        "dirichlet" => Some(VertexCondition::dirichlet(degree)),
        "neumann" => Some(VertexCondition::neumann(degree)),
        _ => None,
    }
}

impl GraphSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph spec serializes")
    }

    /// Builds the graph and its conditions. Structural validation is left to
    /// [`super::validate`]; this only fails on malformed condition data.
    pub fn build(&self) -> Result<(MetricGraph, VertexConditions)> {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                u: e.u,
                v: e.v,
                length: e.length,
                potential: potential_from(&e.potential),
                cut: e.cut,
            })
            .collect();
        let rays = self
            .rays
            .iter()
            .map(|r| Ray::new(r.vertex).with_potential(potential_from(&r.potential)))
            .collect();
        let graph = MetricGraph::new(self.vertices, edges, rays);
        let degrees: Vec<usize> = (0..self.vertices).map(|v| graph.degree(v)).collect();
        let conditions = match &self.conditions {
            Value::String(name) => {
                let per_vertex = degrees
                    .iter()
                    .map(|&d| named_condition(name, d))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| Error::Parse(format!("conditions: unknown condition `{name}`")))?;
                VertexConditions::new(per_vertex)
            }
            Value::Array(items) => {
                if items.len() != self.vertices {
                    return Err(Error::Parse(format!(
                        "conditions: expected {} entries (one per vertex), found {}",
                        self.vertices,
                        items.len()
                    )));
                }
                VertexConditions::new(
                    items
                        .iter()
                        .enumerate()
                        .map(|(v, item)| parse_vertex_condition(item, v, degrees[v]))
                        .collect::<Result<_>>()?,
                )
            }
            _ => {
                return Err(Error::Parse(
                    "conditions: expected \"kirchhoff\" or a per-vertex array".into(),
                ))
            }
        };
        Ok((graph, conditions))
    }

    pub fn from_graph(graph: &MetricGraph, conditions: &VertexConditions) -> Self {
        let matrix = |m: &CMat| -> Value {
            Value::Array(
                m.row_iter()
                    .map(|row| {
                        Value::Array(
                            row.iter()
                                .map(|z| serde_json::json!([z.re, z.im]))
                                .collect(),
                        )
                    })
                    .collect(),
            )
        };
        Self {
            vertices: graph.vertex_count(),
            edges: graph
                .edges()
                .iter()
                .map(|e| EdgeSpec {
                    u: e.u,
                    v: e.v,
                    length: e.length,
                    potential: potential_to(&e.potential),
                    cut: e.cut,
                })
                .collect(),
            rays: graph
                .rays()
                .iter()
                .map(|r| RaySpec {
                    vertex: r.vertex,
                    potential: potential_to(&r.potential),
                })
                .collect(),
            conditions: Value::Array(
                conditions
                    .iter()
                    .map(|c| serde_json::json!({"A": matrix(&c.a), "B": matrix(&c.b)}))
                    .collect(),
            ),
        }
    }
}

/// Parses and builds a graph description in one step.
pub fn parse_graph(text: &str) -> Result<(MetricGraph, VertexConditions)> {
    GraphSpec::from_json(text)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{kirchhoff_conditions, ring_with_two_leads, validate};

    const RING: &str = r#"{
        "vertices": 2,
        "edges": [{"u": 0, "v": 1, "length": 1.0}, {"u": 0, "v": 1, "length": 1.0}],
        "rays": [{"vertex": 0}, {"vertex": 1}],
        "conditions": "kirchhoff"
    }"#;

    #[test]
    fn parses_ring() {
        let (g, c) = parse_graph(RING).unwrap();
        assert_eq!(g, ring_with_two_leads(1.0));
        assert_eq!(c, kirchhoff_conditions(&g));
    }

    #[test]
    fn unknown_field_is_named() {
        let text = RING.replace("\"length\": 1.0}", "\"length\": 1.0, \"colour\": 3}");
        let err = parse_graph(&text).unwrap_err().to_string();
        assert!(err.contains("colour"), "{err}");
    }

    #[test]
    fn per_vertex_conditions() {
        let text = r#"{
            "vertices": 1,
            "rays": [{"vertex": 0}, {"vertex": 0}],
            "conditions": [{"A": [[[1,0],[0,0]],[[0,0],[1,0]]], "B": [[[0,0],[0,0]],[[0,0],[0,0]]]}]
        }"#;
        let (g, c) = parse_graph(text).unwrap();
        assert!(validate(&g, &c).is_empty());
        assert_eq!(c.get(0), &VertexCondition::dirichlet(2));
    }

    #[test]
    fn bad_matrix_shape_is_named() {
        let text = r#"{
            "vertices": 1,
            "rays": [{"vertex": 0}],
            "conditions": [{"A": [[[1,0],[0,0]]], "B": [[[0,0]]]}]
        }"#;
        let err = parse_graph(text).unwrap_err().to_string();
        assert!(err.contains("conditions[0].A"), "{err}");
    }

    #[test]
    fn round_trip_through_json() {
        let g = ring_with_two_leads(0.75);
        let c = kirchhoff_conditions(&g);
        let text = GraphSpec::from_graph(&g, &c).to_json();
        let (g2, c2) = parse_graph(&text).unwrap();
        assert_eq!(g, g2);
        assert_eq!(c, c2);
    }
}
