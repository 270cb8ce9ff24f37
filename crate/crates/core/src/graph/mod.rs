//! Non-compact metric graphs, piecewise-constant potentials and separated
//! self-adjoint vertex conditions.
//!
//! Rays are indexed first (`0..n`), interior edges after them, matching the
//! component layout of the boundary-value problem. At every vertex the
//! incident ends are ordered as: rays anchored there (by ray index), then
//! edge ends by edge index, with the `x = 0` end of an edge before its
//! `x = a` end. Condition matrices use this order.

mod decompose;
pub mod file;

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, max_abs, CMat, I, ONE};

pub use decompose::{star_decomposition, Star, StarDecomposition};

/// One constant piece of a potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub width: f64,
    pub q: f64,
}

/// Piecewise-constant real potential starting at `x = 0`; zero beyond the
/// last segment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PiecewisePotential {
    segments: Vec<Segment>,
}

impl PiecewisePotential {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(segments: Vec<Segment>) -> Self {
        Self { segments }
    }

    pub fn constant(width: f64, q: f64) -> Self {
        Self::new(vec![Segment { width, q }])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn support_end(&self) -> f64 {
        self.segments.iter().map(|s| s.width).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.segments.iter().all(|s| s.q == 0.0)
    }

    /// `(start, end, q)` for every segment.
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.segments.iter().scan(0.0, |x, s| {
            let start = *x;
            *x += s.width;
            Some((start, *x, s.q))
        })
    }

    pub fn value_at(&self, x: f64) -> f64 {
        self.intervals()
            .find(|&(a, b, _)| x >= a && x < b)
            .map_or(0.0, |(_, _, q)| q)
    }

    /// The potential on `[x0, x1]`, re-based to start at zero. Trailing
    /// zero pieces are dropped.
    pub fn restrict(&self, x0: f64, x1: f64) -> Self {
        let mut out = Vec::new();
        for (a, b, q) in self.intervals() {
            let lo = a.max(x0);
            let hi = b.min(x1);
            if hi > lo {
                out.push(Segment { width: hi - lo, q });
            }
        }
        let tail = self.support_end().max(x0);
        if x1 > tail && !out.is_empty() {
            out.push(Segment {
                width: x1 - tail,
                q: 0.0,
            });
        }
        Self::new(out).trimmed()
    }

    /// Mirror image on `[0, length]`: `q_rev(y) = q(length - y)`.
    pub fn reversed(&self, length: f64) -> Self {
        let mut segs = self.restrict(0.0, length).segments;
        let used: f64 = segs.iter().map(|s| s.width).sum();
        if length > used && !segs.is_empty() {
            segs.push(Segment {
                width: length - used,
                q: 0.0,
            });
        }
        segs.reverse();
        Self::new(segs).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.segments.last().is_some_and(|s| s.q == 0.0) {
            self.segments.pop();
        }
        self
    }
}

/// Interior edge, coordinate running from `u` (`x = 0`) to `v` (`x = length`).
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub length: f64,
    pub potential: PiecewisePotential,
    /// Cut point used by the star decomposition; midpoint when `None`.
    pub cut: Option<f64>,
}

impl Edge {
    pub fn new(u: usize, v: usize, length: f64) -> Self {
        Self {
            u,
            v,
            length,
            potential: PiecewisePotential::zero(),
            cut: None,
        }
    }

    pub fn with_potential(mut self, potential: PiecewisePotential) -> Self {
        self.potential = potential;
        self
    }

    pub fn with_cut(mut self, cut: f64) -> Self {
        self.cut = Some(cut);
        self
    }

    pub fn cut_point(&self) -> f64 {
        self.cut.unwrap_or(0.5 * self.length)
    }
}

/// Semi-infinite ray `[0, ∞)` anchored at `vertex`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ray {
    pub vertex: usize,
    pub potential: PiecewisePotential,
}

impl Ray {
    pub fn new(vertex: usize) -> Self {
        Self {
            vertex,
            potential: PiecewisePotential::zero(),
        }
    }

    pub fn with_potential(mut self, potential: PiecewisePotential) -> Self {
        self.potential = potential;
        self
    }
}

/// An end incident to a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    Ray(usize),
    EdgeStart(usize),
    EdgeEnd(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    rays: Vec<Ray>,
}

impl MetricGraph {
    pub fn new(vertex_count: usize, edges: Vec<Edge>, rays: Vec<Ray>) -> Self {
        Self {
            vertex_count,
            edges,
            rays,
        }
    }

    /// One vertex with `rays` free rays and no potential.
    pub fn star(rays: usize) -> Self {
        Self::new(1, Vec::new(), (0..rays).map(|_| Ray::new(0)).collect())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    pub fn ray_count(&self) -> usize {
        self.rays.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_ends(&self, v: usize) -> Vec<End> {
        let mut ends: Vec<End> = self
            .rays
            .iter()
            .enumerate()
            .filter(|(_, r)| r.vertex == v)
            .map(|(j, _)| End::Ray(j))
            .collect();
        for (e, edge) in self.edges.iter().enumerate() {
            if edge.u == v {
                ends.push(End::EdgeStart(e));
            }
            if edge.v == v {
                ends.push(End::EdgeEnd(e));
            }
        }
        ends
    }

    pub fn degree(&self, v: usize) -> usize {
        self.vertex_ends(v).len()
    }

    fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return false;
        }
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for e in &self.edges {
                for (a, b) in [(e.u, e.v), (e.v, e.u)] {
                    if a == v && b < self.vertex_count && !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// `A ψ + B ψ' = 0` at one vertex, `ψ'` being inward derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexCondition {
    pub a: CMat,
    pub b: CMat,
}

impl VertexCondition {
    pub fn new(a: CMat, b: CMat) -> Self {
        Self { a, b }
    }

    /// Continuity plus vanishing sum of inward derivatives.
    pub fn kirchhoff(degree: usize) -> Self {
        let mut a = CMat::zeros(degree, degree);
        let mut b = CMat::zeros(degree, degree);
        for i in 0..degree.saturating_sub(1) {
            a[(i, i)] = ONE;
            a[(i, i + 1)] = -ONE;
        }
        if degree > 0 {
            b.row_mut(degree - 1).fill(ONE);
        }
        Self { a, b }
    }

    pub fn dirichlet(degree: usize) -> Self {
        Self {
            a: linalg::identity(degree),
            b: CMat::zeros(degree, degree),
        }
    }

    pub fn neumann(degree: usize) -> Self {
        Self {
            a: CMat::zeros(degree, degree),
            b: linalg::identity(degree),
        }
    }

    /// `A = U - I`, `B = i(U + I)` for a unitary `U`.
    pub fn from_unitary(u: &CMat) -> Self {
        let id = linalg::identity(u.nrows());
        Self {
            a: u - &id,
            b: (u + &id) * I,
        }
    }

    pub fn degree(&self) -> usize {
        self.a.nrows()
    }

    pub fn is_real(&self) -> bool {
        self.a.iter().chain(self.b.iter()).all(|z| z.im == 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexConditions {
    per_vertex: Vec<VertexCondition>,
}

impl VertexConditions {
    pub fn new(per_vertex: Vec<VertexCondition>) -> Self {
        Self { per_vertex }
    }

    pub fn get(&self, v: usize) -> &VertexCondition {
        &self.per_vertex[v]
    }

    pub fn len(&self) -> usize {
        self.per_vertex.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_vertex.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &VertexCondition> {
        self.per_vertex.iter()
    }

    pub fn all_real(&self) -> bool {
        self.per_vertex.iter().all(VertexCondition::is_real)
    }
}

pub fn kirchhoff_conditions(graph: &MetricGraph) -> VertexConditions {
    VertexConditions::new(
        (0..graph.vertex_count())
            .map(|v| VertexCondition::kirchhoff(graph.degree(v)))
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub enum Location {
    Graph,
    Vertex(usize),
    Edge(usize),
    Ray(usize),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Graph => write!(f, "graph"),
            Location::Vertex(v) => write!(f, "vertex {v}"),
            Location::Edge(e) => write!(f, "edge {e}"),
            Location::Ray(r) => write!(f, "ray {r}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ViolationKind {
    NoVertices,
    NoRays,
    Disconnected,
    VertexOutOfRange(usize),
    NonpositiveLength(f64),
    BadSegment { index: usize },
    PotentialBeyondEdge { support_end: f64 },
    CutOutsideEdge(f64),
    ConditionCount { expected: usize, found: usize },
    ConditionShape { degree: usize },
    ConditionRank { rank: usize, degree: usize },
    NotSelfAdjoint { residual: f64 },
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::NoVertices => write!(f, "no vertices"),
            ViolationKind::NoRays => write!(f, "no rays (graph must be non-compact)"),
            ViolationKind::Disconnected => write!(f, "graph is not connected"),
            ViolationKind::VertexOutOfRange(v) => write!(f, "vertex {v} out of range"),
            ViolationKind::NonpositiveLength(a) => write!(f, "nonpositive length {a}"),
            ViolationKind::BadSegment { index } => {
                write!(f, "potential segment {index} has nonpositive or non-finite width or value")
            }
            ViolationKind::PotentialBeyondEdge { support_end } => {
                write!(f, "potential support {support_end} exceeds edge length")
            }
            ViolationKind::CutOutsideEdge(c) => write!(f, "cut point {c} not inside edge"),
            ViolationKind::ConditionCount { expected, found } => {
                write!(f, "expected {expected} vertex conditions, found {found}")
            }
            ViolationKind::ConditionShape { degree } => {
                write!(f, "condition matrices must be {degree}x{degree}")
            }
            ViolationKind::ConditionRank { rank, degree } => {
                write!(f, "rank [A|B] = {rank} < degree {degree}")
            }
            ViolationKind::NotSelfAdjoint { residual } => {
                write!(f, "A B^† not hermitian (residual {residual:.3e})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub location: Location,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.kind)
    }
}

fn check_potential(p: &PiecewisePotential, location: Location, out: &mut Vec<Violation>) {
    for (index, s) in p.segments().iter().enumerate() {
        if !(s.width > 0.0 && s.width.is_finite() && s.q.is_finite()) {
            out.push(Violation {
                location: location.clone(),
                kind: ViolationKind::BadSegment { index },
            });
        }
    }
}

/// Every violated invariant, with its location. Empty means valid.
pub fn validate(graph: &MetricGraph, conditions: &VertexConditions) -> Vec<Violation> {
    let mut out = Vec::new();
    let push = |out: &mut Vec<Violation>, location, kind| out.push(Violation { location, kind });
    let nv = graph.vertex_count();
    if nv == 0 {
        push(&mut out, Location::Graph, ViolationKind::NoVertices);
        return out;
    }
    if graph.rays().is_empty() {
        push(&mut out, Location::Graph, ViolationKind::NoRays);
    }
    let mut endpoints_ok = true;
    for (e, edge) in graph.edges().iter().enumerate() {
        for w in [edge.u, edge.v] {
            if w >= nv {
                endpoints_ok = false;
                push(&mut out, Location::Edge(e), ViolationKind::VertexOutOfRange(w));
            }
        }
        if !(edge.length > 0.0 && edge.length.is_finite()) {
            push(&mut out, Location::Edge(e), ViolationKind::NonpositiveLength(edge.length));
        }
        check_potential(&edge.potential, Location::Edge(e), &mut out);
        let support = edge.potential.support_end();
        if support > edge.length * (1.0 + 1e-12) {
            push(
                &mut out,
                Location::Edge(e),
                ViolationKind::PotentialBeyondEdge {
                    support_end: support,
                },
            );
        }
        if let Some(c) = edge.cut {
            if !(c > 0.0 && c < edge.length) {
                push(&mut out, Location::Edge(e), ViolationKind::CutOutsideEdge(c));
            }
        }
    }
    for (j, ray) in graph.rays().iter().enumerate() {
        if ray.vertex >= nv {
            endpoints_ok = false;
            push(&mut out, Location::Ray(j), ViolationKind::VertexOutOfRange(ray.vertex));
        }
        check_potential(&ray.potential, Location::Ray(j), &mut out);
    }
    if endpoints_ok && !graph.is_connected() {
        push(&mut out, Location::Graph, ViolationKind::Disconnected);
    }
    if conditions.len() != nv {
        push(
            &mut out,
            Location::Graph,
            ViolationKind::ConditionCount {
                expected: nv,
                found: conditions.len(),
            },
        );
        return out;
    }
    if !endpoints_ok {
        return out;
    }
    for (v, cond) in conditions.iter().enumerate() {
        let d = graph.degree(v);
        if cond.a.shape() != (d, d) || cond.b.shape() != (d, d) {
            push(&mut out, Location::Vertex(v), ViolationKind::ConditionShape { degree: d });
            continue;
        }
        if d == 0 {
            continue;
        }
        let r = linalg::rank(&linalg::hstack(&cond.a, &cond.b));
        if r < d {
            push(&mut out, Location::Vertex(v), ViolationKind::ConditionRank { rank: r, degree: d });
        }
        let ab = &cond.a * cond.b.adjoint();
        let residual = linalg::max_abs_diff(&ab, &ab.adjoint());
        let scale = max_abs(&cond.a).max(max_abs(&cond.b)).max(1.0);
        if residual > 1e-10 * scale * scale {
            push(&mut out, Location::Vertex(v), ViolationKind::NotSelfAdjoint { residual });
        }
    }
    out
}

/// [`validate`] as a `Result`.
pub fn ensure_valid(graph: &MetricGraph, conditions: &VertexConditions) -> Result<()> {
    let violations = validate(graph, conditions);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidGraph(violations))
    }
}

/// Two vertices joined by two parallel edges of length `a` (oriented from
/// vertex 0 to vertex 1), with one ray at each vertex.
pub fn ring_with_two_leads(a: f64) -> MetricGraph {
    MetricGraph::new(
        2,
        vec![Edge::new(0, 1, a), Edge::new(0, 1, a)],
        vec![Ray::new(0), Ray::new(1)],
    )
}

pub(crate) fn complex_from_pair([re, im]: [f64; 2]) -> Complex64 {
    Complex64::new(re, im)
}
