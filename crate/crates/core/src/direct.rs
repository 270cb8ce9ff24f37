//! Scattering matrix and interior eigenfunctions from the full vertex
//! boundary-value system.
//!
//! Unknowns for incoming ray `i` are the outgoing amplitudes `S_i1..S_in`
//! followed by `(ψ_e(0), ψ_e'(0))` for every interior edge `e`. On ray `j` the
//! solution is `δ_ij f-_j + S_ij f+_j`; on edge `e` it is
//! `ψ_e(0) θ_e + ψ_e'(0) φ_e`. Each vertex contributes `deg(v)` equations, so
//! the system is square of size `n + 2p`.

use num_complex::Complex64;

use crate::edge::{jost_boundary_data, transfer_matrix, BoundaryData, Jost, Momentum};
use crate::error::{Error, Result};
use crate::graph::{ensure_valid, End, MetricGraph, VertexConditions};
use crate::linalg::{self, lu_solve, symmetry_residual, unitarity_residual, CMat, ZERO};

/// Relative cutoff below which the boundary system is treated as singular.
pub const DEGENERATE_REL_TOL: f64 = 1e-12;

/// Relative cutoff for counting interior kernel directions.
pub const KERNEL_REL_TOL: f64 = 1e-8;

/// Largest `|S^†S - I|` accepted before reporting an internal failure.
pub const UNITARITY_TOL: f64 = 1e-8;

/// `S(k)`; row `i` holds the outgoing amplitudes for a unit incoming wave on
/// ray `i`.
#[derive(Debug, Clone)]
pub struct ScatteringMatrix {
    k: Momentum,
    entries: CMat,
}

impl ScatteringMatrix {
    pub fn new(k: Momentum, entries: CMat) -> Self {
        Self { k, entries }
    }

    pub fn k(&self) -> Momentum {
        self.k
    }

    pub fn entries(&self) -> &CMat {
        &self.entries
    }

    pub fn into_entries(self) -> CMat {
        self.entries
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual(&self.entries)
    }

    pub fn symmetry_residual(&self) -> f64 {
        symmetry_residual(&self.entries)
    }
}

/// Per-end contribution to vertex equations: coefficients multiplying the
/// unknown vector for (value, inward derivative), plus the known
/// incoming-wave part.
struct EndRow {
    value: Vec<(usize, Complex64)>,
    derivative: Vec<(usize, Complex64)>,
}

struct BoundarySystem {
    matrix: CMat,
    /// Column `i`: right-hand side for unit incoming wave on ray `i`.
    rhs: CMat,
    rays: usize,
}

fn edge_unknown(graph: &MetricGraph, e: usize) -> usize {
    graph.ray_count() + 2 * e
}

fn assemble(graph: &MetricGraph, conditions: &VertexConditions, k: Momentum) -> BoundarySystem {
    let n = graph.ray_count();
    let size = n + 2 * graph.edge_count();
    let outgoing: Vec<BoundaryData> = graph
        .rays()
        .iter()
        .map(|r| jost_boundary_data(&r.potential, k, Jost::Outgoing))
        .collect();
    let incoming: Vec<BoundaryData> = graph
        .rays()
        .iter()
        .map(|r| jost_boundary_data(&r.potential, k, Jost::Incoming))
        .collect();
    let transfers: Vec<_> = graph
        .edges()
        .iter()
        .map(|e| transfer_matrix(&e.potential, k, 0.0, e.length))
        .collect();
    let re = |x: f64| Complex64::new(x, 0.0);

    let mut matrix = CMat::zeros(size, size);
    let mut rhs = CMat::zeros(size, n);
    let mut row = 0;
    for v in 0..graph.vertex_count() {
        let cond = conditions.get(v);
        let ends = graph.vertex_ends(v);
        for r in 0..ends.len() {
            for (t, end) in ends.iter().enumerate() {
                let (a, b) = (cond.a[(r, t)], cond.b[(r, t)]);
                if a == ZERO && b == ZERO {
                    continue;
                }
                let contrib = match *end {
                    End::Ray(j) => {
                        rhs[(row, j)] -= a * incoming[j].value + b * incoming[j].derivative;
                        EndRow {
                            value: vec![(j, outgoing[j].value)],
                            derivative: vec![(j, outgoing[j].derivative)],
                        }
                    }
                    End::EdgeStart(e) => {
                        let c = edge_unknown(graph, e);
                        EndRow {
                            value: vec![(c, re(1.0))],
                            derivative: vec![(c + 1, re(1.0))],
                        }
                    }
                    End::EdgeEnd(e) => {
                        let c = edge_unknown(graph, e);
                        let t = &transfers[e];
                        EndRow {
                            value: vec![(c, re(t[(0, 0)])), (c + 1, re(t[(0, 1)]))],
                            // inward derivative at x = a is -ψ'(a)
                            derivative: vec![(c, re(-t[(1, 0)])), (c + 1, re(-t[(1, 1)]))],
                        }
                    }
                };
                for (col, w) in contrib.value {
                    matrix[(row, col)] += a * w;
                }
                for (col, w) in contrib.derivative {
                    matrix[(row, col)] += b * w;
                }
            }
            row += 1;
        }
    }
    BoundarySystem { matrix, rhs, rays: n }
}

/// Solves the boundary-value problem for every incoming ray.
pub fn scattering_direct(
    graph: &MetricGraph,
    conditions: &VertexConditions,
    k: Momentum,
) -> Result<ScatteringMatrix> {
    ensure_valid(graph, conditions)?;
    let system = assemble(graph, conditions, k);
    let (sigma_min, sigma_max) = linalg::sigma_extremes(&system.matrix);
    if sigma_min < DEGENERATE_REL_TOL * sigma_max || sigma_max == 0.0 {
        return Err(Error::Degenerate {
            k: k.k(),
            sigma_min,
        });
    }
    let solution = lu_solve(&system.matrix, &system.rhs).ok_or(Error::Degenerate {
        k: k.k(),
        sigma_min,
    })?;
    // column i of the solution holds row i of S
    let n = system.rays;
    let s = solution.rows(0, n).transpose();
    let residual = unitarity_residual(&s);
    if residual > UNITARITY_TOL {
        return Err(Error::Inconsistent {
            what: "unitarity of direct scattering matrix",
            residual,
        });
    }
    Ok(ScatteringMatrix::new(k, s))
}

/// Solutions of the homogeneous problem that vanish identically on all rays.
#[derive(Debug, Clone)]
pub struct InteriorKernel {
    pub dimension: usize,
    /// Columns are `(ψ_e(0), ψ_e'(0))` pairs stacked over edges.
    pub basis: CMat,
    /// Smallest singular value of the homogeneous system relative to the largest.
    pub relative_sigma_min: f64,
}

pub fn interior_kernel(
    graph: &MetricGraph,
    conditions: &VertexConditions,
    k: Momentum,
) -> Result<InteriorKernel> {
    ensure_valid(graph, conditions)?;
    let n = graph.ray_count();
    let p2 = 2 * graph.edge_count();
    if p2 == 0 {
        return Ok(InteriorKernel {
            dimension: 0,
            basis: CMat::zeros(0, 0),
            relative_sigma_min: 1.0,
        });
    }
    let system = assemble(graph, conditions, k);
    let homogeneous = system.matrix.columns(n, p2).into_owned();
    let (sigma_min, sigma_max) = linalg::sigma_extremes(&homogeneous);
    let basis = linalg::null_space(&homogeneous, KERNEL_REL_TOL);
    Ok(InteriorKernel {
        dimension: basis.ncols(),
        basis,
        relative_sigma_min: if sigma_max > 0.0 { sigma_min / sigma_max } else { 0.0 },
    })
}
