#![allow(dead_code)]

use nalgebra::Matrix2;
use num_complex::Complex64;
use qgscatter::graph::{Edge, MetricGraph, PiecewisePotential, Ray, Segment, VertexCondition, VertexConditions};
use qgscatter::symplectic::{lagrange_from_unitary, HermitianForm, Subspace};
use qgscatter::CMat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// ---------------------------------------------------------------------------
// ODE oracle: classical RK4 for -ψ'' + qψ = k²ψ, independent of the library's
// closed-form transfer matrices.
// ---------------------------------------------------------------------------

/// Breakpoints of the potential as `(start, end, q)`, zero beyond the last
/// segment.
fn pieces(potential: &PiecewisePotential) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    let mut x = 0.0;
    for s in potential.segments() {
        out.push((x, x + s.width, s.q));
        x += s.width;
    }
    out.push((x, f64::INFINITY, 0.0));
    out
}

fn rk4_constant(q: f64, k2: f64, y: [Complex64; 2], length: f64, steps: usize) -> [Complex64; 2] {
    let h = length / steps as f64;
    let rhs = |y: [Complex64; 2]| [y[1], y[0] * (q - k2)];
    let mut y = y;
    for _ in 0..steps {
        let k1 = rhs(y);
        let k2v = rhs([y[0] + k1[0] * (h / 2.0), y[1] + k1[1] * (h / 2.0)]);
        let k3 = rhs([y[0] + k2v[0] * (h / 2.0), y[1] + k2v[1] * (h / 2.0)]);
        let k4 = rhs([y[0] + k3[0] * h, y[1] + k3[1] * h]);
        for i in 0..2 {
            y[i] += (k1[i] + k2v[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
    }
    y
}

/// Integrates `(ψ, ψ')` from `x0` to `x1` (either direction), restarting at
/// every potential jump. Each constant stretch uses 10⁴ steps.
pub fn rk4_propagate(
    potential: &PiecewisePotential,
    k: f64,
    x0: f64,
    x1: f64,
    y0: [Complex64; 2],
) -> [Complex64; 2] {
    const STEPS: usize = 10_000;
    let k2 = k * k;
    let (lo, hi) = (x0.min(x1), x0.max(x1));
    let mut stretches: Vec<(f64, f64, f64)> = pieces(potential)
        .into_iter()
        .filter_map(|(a, b, q)| {
            let (a, b) = (a.max(lo), b.min(hi));
            (b > a).then_some((a, b, q))
        })
        .collect();
    if x1 < x0 {
        stretches.reverse();
    }
    let mut y = y0;
    for (a, b, q) in stretches {
        let signed = if x1 >= x0 { b - a } else { a - b };
        y = rk4_constant(q, k2, y, signed, STEPS);
    }
    y
}

pub fn rk4_transfer(potential: &PiecewisePotential, k: f64, x0: f64, x1: f64) -> Matrix2<f64> {
    let col0 = rk4_propagate(potential, k, x0, x1, [c(1.0, 0.0), c(0.0, 0.0)]);
    let col1 = rk4_propagate(potential, k, x0, x1, [c(0.0, 0.0), c(1.0, 0.0)]);
    Matrix2::new(col0[0].re, col1[0].re, col0[1].re, col1[1].re)
}

/// `(f±(0), f±'(0))` by integrating `e^{±ikx}` back from the end of the
/// support.
pub fn rk4_jost(potential: &PiecewisePotential, k: f64, outgoing: bool) -> [Complex64; 2] {
    let s = potential.segments().iter().map(|s| s.width).sum::<f64>();
    let ik = c(0.0, if outgoing { k } else { -k });
    let start = (ik * s).exp();
    rk4_propagate(potential, k, s, 0.0, [start, ik * start])
}

// ---------------------------------------------------------------------------
// Random instances.
// ---------------------------------------------------------------------------

pub fn gaussian(rng: &mut TestRng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn random_complex_matrix(rng: &mut TestRng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| c(gaussian(rng), gaussian(rng)))
}

/// Haar-distributed unitary from the QR factorization of a complex Gaussian
/// matrix.
pub fn random_unitary(rng: &mut TestRng, m: usize) -> CMat {
    let z = random_complex_matrix(rng, m, m);
    let qr = z.qr();
    let (q, r) = qr.unpack();
    let mut q = q;
    for j in 0..m {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Random `q`-dimensional isotropic subspace of the canonical `2m` space,
/// drawn from inside a random Lagrange plane.
pub fn random_isotropic(rng: &mut TestRng, m: usize, q: usize) -> Subspace {
    let plane = lagrange_from_unitary(&random_unitary(rng, m)).unwrap();
    let mix = random_complex_matrix(rng, m, q);
    Subspace::new(plane.basis() * mix).unwrap()
}

pub fn random_lagrange(rng: &mut TestRng, m: usize) -> Subspace {
    let plane = lagrange_from_unitary(&random_unitary(rng, m)).unwrap();
    let mix = random_complex_matrix(rng, m, m);
    Subspace::new(plane.basis() * mix).unwrap()
}

/// `X^† J X` for a random invertible `X`.
pub fn random_form(rng: &mut TestRng, m: usize) -> HermitianForm {
    let x = random_complex_matrix(rng, 2 * m, 2 * m);
    let j = HermitianForm::canonical(m);
    HermitianForm::new(x.adjoint() * j.matrix() * &x).unwrap()
}

pub fn random_vector(rng: &mut TestRng, n: usize) -> qgscatter::CVec {
    qgscatter::CVec::from_fn(n, |_, _| c(gaussian(rng), gaussian(rng)))
}

pub fn random_potential(rng: &mut TestRng) -> PiecewisePotential {
    let segments = rng.random_range(1..=4);
    PiecewisePotential::new(
        (0..segments)
            .map(|_| Segment {
                width: rng.random_range(0.05..0.5),
                q: rng.random_range(-3.0..3.0),
            })
            .collect(),
    )
}

fn real_matrix(rng: &mut TestRng, d: usize) -> CMat {
    CMat::from_fn(d, d, |_, _| c(gaussian(rng), 0.0))
}

fn real_symmetric(rng: &mut TestRng, d: usize) -> CMat {
    let m = real_matrix(rng, d);
    (&m + m.transpose()) * c(0.5, 0.0)
}

/// Self-adjoint real conditions `(C L, C)` or `(C, C L)` with `L` symmetric
/// and `C` invertible.
pub fn random_real_condition(rng: &mut TestRng, d: usize) -> VertexCondition {
    let l = real_symmetric(rng, d);
    let cm = loop {
        let cm = real_matrix(rng, d);
        if qgscatter::linalg::sigma_extremes(&cm).0 > 0.1 {
            break cm;
        }
    };
    if rng.random_bool(0.5) {
        VertexCondition::new(&cm * l, cm)
    } else {
        let b = &cm * l;
        VertexCondition::new(cm, b)
    }
}

#[derive(Debug, Clone)]
pub struct RandomGraph {
    pub graph: MetricGraph,
    pub conditions: VertexConditions,
    pub real: bool,
}

/// Connected graph with at most 5 vertices, 6 edges and 6 rays, zero
/// potential, each vertex carrying Kirchhoff, Dirichlet or random real
/// conditions (plus complex unitary ones when `complex` is set).
pub fn random_graph(rng: &mut TestRng, complex: bool) -> RandomGraph {
    let nv = rng.random_range(1..=5);
    let mut edges = Vec::new();
    for v in 1..nv {
        let u = rng.random_range(0..v);
        let len = rng.random_range(0.5..2.0);
        edges.push(if rng.random_bool(0.5) { Edge::new(u, v, len) } else { Edge::new(v, u, len) });
    }
    let extra = rng.random_range(0..=(6 - edges.len()));
    for _ in 0..extra {
        let u = rng.random_range(0..nv);
        let v = rng.random_range(0..nv);
        edges.push(Edge::new(u, v, rng.random_range(0.5..2.0)));
    }
    let nr = rng.random_range(1..=6);
    let rays = (0..nr).map(|_| Ray::new(rng.random_range(0..nv))).collect();
    let graph = MetricGraph::new(nv, edges, rays);
    let mut real = true;
    let conditions = VertexConditions::new(
        (0..nv)
            .map(|v| {
                let d = graph.degree(v);
                let pick = rng.random_range(0..if complex { 5 } else { 4 });
                match pick {
                    0 | 1 if d > 0 => VertexCondition::kirchhoff(d),
                    2 => VertexCondition::dirichlet(d),
                    3 => random_real_condition(rng, d),
                    4 => {
                        real = false;
                        VertexCondition::from_unitary(&random_unitary(rng, d))
                    }
                    _ => VertexCondition::kirchhoff(d),
                }
            })
            .collect(),
    );
    RandomGraph { graph, conditions, real }
}

// ---------------------------------------------------------------------------
// Closed forms for the Y-graph and the ring with two leads.
// ---------------------------------------------------------------------------

pub fn y_matrix() -> CMat {
    CMat::from_fn(3, 3, |i, j| c(if i == j { -1.0 / 3.0 } else { 2.0 / 3.0 }, 0.0))
}

/// `(1/γ)[[3(ζ̄ - ζ), 8], [8, 3(ζ̄ - ζ)]]`, `γ = 9ζ - ζ̄`, `ζ = e^{-ika}`.
pub fn ring_closed_form(k: f64, a: f64) -> CMat {
    let zeta = Complex64::from_polar(1.0, -k * a);
    let gamma = zeta * 9.0 - zeta.conj();
    let d = (zeta.conj() - zeta) * 3.0 / gamma;
    let o = c(8.0, 0.0) / gamma;
    CMat::from_row_slice(2, 2, &[d, o, o, d])
}
