//! Small dense complex linear-algebra helpers on top of `nalgebra`.
//!
//! Everything in the crate works with `DMatrix<Complex64>`; the helpers here
//! cover the rank-revealing pieces (SVD-based rank, null space, orthonormal
//! range) that the subspace machinery needs.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Relative singular-value cutoff used for rank decisions.
pub const RANK_REL_TOL: f64 = 1e-10;

pub const I: Complex64 = Complex64::new(0.0, 1.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Singular values in descending order. Empty matrices have none.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    m.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// `(sigma_min, sigma_max)` of a square or rectangular matrix.
pub fn sigma_extremes(m: &CMat) -> (f64, f64) {
    let sv = singular_values(m);
    match (sv.last(), sv.first()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => (0.0, 0.0),
    }
}

/// Numerical rank with singular values above `rel_tol * sigma_max`.
pub fn rank_with(m: &CMat, rel_tol: f64) -> usize {
    let sv = singular_values(m);
    let Some(&top) = sv.first() else { return 0 };
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

pub fn rank(m: &CMat) -> usize {
    rank_with(m, RANK_REL_TOL)
}

/// Orthonormal basis (as columns) of the null space of `m`.
///
/// `m` is padded with zero rows when it is wide so that the SVD yields a
/// complete right-singular basis.
pub fn null_space(m: &CMat, rel_tol: f64) -> CMat {
    let cols = m.ncols();
    if cols == 0 {
        return CMat::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return identity(cols);
    }
    let rows = m.nrows().max(cols);
    let mut padded = CMat::zeros(rows, cols);
    padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sv = &svd.singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    let cutoff = rel_tol * top;
    let kernel_rows: Vec<usize> = (0..sv.len())
        .filter(|&i| top == 0.0 || sv[i] <= cutoff)
        .collect();
    let mut out = CMat::zeros(cols, kernel_rows.len());
    for (j, &r) in kernel_rows.iter().enumerate() {
        for i in 0..cols {
            out[(i, j)] = v_t[(r, i)].conj();
        }
    }
    out
}

/// Orthonormal basis (as columns) of the column span of `m`.
pub fn orth(m: &CMat, rel_tol: f64) -> CMat {
    orth_above(m, |top| rel_tol * top)
}

/// Orthonormal basis of the range keeping singular values above `abs_tol`.
pub fn orth_abs(m: &CMat, abs_tol: f64) -> CMat {
    orth_above(m, |_| abs_tol)
}

fn orth_above(m: &CMat, cut: impl Fn(f64) -> f64) -> CMat {
    if m.ncols() == 0 || m.nrows() == 0 {
        return CMat::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let sv = &svd.singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return CMat::zeros(m.nrows(), 0);
    }
    let cut = cut(top);
    let keep: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] > cut).collect();
    CMat::from_fn(m.nrows(), keep.len(), |i, j| u[(i, keep[j])])
}

pub fn hstack(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.nrows(), b.nrows(), "hstack row mismatch");
    let mut out = CMat::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    out
}

pub fn block_diag(blocks: &[&CMat]) -> CMat {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), b.shape()).copy_from(*b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

/// `out[(i, j)] = m[(order[i], order[j])]`.
pub fn permute_symmetric(m: &CMat, order: &[usize]) -> CMat {
    CMat::from_fn(order.len(), order.len(), |i, j| m[(order[i], order[j])])
}

/// Largest elementwise modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `max |(S^† S - I)_ij|`.
pub fn unitarity_residual(s: &CMat) -> f64 {
    let n = s.ncols();
    max_abs_diff(&(s.adjoint() * s), &identity(n))
}

/// `max |S_ij - S_ji|`.
pub fn symmetry_residual(s: &CMat) -> f64 {
    max_abs_diff(s, &s.transpose())
}

/// Normalize every column to unit Euclidean norm (zero columns stay zero).
pub fn normalize_columns(m: &CMat) -> CMat {
    let mut out = m.clone();
    for mut col in out.column_iter_mut() {
        let n = col.norm();
        if n > 0.0 {
            col.unscale_mut(n);
        }
    }
    out
}

/// Solve `m x = rhs` by LU. `None` when the factorization is singular.
pub fn lu_solve(m: &CMat, rhs: &CMat) -> Option<CMat> {
    m.clone().lu().solve(rhs)
}
