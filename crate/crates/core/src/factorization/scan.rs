//! Embedded eigenvalues from the singularity of `B_2p(k)`.

use super::network::{network_b2p, star_matrices};
use crate::direct::interior_kernel;
use crate::edge::Momentum;
use crate::error::Result;
use crate::graph::{star_decomposition, MetricGraph, StarDecomposition, VertexConditions};
use crate::linalg::sigma_extremes;
use crate::sweep;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    /// Refined minima of `σ_min(B_2p)` below this are reported.
    pub threshold: f64,
    /// Golden-section refinement stops once the bracket is this narrow.
    pub k_tolerance: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            threshold: 1e-6,
            k_tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddedEigenvalue {
    pub k: f64,
    /// `σ_min(B_2p)` at `k`.
    pub sigma_min: f64,
    /// Interior kernel dimension from the direct boundary system at `k`.
    pub kernel_dimension: usize,
    /// Relative smallest singular value of that system.
    pub kernel_sigma: f64,
}

/// `σ_min(B_2p(k))` for the star decomposition; `+∞` when there are no links.
pub fn b2p_sigma_min(decomposition: &StarDecomposition, k: Momentum) -> Result<f64> {
    if decomposition.links.is_empty() {
        return Ok(f64::INFINITY);
    }
    let stars = star_matrices(decomposition, k)?;
    let b = network_b2p(&stars, &decomposition.links, k)?;
    Ok(sigma_extremes(&b).0)
}

/// [`embedded_eigenvalue_scan_with`] using [`ScanOptions::default`].
pub fn embedded_eigenvalue_scan(
    graph: &MetricGraph,
    conditions: &VertexConditions,
    grid: &[f64],
) -> Result<Vec<EmbeddedEigenvalue>> {
    embedded_eigenvalue_scan_with(graph, conditions, grid, &ScanOptions::default())
}

/// Evaluates `σ_min(B_2p)` on the grid, refines every local minimum by
/// golden-section search inside its neighbouring grid cells and reports the
/// refined points that fall below the threshold, each checked against the
/// interior kernel of the full graph.
pub fn embedded_eigenvalue_scan_with(
    graph: &MetricGraph,
    conditions: &VertexConditions,
    grid: &[f64],
    options: &ScanOptions,
) -> Result<Vec<EmbeddedEigenvalue>> {
    let decomposition = star_decomposition(graph, conditions)?;
    if decomposition.links.is_empty() || grid.is_empty() {
        return Ok(Vec::new());
    }
    let mut ks = grid
        .iter()
        .map(|&k| Momentum::new(k).map(|m| m.k()))
        .collect::<Result<Vec<f64>>>()?;
    ks.sort_by(f64::total_cmp);
    ks.dedup();

    let sigma = |k: f64| -> Result<f64> { b2p_sigma_min(&decomposition, Momentum::new(k)?) };
    let values = sweep::map(&ks, |&k| sigma(k)).into_iter().collect::<Result<Vec<f64>>>()?;

    let last = ks.len() - 1;
    let brackets: Vec<(f64, f64)> = (0..ks.len())
        .filter(|&i| (i == 0 || values[i] <= values[i - 1]) && (i == last || values[i] <= values[i + 1]))
        .map(|i| (ks[i.saturating_sub(1)], ks[(i + 1).min(last)]))
        .collect();

    let refined = sweep::map(&brackets, |&(lo, hi)| golden_section(&sigma, lo, hi, options.k_tolerance))
        .into_iter()
        .collect::<Result<Vec<(f64, f64)>>>()?;

    let mut accepted: Vec<(f64, f64)> = refined
        .into_iter()
        .filter(|&(_, s)| s < options.threshold)
        .collect();
    accepted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (k, s) in accepted {
        match merged.last_mut() {
            Some(prev) if (k - prev.0).abs() < 1e3 * options.k_tolerance => {
                if s < prev.1 {
                    *prev = (k, s);
                }
            }
            _ => merged.push((k, s)),
        }
    }

    sweep::map(&merged, |&(k, s)| {
        let kernel = interior_kernel(graph, conditions, Momentum::new(k)?)?;
        Ok(EmbeddedEigenvalue {
            k,
            sigma_min: s,
            kernel_dimension: kernel.dimension,
            kernel_sigma: kernel.relative_sigma_min,
        })
    })
    .into_iter()
    .collect()
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Minimizer and minimum of `f` on `[lo, hi]`, bracket shrunk below `tol`.
fn golden_section<F>(f: &F, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    let (flo, fhi) = (f(lo)?, f(hi)?);
    let best = [(x1, f1), (x2, f2), (lo, flo), (hi, fhi)]
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("four candidates");
    Ok(best)
}
