use thiserror::Error;

use crate::graph::Violation;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("subspace is not isotropic (max |form| = {residual:.3e})")]
    NotIsotropic { residual: f64 },

    #[error("subspace is not a Lagrange plane (dimension {dim} in ambient {ambient}, isotropy residual {residual:.3e})")]
    NotLagrange {
        dim: usize,
        ambient: usize,
        residual: f64,
    },

    #[error("matrix is not unitary (max |S^†S - I| = {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("Lagrange plane has no distinguished scattering basis (incoming block sigma_min = {sigma_min:.3e})")]
    NoDistinguishedBasis { sigma_min: f64 },

    #[error("momentum must be real, finite and nonzero, got {0}")]
    InvalidMomentum(f64),

    #[error("invalid graph: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidGraph(Vec<Violation>),

    #[error("degenerate at this k = {k}: boundary system sigma_min = {sigma_min:.3e}")]
    Degenerate { k: f64, sigma_min: f64 },

    #[error("internal consistency failure in {what}: residual {residual:.3e}")]
    Inconsistent { what: &'static str, residual: f64 },

    #[error("ConditionA: possible embedded eigenvalue (sigma_min(B_2p) = {sigma_min:.3e})")]
    ConditionA { sigma_min: f64 },

    #[error("edge {edge}: cut point {cut} lies inside the support of the edge potential")]
    CutInsidePotential { edge: usize, cut: f64 },

    #[error("invalid link specification: {0}")]
    InvalidLink(String),

    #[error("invalid momentum grid: {0}")]
    InvalidGrid(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
