//! Scattering matrices of Schrödinger operators `-d²/dx² + q` on metric graphs
//! with finitely many edges and semi-infinite rays.
//!
//! `S(k)` is computed two ways: by solving the vertex boundary-value system
//! on the whole graph ([`direct`]), and by composing the scattering matrices
//! of single-vertex stars along the edges that join them ([`factorization`]).
//! Points where the composition breaks down locate eigenvalues embedded in
//! the continuous spectrum.

pub mod direct;
pub mod edge;
pub mod error;
pub mod factorization;
pub mod graph;
pub mod linalg;
pub mod sweep;
pub mod symplectic;

pub use direct::{interior_kernel, scattering_direct, InteriorKernel, ScatteringMatrix};
pub use edge::{jost_boundary_data, transfer_matrix, BoundaryData, Jost, Momentum};
pub use error::{Error, Result};
pub use factorization::{
    compose, compose_many, embedded_eigenvalue_scan, scattering_via_stars, BlockLayout, Link,
    LinkSpec, Port,
};
pub use graph::{
    kirchhoff_conditions, star_decomposition, validate, MetricGraph, PiecewisePotential,
    VertexCondition, VertexConditions,
};
pub use linalg::{CMat, CVec};
