//! Solutions of `-ψ'' + q ψ = k² ψ` on a single interval or ray with a
//! piecewise-constant potential.

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::PiecewisePotential;
use crate::linalg::I;

/// Nonzero real momentum `k`, spectral parameter `λ = k²`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Momentum(f64);

impl Momentum {
    pub fn new(k: f64) -> Result<Self> {
        if k.is_finite() && k != 0.0 {
            Ok(Self(k))
        } else {
            Err(Error::InvalidMomentum(k))
        }
    }

    pub fn k(self) -> f64 {
        self.0
    }

    pub fn lambda(self) -> f64 {
        self.0 * self.0
    }

    /// `ζ = e^{-ika}` for a link of length `a`.
    pub fn phase(self, length: f64) -> Complex64 {
        Complex64::from_polar(1.0, -self.0 * length)
    }
}

/// Value and derivative (with respect to increasing `x`) at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryData {
    pub value: Complex64,
    pub derivative: Complex64,
}

impl BoundaryData {
    pub fn new(value: Complex64, derivative: Complex64) -> Self {
        Self { value, derivative }
    }

    pub fn zero() -> Self {
        Self::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }
}

/// Transfer matrix across a constant piece of width `width`.
///
/// With `κ² = k² - q` the entries `cos κΔ`, `sin(κΔ)/κ`, `-κ sin κΔ` are
/// even in `κ`, so everything is computed from `κ²`. Small `|κΔ|` uses the
/// Taylor series.
fn segment_transfer(q: f64, k2: f64, width: f64) -> Matrix2<f64> {
    let kappa2 = k2 - q;
    let z2 = kappa2 * width * width;
    let (c, s_over_k, k_s) = if z2.abs() < 1e-8 {
        let cos = 1.0 - z2 / 2.0 + z2 * z2 / 24.0;
        let sinc = 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
        (cos, width * sinc, kappa2 * width * sinc)
    } else if kappa2 > 0.0 {
        let kappa = kappa2.sqrt();
        let (s, c) = (kappa * width).sin_cos();
        (c, s / kappa, kappa * s)
    } else {
        let mu = (-kappa2).sqrt();
        let t = mu * width;
        (t.cosh(), t.sinh() / mu, -mu * t.sinh())
    };
    Matrix2::new(c, s_over_k, -k_s, c)
}

/// Maps `(ψ(x0), ψ'(x0))` to `(ψ(x1), ψ'(x1))` for `x0 <= x1`.
///
/// Real for real `k`; determinant one.
pub fn transfer_matrix(potential: &PiecewisePotential, k: Momentum, x0: f64, x1: f64) -> Matrix2<f64> {
    debug_assert!(x0 <= x1, "transfer_matrix expects x0 <= x1");
    let k2 = k.lambda();
    let mut t = Matrix2::identity();
    let mut cursor = x0;
    for (a, b, q) in potential.intervals() {
        let lo = a.max(cursor);
        let hi = b.min(x1);
        if hi > lo {
            t = segment_transfer(q, k2, hi - lo) * t;
            cursor = hi;
        }
    }
    if x1 > cursor {
        t = segment_transfer(0.0, k2, x1 - cursor) * t;
    }
    t
}

/// `θ, θ', φ, φ'` at `x = a` for the solutions with initial data `(1, 0)`
/// and `(0, 1)` at `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardSolutions {
    pub theta: f64,
    pub theta_prime: f64,
    pub phi: f64,
    pub phi_prime: f64,
}

impl StandardSolutions {
    pub fn wronskian(&self) -> f64 {
        self.theta * self.phi_prime - self.theta_prime * self.phi
    }
}

pub fn standard_solutions_at(potential: &PiecewisePotential, k: Momentum, a: f64) -> StandardSolutions {
    let t = transfer_matrix(potential, k, 0.0, a);
    StandardSolutions {
        theta: t[(0, 0)],
        theta_prime: t[(1, 0)],
        phi: t[(0, 1)],
        phi_prime: t[(1, 1)],
    }
}

/// Which Jost solution: `f+ ~ e^{ikx}` or `f- ~ e^{-ikx}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Jost {
    Outgoing,
    Incoming,
}

impl Jost {
    fn sign(self) -> f64 {
        match self {
            Jost::Outgoing => 1.0,
            Jost::Incoming => -1.0,
        }
    }
}

/// `(f±(0), f±'(0))` on a ray whose potential vanishes beyond its support.
pub fn jost_boundary_data(potential: &PiecewisePotential, k: Momentum, which: Jost) -> BoundaryData {
    let s = potential.support_end();
    let ik = I * (which.sign() * k.k());
    let at_s = (ik * s).exp();
    let (value, derivative) = (at_s, ik * at_s);
    if s == 0.0 {
        return BoundaryData::new(value, derivative);
    }
    // det T = 1, so T^{-1} = [[d, -b], [-c, a]]
    let t = transfer_matrix(potential, k, 0.0, s);
    BoundaryData::new(
        value * t[(1, 1)] - derivative * t[(0, 1)],
        -value * t[(1, 0)] + derivative * t[(0, 0)],
    )
}

/// `Σ_i [conj(φ_i) ψ'_i - conj(φ'_i) ψ_i]`, divided by `k` when `normalized`.
pub fn asymptotic_form_eval(
    k: Momentum,
    phi: &[BoundaryData],
    psi: &[BoundaryData],
    normalized: bool,
) -> Result<Complex64> {
    if phi.len() != psi.len() {
        return Err(Error::DimensionMismatch {
            what: "per-ray boundary data",
            expected: phi.len(),
            found: psi.len(),
        });
    }
    let sum: Complex64 = phi
        .iter()
        .zip(psi)
        .map(|(f, g)| f.value.conj() * g.derivative - f.derivative.conj() * g.value)
        .sum();
    Ok(if normalized { sum / k.k() } else { sum })
}
