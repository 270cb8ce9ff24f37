//! Finite-dimensional hermitian symplectic linear algebra.
//!
//! Vectors live in `C^{2m}` expressed in a canonical basis
//! `(pi_1..pi_m, q_1..q_m)`, where for the asymptotic solution space
//! `pi_j = (f+_j + f-_j)/2` and `q_j = (f+_j - f-_j)/(2i)` are built from the
//! Jost solutions on ray `j`. A form is represented by the matrix `J` with
//! `<phi, psi> = phi^† J psi`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    self, hstack, lu_solve, max_abs, normalize_columns, null_space, orth, rank, unitarity_residual,
    CMat, CVec, I, ONE, RANK_REL_TOL,
};

/// Absolute tolerance on entries of the normalized Gram matrix for the
/// isotropy and Lagrange predicates.
pub const ISOTROPY_TOL: f64 = 1e-9;

/// Tolerance accepted when a caller hands us a matrix that should be unitary.
pub const UNITARY_TOL: f64 = 1e-8;

/// A nondegenerate anti-hermitian form on `C^{2m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianForm {
    matrix: CMat,
}

impl HermitianForm {
    /// Wraps `matrix`, checking it is square, even-sized, anti-hermitian and
    /// nonsingular.
    pub fn new(matrix: CMat) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                what: "form matrix (square)",
                expected: n,
                found: matrix.ncols(),
            });
        }
        if !n.is_multiple_of(2) {
            return Err(Error::DimensionMismatch {
                what: "form matrix (even dimension)",
                expected: n + 1,
                found: n,
            });
        }
        let scale = max_abs(&matrix).max(1.0);
        let skew = linalg::max_abs_diff(&matrix.adjoint(), &(-&matrix));
        if skew > 1e-10 * scale {
            return Err(Error::Inconsistent {
                what: "form anti-hermiticity",
                residual: skew,
            });
        }
        if n > 0 && rank(&matrix) < n {
            return Err(Error::Inconsistent {
                what: "form nondegeneracy",
                residual: linalg::sigma_extremes(&matrix).0,
            });
        }
        Ok(Self { matrix })
    }

    /// `J = [[0, I_m], [-I_m, 0]]`.
    pub fn canonical(m: usize) -> Self {
        let mut j = CMat::zeros(2 * m, 2 * m);
        for i in 0..m {
            j[(i, m + i)] = ONE;
            j[(m + i, i)] = -ONE;
        }
        Self { matrix: j }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn half_dim(&self) -> usize {
        self.dim() / 2
    }

    /// `<phi, psi> = phi^† J psi`.
    pub fn eval(&self, phi: &CVec, psi: &CVec) -> Result<Complex64> {
        self.check_len(phi.len())?;
        self.check_len(psi.len())?;
        Ok(phi.dotc(&(&self.matrix * psi)))
    }

    /// Matrix of pairings `X^† J Y` between the columns of `x` and `y`.
    pub fn gram(&self, x: &CMat, y: &CMat) -> Result<CMat> {
        self.check_len(x.nrows())?;
        self.check_len(y.nrows())?;
        Ok(x.adjoint() * &self.matrix * y)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch {
                what: "vector in form ambient space",
                expected: self.dim(),
                found: len,
            });
        }
        Ok(())
    }
}

/// `<phi, psi>` for the given form.
pub fn form_eval(form: &HermitianForm, phi: &CVec, psi: &CVec) -> Result<Complex64> {
    form.eval(phi, psi)
}

/// A linear subspace stored as a full-column-rank basis matrix.
///
/// The zero subspace (no columns) is representable; it shows up as the
/// orthogonal complement of the whole space and as the trivial isotropic
/// subspace.
#[derive(Debug, Clone)]
pub struct Subspace {
    basis: CMat,
}

impl Subspace {
    pub fn new(basis: CMat) -> Result<Self> {
        let r = rank(&basis);
        if r != basis.ncols() {
            return Err(Error::DimensionMismatch {
                what: "subspace basis rank",
                expected: basis.ncols(),
                found: r,
            });
        }
        Ok(Self { basis })
    }

    /// Span of arbitrary (possibly dependent) columns.
    pub fn span_of(columns: &CMat) -> Self {
        Self {
            basis: orth(columns, RANK_REL_TOL),
        }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            basis: CMat::zeros(ambient_dim, 0),
        }
    }

    /// Span of the standard basis vectors with the given indices.
    pub fn coordinate(ambient_dim: usize, indices: &[usize]) -> Self {
        let mut basis = CMat::zeros(ambient_dim, indices.len());
        for (col, &i) in indices.iter().enumerate() {
            basis[(i, col)] = ONE;
        }
        Self { basis }
    }

    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.dim() == 0
    }

    pub fn contains(&self, v: &CVec) -> bool {
        let col = CMat::from_column_slice(v.len(), 1, v.as_slice());
        rank(&hstack(&self.basis, &col)) == self.dim()
    }

    /// Column spans coincide (rank of the concatenation).
    pub fn same_span(&self, other: &Subspace) -> bool {
        if self.ambient_dim() != other.ambient_dim() || self.dim() != other.dim() {
            return false;
        }
        if self.is_empty() {
            return true;
        }
        rank(&hstack(&self.basis, &other.basis)) == self.dim()
    }

    /// Intersection via the null space of `[self | -other]`.
    pub fn intersection(&self, other: &Subspace) -> Subspace {
        if self.is_empty() || other.is_empty() {
            return Subspace::zero(self.ambient_dim());
        }
        let stacked = hstack(&self.basis, &(-&other.basis));
        let coeffs = null_space(&stacked, RANK_REL_TOL);
        let top = coeffs.rows(0, self.dim()).into_owned();
        Subspace::span_of(&(&self.basis * top))
    }
}

/// `max |X^† J X|` over unit-normalized basis columns.
pub fn isotropy_residual(form: &HermitianForm, w: &Subspace) -> Result<f64> {
    if w.is_empty() {
        return Ok(0.0);
    }
    let x = normalize_columns(w.basis());
    Ok(max_abs(&form.gram(&x, &x)?))
}

pub fn is_isotropic(form: &HermitianForm, w: &Subspace) -> Result<bool> {
    Ok(isotropy_residual(form, w)? <= ISOTROPY_TOL)
}

/// Isotropic and of half the ambient dimension.
pub fn is_lagrange(form: &HermitianForm, w: &Subspace) -> Result<bool> {
    Ok(2 * w.dim() == form.dim() && is_isotropic(form, w)?)
}

/// `N^⊥ = { v : <n, v> = 0 for all n in N }`.
pub fn orthogonal_complement(form: &HermitianForm, n: &Subspace) -> Result<Subspace> {
    if n.ambient_dim() != form.dim() {
        return Err(Error::DimensionMismatch {
            what: "subspace ambient dimension",
            expected: form.dim(),
            found: n.ambient_dim(),
        });
    }
    if n.is_empty() {
        return Ok(Subspace {
            basis: linalg::identity(form.dim()),
        });
    }
    let pairing = n.basis().adjoint() * form.matrix();
    Ok(Subspace {
        basis: null_space(&pairing, RANK_REL_TOL),
    })
}

/// The reduced space `N^⊥ / N` for an isotropic `N`.
///
/// Cosets are represented by a complement `C` with `N^⊥ = N ⊕ span C`; the
/// projection returns the coordinates of a vector of `N^⊥` along `C`.
#[derive(Debug, Clone)]
pub struct QuotientSpace {
    reduced: HermitianForm,
    projector: CMat,
    complement: CMat,
    isotropic: Subspace,
    perp: Subspace,
}

impl QuotientSpace {
    pub fn reduced_form(&self) -> &HermitianForm {
        &self.reduced
    }

    /// Linear map `C^{2m} -> C^{2(m-q)}`; only meaningful on `N^⊥`.
    pub fn projector(&self) -> &CMat {
        &self.projector
    }

    /// Representatives in the original space of the quotient basis.
    pub fn complement(&self) -> &CMat {
        &self.complement
    }

    pub fn isotropic(&self) -> &Subspace {
        &self.isotropic
    }

    pub fn perp(&self) -> &Subspace {
        &self.perp
    }

    pub fn dim(&self) -> usize {
        self.reduced.dim()
    }

    pub fn project(&self, v: &CVec) -> CVec {
        &self.projector * v
    }

    pub fn project_columns(&self, x: &CMat) -> CMat {
        &self.projector * x
    }
}

fn require_isotropic(form: &HermitianForm, n: &Subspace) -> Result<()> {
    let residual = isotropy_residual(form, n)?;
    if residual > ISOTROPY_TOL {
        return Err(Error::NotIsotropic { residual });
    }
    Ok(())
}

/// `N^⊥ / N` using the Euclidean-orthogonal complement of `N` inside `N^⊥`.
pub fn quotient_space(form: &HermitianForm, n: &Subspace) -> Result<QuotientSpace> {
    require_isotropic(form, n)?;
    let perp = orthogonal_complement(form, n)?;
    let q_n = orth(n.basis(), RANK_REL_TOL);
    let dim = form.dim();
    let proj_off_n = linalg::identity(dim) - &q_n * q_n.adjoint();
    let complement = linalg::orth_abs(&(proj_off_n * perp.basis()), RANK_REL_TOL);
    let expected = dim - 2 * n.dim();
    if complement.ncols() != expected {
        return Err(Error::DimensionMismatch {
            what: "quotient dimension",
            expected,
            found: complement.ncols(),
        });
    }
    let reduced = HermitianForm::new(form.gram(&complement, &complement)?)?;
    Ok(QuotientSpace {
        reduced,
        projector: complement.adjoint(),
        complement,
        isotropic: n.clone(),
        perp,
    })
}

/// `N^⊥ / N` with a caller-chosen complement `C ⊂ N^⊥`.
pub fn quotient_with_complement(
    form: &HermitianForm,
    n: &Subspace,
    complement: &CMat,
) -> Result<QuotientSpace> {
    require_isotropic(form, n)?;
    let perp = orthogonal_complement(form, n)?;
    let dim = form.dim();
    let expected = dim - 2 * n.dim();
    if complement.ncols() != expected || complement.nrows() != dim {
        return Err(Error::DimensionMismatch {
            what: "quotient complement",
            expected,
            found: complement.ncols(),
        });
    }
    let leak = max_abs(&form.gram(n.basis(), &normalize_columns(complement))?);
    if leak > ISOTROPY_TOL {
        return Err(Error::Inconsistent {
            what: "complement inside N-perp",
            residual: leak,
        });
    }
    let stacked = hstack(n.basis(), complement);
    if rank(&stacked) != stacked.ncols() {
        return Err(Error::Inconsistent {
            what: "complement independent of N",
            residual: linalg::sigma_extremes(&stacked).0,
        });
    }
    let pinv = stacked
        .clone()
        .pseudo_inverse(1e-14)
        .map_err(|_| Error::Inconsistent {
            what: "quotient pseudo-inverse",
            residual: f64::NAN,
        })?;
    let projector = pinv.rows(n.dim(), expected).into_owned();
    let reduced = HermitianForm::new(form.gram(complement, complement)?)?;
    Ok(QuotientSpace {
        reduced,
        projector,
        complement: complement.clone(),
        isotropic: n.clone(),
        perp,
    })
}

/// Result of pushing a Lagrange plane through `N^⊥ / N`.
#[derive(Debug, Clone)]
pub struct ProjectedLagrange {
    /// `L ∩ N^⊥` in the original space.
    pub intersection: Subspace,
    /// Image of the intersection in the quotient.
    pub plane: Subspace,
}

/// Projects `L ∩ N^⊥` into the given quotient; the image is a Lagrange plane
/// of the reduced form.
pub fn project_lagrange_into(
    form: &HermitianForm,
    l: &Subspace,
    quotient: &QuotientSpace,
) -> Result<ProjectedLagrange> {
    let residual = isotropy_residual(form, l)?;
    if 2 * l.dim() != form.dim() || residual > ISOTROPY_TOL {
        return Err(Error::NotLagrange {
            dim: l.dim(),
            ambient: form.dim(),
            residual,
        });
    }
    let n = quotient.isotropic();
    let intersection = if n.is_empty() {
        l.clone()
    } else {
        let pairing = n.basis().adjoint() * form.matrix() * l.basis();
        let coeffs = null_space(&pairing, RANK_REL_TOL);
        Subspace::span_of(&(l.basis() * coeffs))
    };
    let plane = Subspace::span_of(&quotient.project_columns(intersection.basis()));
    let expected = quotient.dim() / 2;
    if plane.dim() != expected {
        return Err(Error::DimensionMismatch {
            what: "projected Lagrange plane",
            expected,
            found: plane.dim(),
        });
    }
    Ok(ProjectedLagrange {
        intersection,
        plane,
    })
}

/// `(L ∩ N^⊥)/N` in the default quotient coordinates.
pub fn project_lagrange(
    form: &HermitianForm,
    l: &Subspace,
    n: &Subspace,
) -> Result<(QuotientSpace, ProjectedLagrange)> {
    let quotient = quotient_space(form, n)?;
    let projected = project_lagrange_into(form, l, &quotient)?;
    Ok((quotient, projected))
}

/// The canonical transformation `g(S) = ½[[S+I, i(S-I)], [-i(S-I), S+I]]`.
#[derive(Debug, Clone)]
pub struct CanonicalBasisChange {
    unitary: CMat,
    g: CMat,
}

impl CanonicalBasisChange {
    pub fn new(unitary: &CMat) -> Result<Self> {
        let m = unitary.nrows();
        if unitary.ncols() != m {
            return Err(Error::DimensionMismatch {
                what: "unitary (square)",
                expected: m,
                found: unitary.ncols(),
            });
        }
        let residual = unitarity_residual(unitary);
        if residual > UNITARY_TOL {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self {
            unitary: unitary.clone(),
            g: g_matrix(unitary),
        })
    }

    pub fn unitary(&self) -> &CMat {
        &self.unitary
    }

    pub fn g(&self) -> &CMat {
        &self.g
    }

    /// `max |g J g^† - J|`.
    pub fn form_residual(&self) -> f64 {
        let j = HermitianForm::canonical(self.unitary.nrows());
        let lhs = &self.g * j.matrix() * self.g.adjoint();
        linalg::max_abs_diff(&lhs, j.matrix())
    }

    /// Basis of the plane spanned by the first `m` rows of `g`, each row
    /// read as a coordinate vector.
    pub fn lagrange_basis(&self) -> CMat {
        let m = self.unitary.nrows();
        self.g.rows(0, m).transpose()
    }
}

/// Expanded `g` without a unitarity check. Callers validate.
pub(crate) fn g_matrix(s: &CMat) -> CMat {
    let m = s.nrows();
    let id = linalg::identity(m);
    let plus = (s + &id) * Complex64::new(0.5, 0.0);
    let minus = (s - &id) * (I * 0.5);
    let mut g = CMat::zeros(2 * m, 2 * m);
    g.view_mut((0, 0), (m, m)).copy_from(&plus);
    g.view_mut((0, m), (m, m)).copy_from(&minus);
    g.view_mut((m, 0), (m, m)).copy_from(&(-&minus));
    g.view_mut((m, m), (m, m)).copy_from(&plus);
    g
}

/// Lagrange plane spanned by the scattering waves of the unitary `S`.
pub fn lagrange_from_unitary(s: &CMat) -> Result<Subspace> {
    let change = CanonicalBasisChange::new(s)?;
    Ok(Subspace {
        basis: change.lagrange_basis(),
    })
}

/// Inverse of [`lagrange_from_unitary`] with respect to the canonical form.
///
/// The plane is rewritten in Jost coordinates (`f+ = pi + i q`,
/// `f- = pi - i q`) and brought to the distinguished basis
/// `½(Σ_j S_ij f+_j + f-_i)` by inverting the incoming (`f-`) block.
pub fn unitary_from_lagrange(l: &Subspace) -> Result<CMat> {
    let dim = l.ambient_dim();
    if !dim.is_multiple_of(2) {
        return Err(Error::DimensionMismatch {
            what: "Lagrange plane ambient dimension (even)",
            expected: dim + 1,
            found: dim,
        });
    }
    let m = dim / 2;
    let form = HermitianForm::canonical(m);
    let residual = isotropy_residual(&form, l)?;
    if l.dim() != m || residual > ISOTROPY_TOL {
        return Err(Error::NotLagrange {
            dim: l.dim(),
            ambient: dim,
            residual,
        });
    }
    let x = normalize_columns(l.basis());
    let a = x.rows(0, m).into_owned();
    let b = x.rows(m, m).into_owned();
    let outgoing = (&a - &b * I) * Complex64::new(0.5, 0.0);
    let incoming = (&a + &b * I) * Complex64::new(0.5, 0.0);
    let (sigma_min, _) = linalg::sigma_extremes(&incoming);
    if sigma_min < RANK_REL_TOL {
        return Err(Error::NoDistinguishedBasis { sigma_min });
    }
    // S^T = P M^{-1}  <=>  M^T S = P^T
    lu_solve(&incoming.transpose(), &outgoing.transpose())
        .ok_or(Error::NoDistinguishedBasis { sigma_min })
}

/// Coordinates of the Jost solution `f±` on ray `j` in the canonical basis of
/// an `m`-ray space: `f+ = pi + i q`, `f- = pi - i q`.
pub fn jost_coordinates(m: usize, j: usize, outgoing: bool) -> CVec {
    let mut v = CVec::zeros(2 * m);
    v[j] = ONE;
    v[m + j] = if outgoing { I } else { -I };
    v
}
