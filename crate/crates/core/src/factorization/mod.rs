//! Scattering matrix of a graph assembled from the scattering matrices of
//! pieces joined along pairs of rays.
//!
//! Two pieces `Γ'` (`m'` rays) and `Γ''` (`m''` rays) are joined along `p`
//! pairs of rays. In the joined layout the rays are ordered as
//!
//! | positions         | rays               |
//! |-------------------|--------------------|
//! | `0..p`            | linked rays of Γ'  |
//! | `p..2p`           | linked rays of Γ'' |
//! | `2p..2p+n''`      | free rays of Γ''   |
//! | `2p+n''..m`       | free rays of Γ'    |
//!
//! and every matrix below is written in that order. Linked ray `j` of Γ' and
//! linked ray `j` of Γ'' become one edge of length `a_j`, with phase
//! `ζ_j = e^{-ik a_j}`.

mod network;
mod scan;

use std::ops::Range;

use num_complex::Complex64;

use crate::edge::Momentum;
use crate::error::{Error, Result};
use crate::linalg::{
    self, block_diag, hstack, identity, lu_solve, max_abs_diff, permute_symmetric,
    unitarity_residual, CMat, I,
};
use crate::symplectic::{
    lagrange_from_unitary, project_lagrange_into, quotient_with_complement, unitary_from_lagrange,
    HermitianForm, Subspace,
};

pub use network::{
    compose_many, compose_many_ordered, compose_network, network_b2p, scattering_via_stars,
    star_matrices, Composed,
};
pub use scan::{
    b2p_sigma_min, embedded_eigenvalue_scan, embedded_eigenvalue_scan_with, EmbeddedEigenvalue,
    ScanOptions,
};

/// Relative cutoff on `σ_min(B_2p)` below which composition is refused.
pub const CONDITION_A_REL_TOL: f64 = 1e-10;

/// Agreement required between the block formula and the closed form, scaled
/// by `max(1e4, cond(B_2p))`.
const CLOSED_FORM_SCALE: f64 = 1e-14;

/// Unitarity required of a composed matrix, scaled the same way.
const UNITARITY_SCALE: f64 = 1e-12;

const CONDITION_FLOOR: f64 = 1e4;

/// One ray of one piece in a multi-piece composition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Port {
    pub piece: usize,
    pub ray: usize,
}

impl Port {
    pub fn new(piece: usize, ray: usize) -> Self {
        Self { piece, ray }
    }
}

/// Two ports joined into an edge of the given length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub a: Port,
    pub b: Port,
    pub length: f64,
}

impl Link {
    pub fn new(a: Port, b: Port, length: f64) -> Self {
        Self { a, b, length }
    }
}

/// Links between two pieces: `pairs[j] = (ray of Γ', ray of Γ'')`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkSpec {
    pairs: Vec<(usize, usize)>,
    lengths: Vec<f64>,
}

impl LinkSpec {
    pub fn new(pairs: Vec<(usize, usize)>, lengths: Vec<f64>) -> Result<Self> {
        if pairs.len() != lengths.len() {
            return Err(Error::InvalidLink(format!(
                "{} ray pairs but {} lengths",
                pairs.len(),
                lengths.len()
            )));
        }
        if let Some(a) = lengths.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::InvalidLink(format!("link length {a} is not positive")));
        }
        Ok(Self { pairs, lengths })
    }

    pub fn none() -> Self {
        Self {
            pairs: Vec::new(),
            lengths: Vec::new(),
        }
    }

    pub fn p(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    /// `ζ_j = e^{-ik a_j}`.
    pub fn phases(&self, k: Momentum) -> Vec<Complex64> {
        self.lengths.iter().map(|&a| k.phase(a)).collect()
    }
}

/// Index bookkeeping for joining `Γ'` and `Γ''`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockLayout {
    m1: usize,
    m2: usize,
    linked1: Vec<usize>,
    linked2: Vec<usize>,
    free1: Vec<usize>,
    free2: Vec<usize>,
}

impl BlockLayout {
    pub fn new(m1: usize, m2: usize, links: &LinkSpec) -> Result<Self> {
        let mut used1 = vec![false; m1];
        let mut used2 = vec![false; m2];
        for &(r1, r2) in links.pairs() {
            if r1 >= m1 || r2 >= m2 {
                return Err(Error::InvalidLink(format!(
                    "ray pair ({r1}, {r2}) out of range for pieces with {m1} and {m2} rays"
                )));
            }
            if std::mem::replace(&mut used1[r1], true) {
                return Err(Error::InvalidLink(format!("ray {r1} of the first piece linked twice")));
            }
            if std::mem::replace(&mut used2[r2], true) {
                return Err(Error::InvalidLink(format!("ray {r2} of the second piece linked twice")));
            }
        }
        Ok(Self {
            m1,
            m2,
            linked1: links.pairs().iter().map(|p| p.0).collect(),
            linked2: links.pairs().iter().map(|p| p.1).collect(),
            free1: (0..m1).filter(|&r| !used1[r]).collect(),
            free2: (0..m2).filter(|&r| !used2[r]).collect(),
        })
    }

    pub fn m1(&self) -> usize {
        self.m1
    }

    pub fn m2(&self) -> usize {
        self.m2
    }

    pub fn p(&self) -> usize {
        self.linked1.len()
    }

    pub fn n1(&self) -> usize {
        self.free1.len()
    }

    pub fn n2(&self) -> usize {
        self.free2.len()
    }

    pub fn n(&self) -> usize {
        self.n1() + self.n2()
    }

    pub fn m(&self) -> usize {
        self.m1 + self.m2
    }

    /// Free rays of Γ' in output order.
    pub fn free1(&self) -> &[usize] {
        &self.free1
    }

    /// Free rays of Γ'' in output order.
    pub fn free2(&self) -> &[usize] {
        &self.free2
    }

    /// Layout position `i` holds ray `order()[i]` of the concatenation
    /// `(Γ' rays, Γ'' rays)`.
    pub fn order(&self) -> Vec<usize> {
        let shift = |r: &usize| r + self.m1;
        self.linked1
            .iter()
            .copied()
            .chain(self.linked2.iter().map(shift))
            .chain(self.free2.iter().map(shift))
            .chain(self.free1.iter().copied())
            .collect()
    }

    /// Coordinates of the isotropic subspace after the `h` change of basis.
    pub fn index_n(&self) -> Range<usize> {
        0..2 * self.p()
    }

    /// Coordinates of its orthogonal complement.
    pub fn index_n_perp(&self) -> Vec<usize> {
        let m = self.m();
        (0..m).chain(2 * self.p() + m..2 * m).collect()
    }
}

fn check_square(what: &'static str, s: &CMat, m: usize) -> Result<()> {
    if s.nrows() != m || s.ncols() != m {
        return Err(Error::DimensionMismatch {
            what,
            expected: m,
            found: if s.nrows() != m { s.nrows() } else { s.ncols() },
        });
    }
    Ok(())
}

fn check_unitary(s: &CMat) -> Result<()> {
    let residual = unitarity_residual(s);
    if residual > crate::symplectic::UNITARY_TOL {
        return Err(Error::NotUnitary { residual });
    }
    Ok(())
}

fn check_phases(zetas: &[Complex64], p: usize) -> Result<()> {
    if zetas.len() != p {
        return Err(Error::DimensionMismatch {
            what: "link phases",
            expected: p,
            found: zetas.len(),
        });
    }
    Ok(())
}

/// `S_(m)`: `S'` and `S''` side by side, rearranged into layout order.
pub fn assemble_block_s(s1: &CMat, s2: &CMat, layout: &BlockLayout) -> Result<CMat> {
    check_square("S' dimension", s1, layout.m1())?;
    check_square("S'' dimension", s2, layout.m2())?;
    Ok(permute_symmetric(&block_diag(&[s1, s2]), &layout.order()))
}

/// `T_(m) = [[0, ζ], [ζ, 0]] ⊕ I_n` with `ζ = diag(ζ_1..ζ_p)`.
pub fn assemble_t(layout: &BlockLayout, zetas: &[Complex64]) -> Result<CMat> {
    check_phases(zetas, layout.p())?;
    Ok(link_t(zetas, layout.n()))
}

fn link_t(zetas: &[Complex64], n: usize) -> CMat {
    let p = zetas.len();
    let mut t = CMat::zeros(2 * p + n, 2 * p + n);
    for (j, &z) in zetas.iter().enumerate() {
        t[(j, p + j)] = z;
        t[(p + j, j)] = z;
    }
    for i in 2 * p..2 * p + n {
        t[(i, i)] = Complex64::new(1.0, 0.0);
    }
    t
}

/// `A = ½(S T^† + I)`, `B = (i/2)(S T^† - I)`.
pub fn h_blocks(s_m: &CMat, t_m: &CMat) -> Result<(CMat, CMat)> {
    let m = s_m.nrows();
    check_square("S_(m)", s_m, m)?;
    check_square("T_(m)", t_m, m)?;
    let st = s_m * t_m.adjoint();
    let id = identity(m);
    let a = (&st + &id) * Complex64::new(0.5, 0.0);
    let b = (&st - &id) * (I * 0.5);
    Ok((a, b))
}

/// `h = [[A, B], [-B, A]]`.
pub fn h_matrix(a: &CMat, b: &CMat) -> CMat {
    let m = a.nrows();
    let mut h = CMat::zeros(2 * m, 2 * m);
    h.view_mut((0, 0), (m, m)).copy_from(a);
    h.view_mut((0, m), (m, m)).copy_from(b);
    h.view_mut((m, 0), (m, m)).copy_from(&(-b));
    h.view_mut((m, m), (m, m)).copy_from(a);
    h
}

/// A composed scattering matrix together with the conditioning of the
/// `B_2p` block that produced it.
#[derive(Debug, Clone)]
pub struct Composition {
    pub s: CMat,
    /// Smallest singular value of `B_2p`; `+∞` when nothing was linked.
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// `max |block formula - closed form|`.
    pub closed_form_residual: f64,
}

impl Composition {
    /// `σ_max / σ_min` of `B_2p`; 1 when nothing was linked.
    pub fn condition(&self) -> f64 {
        if self.sigma_min.is_infinite() {
            1.0
        } else {
            self.sigma_max / self.sigma_min
        }
    }

    fn tolerance_scale(&self) -> f64 {
        self.condition().max(CONDITION_FLOOR)
    }
}

/// Eliminates `p` linked pairs from a matrix already in layout order
/// `[first ends (p), second ends (p), free (n)]`:
/// `S_n = A_n - iB_n - B_{n,2p} B_2p^{-1} (A_{2p,n} - iB_{2p,n})`.
///
/// The closed form `S_nn + S_nL (T_ζ - S_LL)^{-1} S_Ln` is evaluated alongside
/// as a consistency check.
pub fn reduce_links(s_m: &CMat, zetas: &[Complex64]) -> Result<Composition> {
    let m = s_m.nrows();
    check_square("S_(m)", s_m, m)?;
    let p = zetas.len();
    if 2 * p > m {
        return Err(Error::DimensionMismatch {
            what: "linked rays (2p <= m)",
            expected: m,
            found: 2 * p,
        });
    }
    let n = m - 2 * p;
    if p == 0 {
        return Ok(Composition {
            s: s_m.clone(),
            sigma_min: f64::INFINITY,
            sigma_max: 0.0,
            closed_form_residual: 0.0,
        });
    }
    let t_m = link_t(zetas, n);
    let (a, b) = h_blocks(s_m, &t_m)?;
    let l = 2 * p;
    let b_2p = b.view((0, 0), (l, l)).into_owned();
    let (sigma_min, sigma_max) = linalg::sigma_extremes(&b_2p);
    if sigma_min < CONDITION_A_REL_TOL * sigma_max || sigma_max == 0.0 {
        return Err(Error::ConditionA { sigma_min });
    }
    let a_n = a.view((l, l), (n, n));
    let b_n = b.view((l, l), (n, n));
    let b_n2p = b.view((l, 0), (n, l));
    let rhs = a.view((0, l), (l, n)) - b.view((0, l), (l, n)) * I;
    let solved = lu_solve(&b_2p, &rhs).ok_or(Error::ConditionA { sigma_min })?;
    let s_n = a_n - b_n * I - b_n2p * solved;

    let t_zeta = t_m.view((0, 0), (l, l)).into_owned();
    let kernel = t_zeta - s_m.view((0, 0), (l, l));
    let coupled = lu_solve(&kernel, &s_m.view((0, l), (l, n)).into_owned())
        .ok_or(Error::ConditionA { sigma_min })?;
    let closed = s_m.view((l, l), (n, n)) + s_m.view((l, 0), (n, l)) * coupled;

    let out = Composition {
        closed_form_residual: max_abs_diff(&s_n, &closed),
        s: s_n,
        sigma_min,
        sigma_max,
    };
    out.verify()?;
    Ok(out)
}

impl Composition {
    fn verify(&self) -> Result<()> {
        let scale = self.tolerance_scale();
        if self.closed_form_residual > CLOSED_FORM_SCALE * scale {
            return Err(Error::Inconsistent {
                what: "block formula against closed form",
                residual: self.closed_form_residual,
            });
        }
        let residual = unitarity_residual(&self.s);
        if residual > UNITARITY_SCALE * scale {
            return Err(Error::Inconsistent {
                what: "unitarity of composed scattering matrix",
                residual,
            });
        }
        Ok(())
    }
}

/// Closed form for two pieces:
/// `diag(S''_n'', S'_n') + diag(S''_{n'',p}, S'_{n',p})
///  [[ζ, -S'_p], [-S''_p, ζ]]^{-1} [[0, S'_{p,n'}], [S''_{p,n''}, 0]]`.
pub fn closed_form(
    s1: &CMat,
    s2: &CMat,
    layout: &BlockLayout,
    zetas: &[Complex64],
) -> Result<CMat> {
    check_phases(zetas, layout.p())?;
    let pick = |s: &CMat, rows: &[usize], cols: &[usize]| {
        CMat::from_fn(rows.len(), cols.len(), |i, j| s[(rows[i], cols[j])])
    };
    let (p, n1, n2) = (layout.p(), layout.n1(), layout.n2());
    let (l1, l2) = (&layout.linked1, &layout.linked2);
    let (f1, f2) = (&layout.free1, &layout.free2);
    let zeta = CMat::from_diagonal(&crate::linalg::CVec::from_vec(zetas.to_vec()));

    let diagonal = block_diag(&[&pick(s2, f2, f2), &pick(s1, f1, f1)]);
    if p == 0 {
        return Ok(diagonal);
    }
    let left = block_diag(&[&pick(s2, f2, l2), &pick(s1, f1, l1)]);
    let mut middle = CMat::zeros(2 * p, 2 * p);
    middle.view_mut((0, 0), (p, p)).copy_from(&zeta);
    middle.view_mut((p, p), (p, p)).copy_from(&zeta);
    middle.view_mut((0, p), (p, p)).copy_from(&(-pick(s1, l1, l1)));
    middle.view_mut((p, 0), (p, p)).copy_from(&(-pick(s2, l2, l2)));
    let mut right = CMat::zeros(2 * p, n2 + n1);
    right.view_mut((0, n2), (p, n1)).copy_from(&pick(s1, l1, f1));
    right.view_mut((p, 0), (p, n2)).copy_from(&pick(s2, l2, f2));
    let (sigma_min, _) = linalg::sigma_extremes(&middle);
    let solved = lu_solve(&middle, &right).ok_or(Error::ConditionA { sigma_min })?;
    Ok(diagonal + left * solved)
}

/// Joins `Γ'` and `Γ''`; the result is indexed by `[free rays of Γ'', free
/// rays of Γ']`.
pub fn compose(
    s1: &CMat,
    s2: &CMat,
    layout: &BlockLayout,
    zetas: &[Complex64],
) -> Result<Composition> {
    check_phases(zetas, layout.p())?;
    check_unitary(s1)?;
    check_unitary(s2)?;
    let s_m = assemble_block_s(s1, s2, layout)?;
    let mut out = reduce_links(&s_m, zetas)?;
    if layout.p() > 0 {
        let closed = closed_form(s1, s2, layout, zetas)?;
        out.closed_form_residual = out.closed_form_residual.max(max_abs_diff(&out.s, &closed));
        out.verify()?;
    }
    Ok(out)
}

/// [`compose`] with phases taken from the link lengths at momentum `k`.
pub fn compose_at(s1: &CMat, s2: &CMat, links: &LinkSpec, k: Momentum) -> Result<Composition> {
    let layout = BlockLayout::new(s1.nrows(), s2.nrows(), links)?;
    compose(s1, s2, &layout, &links.phases(k))
}

/// The `2p`-dimensional subspace of `ℂ^{2m}` (canonical coordinates, layout
/// order) spanned by the waves that pass through each link:
/// `f-_j + ζ_j f+_{p+j}` and `f-_{p+j} + ζ_j f+_j`.
pub fn matching_subspace(m: usize, zetas: &[Complex64]) -> Result<Subspace> {
    let p = zetas.len();
    if 2 * p > m {
        return Err(Error::DimensionMismatch {
            what: "linked rays (2p <= m)",
            expected: m,
            found: 2 * p,
        });
    }
    let jost = |j: usize, outgoing: bool| crate::symplectic::jost_coordinates(m, j, outgoing);
    let mut basis = CMat::zeros(2 * m, 2 * p);
    for (j, &z) in zetas.iter().enumerate() {
        basis.set_column(j, &(jost(j, false) + jost(p + j, true) * z));
        basis.set_column(p + j, &(jost(p + j, false) + jost(j, true) * z));
    }
    Subspace::new(basis)
}

/// The composition computed through the reduction of the Lagrange plane of
/// `S_(m)` by the matching subspace, using the free-ray canonical
/// coordinates as quotient coordinates.
///
/// Defined even where [`compose`] refuses.
pub fn compose_via_subspaces(
    s1: &CMat,
    s2: &CMat,
    layout: &BlockLayout,
    zetas: &[Complex64],
) -> Result<CMat> {
    check_phases(zetas, layout.p())?;
    let s_m = assemble_block_s(s1, s2, layout)?;
    let m = layout.m();
    let p = layout.p();
    let form = HermitianForm::canonical(m);
    let plane = lagrange_from_unitary(&s_m)?;
    let n_sub = matching_subspace(m, zetas)?;
    let free: Vec<usize> = (2 * p..m).chain(m + 2 * p..2 * m).collect();
    let complement = Subspace::coordinate(2 * m, &free);
    let quotient = quotient_with_complement(&form, &n_sub, complement.basis())?;
    let projected = project_lagrange_into(&form, &plane, &quotient)?;
    unitary_from_lagrange(&projected.plane)
}

/// `[N | C]` as used by the quotient in [`compose_via_subspaces`]; exposed for
/// diagnostics.
pub fn matching_frame(m: usize, zetas: &[Complex64]) -> Result<CMat> {
    let p = zetas.len();
    let n_sub = matching_subspace(m, zetas)?;
    let free: Vec<usize> = (2 * p..m).chain(m + 2 * p..2 * m).collect();
    Ok(hstack(n_sub.basis(), Subspace::coordinate(2 * m, &free).basis()))
}
