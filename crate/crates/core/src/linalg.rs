//! Dense complex linear algebra: pseudoinverses, kernels and ranges, and
//! subspace operations with explicit rank tolerances.
//!
//! Rank decisions use a relative cutoff: a singular value `σ` counts as zero
//! when `σ ≤ τ_rank · σ_max`. All subspaces carry orthonormal bases so that
//! comparisons go through projector distances and do not depend on the basis.

use nalgebra::{ComplexField, DMatrix, DVector};

pub use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::svd::svd;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const I: C64 = Complex { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// Builds a complex matrix from real row-major rows.
pub fn real_matrix(rows: &[&[f64]]) -> CMatrix {
    let nr = rows.len();
    let nc = rows.first().map_or(0, |r| r.len());
    CMatrix::from_fn(nr, nc, |i, j| c(rows[i][j], 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative singular-value cutoff for rank decisions.
    pub rank: f64,
    /// Orthonormality of stored bases.
    pub orth: f64,
    /// Equality of matrices, projectors and phases.
    pub eq: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank: 1e-10,
            orth: 1e-10,
            eq: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn new(rank: f64, orth: f64, eq: f64) -> Result<Self> {
        for (name, value) in [("rank", rank), ("orth", orth), ("eq", eq)] {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::BadTolerance { name, value });
            }
        }
        Ok(Self { rank, orth, eq })
    }
}

pub fn check_finite(m: &CMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Singular values at or below this are roundoff whatever the matrix scale,
/// so an all-noise matrix is treated as zero rather than as full rank.
pub const NOISE_FLOOR: f64 = 1e-13;

fn cutoff(sv: &DVector<f64>, rel: f64) -> f64 {
    let max = sv.iter().copied().fold(0.0, f64::max);
    (rel * max).max(NOISE_FLOOR)
}

pub fn singular_values(m: &CMatrix) -> DVector<f64> {
    if m.is_empty() {
        return DVector::zeros(0);
    }
    svd(m).singular_values
}

pub fn smallest_singular_value(m: &CMatrix) -> f64 {
    singular_values(m).iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn rank(m: &CMatrix, tol: &Tolerances) -> usize {
    let sv = singular_values(m);
    let cut = cutoff(&sv, tol.rank);
    sv.iter().filter(|&&s| s > cut).count()
}

/// Moore–Penrose pseudoinverse via SVD, discarding singular values at or
/// below the relative rank cutoff.
pub fn pseudoinverse(m: &CMatrix, tol: &Tolerances) -> CMatrix {
    let (r, cdim) = m.shape();
    if m.is_empty() {
        return CMatrix::zeros(cdim, r);
    }
    let d = svd(m);
    let cut = cutoff(&d.singular_values, tol.rank);
    let mut out = CMatrix::zeros(cdim, r);
    for (k, &s) in d.singular_values.iter().enumerate() {
        if s > cut && s > 0.0 {
            out += (d.v.column(k) * d.u.column(k).adjoint()).scale(1.0 / s);
        }
    }
    out
}

/// Orthonormal basis of the kernel of `m` as matrix columns, over any field
/// with real part `f64` (used for both complex and real problems).
pub(crate) fn kernel_basis<T>(m: &DMatrix<T>, rel_tol: f64, floor: f64) -> DMatrix<T>
where
    T: ComplexField<RealField = f64>,
{
    let (r, cdim) = m.shape();
    if cdim == 0 {
        return DMatrix::zeros(0, 0);
    }
    if r == 0 {
        return DMatrix::identity(cdim, cdim);
    }
    let d = svd(m);
    let cut = cutoff(&d.singular_values, rel_tol).max(floor);
    let cols: Vec<_> = d
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cut)
        .map(|(k, _)| d.v.column(k).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(cdim, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// A linear subspace of `ℂ^n` stored by an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: CMatrix,
}

impl Subspace {
    /// Wraps an orthonormal basis, checking orthonormality against `tol.orth`.
    pub fn from_orthonormal(basis: CMatrix, tol: &Tolerances) -> Result<Self> {
        check_finite(&basis)?;
        let gram = basis.adjoint() * &basis;
        let dev = (gram - CMatrix::identity(basis.ncols(), basis.ncols())).norm();
        if dev > tol.orth {
            return Err(Error::Numerical(format!(
                "basis is not orthonormal (deviation {dev:e})"
            )));
        }
        Ok(Self { basis })
    }

    /// The span of the columns of `vectors`.
    pub fn span(vectors: &CMatrix, tol: &Tolerances) -> Self {
        range(vectors, tol)
    }

    pub fn zero(ambient: usize) -> Self {
        Self {
            basis: CMatrix::zeros(ambient, 0),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self {
            basis: CMatrix::identity(ambient, ambient),
        }
    }

    /// Span of the given standard basis vectors.
    pub fn coordinate(ambient: usize, indices: &[usize]) -> Self {
        let mut basis = CMatrix::zeros(ambient, indices.len());
        for (col, &j) in indices.iter().enumerate() {
            basis[(j, col)] = c(1.0, 0.0);
        }
        Self { basis }
    }

    pub fn ambient(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    pub fn complement(&self, tol: &Tolerances) -> Self {
        let n = self.ambient();
        let resid = CMatrix::identity(n, n) - self.projector();
        range(&resid, tol)
    }

    /// Whether `v` lies in the subspace, relative to `‖v‖`.
    pub fn contains(&self, v: &CVector, tol: &Tolerances) -> bool {
        let r = v - &self.basis * (self.basis.adjoint() * v);
        r.norm() <= tol.eq * v.norm().max(1.0)
    }

    /// Whether `m` maps the subspace into itself.
    pub fn is_invariant_under(&self, m: &CMatrix, tol: &Tolerances) -> bool {
        let n = self.ambient();
        let off = (CMatrix::identity(n, n) - self.projector()) * m * &self.basis;
        off.norm() <= tol.eq * m.norm().max(1.0)
    }
}

pub fn orthoprojector(s: &Subspace) -> CMatrix {
    s.projector()
}

pub fn kernel(m: &CMatrix, tol: &Tolerances) -> Subspace {
    let basis = kernel_basis(m, tol.rank, NOISE_FLOOR);
    if basis.nrows() == 0 {
        return Subspace::zero(m.ncols());
    }
    Subspace { basis }
}

pub fn range(m: &CMatrix, tol: &Tolerances) -> Subspace {
    let nrows = m.nrows();
    if m.is_empty() {
        return Subspace::zero(nrows);
    }
    let d = svd(m);
    let cut = cutoff(&d.singular_values, tol.rank);
    let cols: Vec<_> = d
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > cut && s > 0.0)
        .map(|(k, _)| d.u.column(k).into_owned())
        .collect();
    if cols.is_empty() {
        Subspace::zero(nrows)
    } else {
        Subspace {
            basis: CMatrix::from_columns(&cols),
        }
    }
}

/// `S₁ ∩ S₂`, computed as the common kernel of the two complement projectors.
pub fn intersect(s1: &Subspace, s2: &Subspace, tol: &Tolerances) -> Result<Subspace> {
    let n = s1.ambient();
    if s2.ambient() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: s2.ambient(),
        });
    }
    if s1.is_zero() || s2.is_zero() {
        return Ok(Subspace::zero(n));
    }
    let id = CMatrix::identity(n, n);
    let mut stacked = CMatrix::zeros(2 * n, n);
    stacked
        .view_mut((0, 0), (n, n))
        .copy_from(&(&id - s1.projector()));
    stacked
        .view_mut((n, 0), (n, n))
        .copy_from(&(&id - s2.projector()));
    // The stacked matrix has singular values in [0, √2]; use an absolute
    // cutoff on that scale so that an empty intersection is never mistaken
    // for a zero matrix.
    let basis = kernel_with_scale(&stacked, tol.rank * 2f64.sqrt());
    Ok(Subspace { basis })
}

fn kernel_with_scale(m: &CMatrix, abs_tol: f64) -> CMatrix {
    let d = svd(m);
    let cols: Vec<_> = d
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= abs_tol)
        .map(|(k, _)| d.v.column(k).into_owned())
        .collect();
    if cols.is_empty() {
        CMatrix::zeros(m.ncols(), 0)
    } else {
        CMatrix::from_columns(&cols)
    }
}

/// `{z : Bz ∈ S}`.
pub fn preimage(b: &CMatrix, s: &Subspace, tol: &Tolerances) -> Result<Subspace> {
    if b.nrows() != s.ambient() {
        return Err(Error::DimensionMismatch {
            expected: b.nrows(),
            found: s.ambient(),
        });
    }
    let n = s.ambient();
    let off = (CMatrix::identity(n, n) - s.projector()) * b;
    if off.norm() <= tol.eq * b.norm().max(f64::MIN_POSITIVE) || off.norm() == 0.0 {
        return Ok(Subspace::full(b.ncols()));
    }
    Ok(kernel(&off, tol))
}

/// Equality by projector distance `‖P₁ − P₂‖_F < τ_eq`.
pub fn subspace_equal(s1: &Subspace, s2: &Subspace, tol: &Tolerances) -> bool {
    s1.ambient() == s2.ambient() && s1.dim() == s2.dim() && (s1.projector() - s2.projector()).norm() < tol.eq
}

/// `(A, B)` placed side by side.
pub fn hstack(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.nrows(), b.nrows());
    let mut out = CMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    out
}

/// Whether `m` is Hermitian up to `tol.eq` relative to its norm.
pub fn is_hermitian(m: &CMatrix, tol: &Tolerances) -> bool {
    m.is_square() && (m - m.adjoint()).norm() <= tol.eq * m.norm().max(1.0)
}
