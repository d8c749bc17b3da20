//! Vertex boundary conditions `Aψ̲ + Bψ̲′ = 0`.
//!
//! A pair `(A, B)` of `k × k` matrices defines a self-adjoint Laplacian when
//! `AB†` is Hermitian and `(A|B)` has rank `k`. Two pairs define the same
//! operator exactly when the kernels `ℳ(A,B) = Ker(A|B) ⊆ ℂ^{2k}` agree, which
//! is how [`operators_equal`] and [`is_local`] decide.

use crate::error::{Error, Result};
use crate::gauge::DiagonalUnitary;
use crate::graph::{BoundaryCoordinateMap, MetricGraph};
use crate::linalg::{
    self, c, check_finite, hstack, intersect, kernel, pseudoinverse, subspace_equal, CMatrix, Subspace,
    Tolerances,
};

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryConditions {
    a: CMatrix,
    b: CMatrix,
}

impl BoundaryConditions {
    pub fn new(a: CMatrix, b: CMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.nrows(),
                cols: a.ncols(),
            });
        }
        if b.shape() != a.shape() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                found: if b.nrows() != a.nrows() {
                    b.nrows()
                } else {
                    b.ncols()
                },
            });
        }
        check_finite(&a)?;
        check_finite(&b)?;
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    pub fn b(&self) -> &CMatrix {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// Errors unless the pair acts on the graph's `n + 2m` coordinates.
    pub fn check_shape(&self, map: &BoundaryCoordinateMap) -> Result<()> {
        if self.dim() != map.dim() {
            return Err(Error::DimensionMismatch {
                expected: map.dim(),
                found: self.dim(),
            });
        }
        Ok(())
    }

    /// `(CA, CB)`.
    pub fn premultiplied(&self, cm: &CMatrix) -> Result<Self> {
        if cm.shape() != (self.dim(), self.dim()) {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: cm.nrows(),
            });
        }
        Self::new(cm * &self.a, cm * &self.b)
    }

    /// `(A𝒰, B𝒰)`.
    pub fn transformed(&self, u: &DiagonalUnitary) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.dim(),
            });
        }
        let um = u.to_matrix();
        Self::new(&self.a * &um, &self.b * &um)
    }

    /// `(A | B)`, a `k × 2k` matrix.
    pub fn stacked(&self) -> CMatrix {
        hstack(&self.a, &self.b)
    }

    /// `‖AB† − BA†‖_F`, scaled by `max(1, ‖A‖‖B‖)`.
    pub fn hermiticity_defect(&self) -> f64 {
        let ab = &self.a * self.b.adjoint();
        let defect = (&ab - ab.adjoint()).norm();
        defect / (self.a.norm() * self.b.norm()).max(1.0)
    }

    pub fn check_self_adjoint(&self, tol: &Tolerances) -> bool {
        self.hermiticity_defect() <= tol.eq && linalg::rank(&self.stacked(), tol) == self.dim()
    }

    fn require_self_adjoint(&self, tol: &Tolerances) -> Result<()> {
        if self.check_self_adjoint(tol) {
            Ok(())
        } else {
            Err(Error::NotSelfAdjoint)
        }
    }

    /// `ℳ(A,B) = Ker(A|B) ⊆ ℂ^{2k}`; the first `k` coordinates carry `ψ̲`,
    /// the last `k` carry `ψ̲′`.
    pub fn isotropic_subspace(&self, tol: &Tolerances) -> Result<Subspace> {
        self.require_self_adjoint(tol)?;
        Ok(self.kernel_subspace(tol))
    }

    fn kernel_subspace(&self, tol: &Tolerances) -> Subspace {
        kernel(&self.stacked(), tol)
    }

    /// `A⋆`
    pub fn a_pinv(&self, tol: &Tolerances) -> CMatrix {
        pseudoinverse(&self.a, tol)
    }

    /// `B⋆`
    pub fn b_pinv(&self, tol: &Tolerances) -> CMatrix {
        pseudoinverse(&self.b, tol)
    }
}

/// Canonical symplectic matrix `J = [[0, I], [−I, 0]]` on `ℂ^{2k}`.
pub fn symplectic_matrix(k: usize) -> CMatrix {
    let mut j = CMatrix::zeros(2 * k, 2 * k);
    for i in 0..k {
        j[(i, k + i)] = c(1.0, 0.0);
        j[(k + i, i)] = c(-1.0, 0.0);
    }
    j
}

/// `max |⟨x, Jy⟩|` over basis pairs of `s`.
pub fn isotropy_residual(s: &Subspace) -> f64 {
    let k = s.ambient() / 2;
    let q = s.basis();
    let form = q.adjoint() * symplectic_matrix(k) * q;
    form.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn operators_equal(bc1: &BoundaryConditions, bc2: &BoundaryConditions, tol: &Tolerances) -> Result<bool> {
    if bc1.dim() != bc2.dim() {
        return Err(Error::DimensionMismatch {
            expected: bc1.dim(),
            found: bc2.dim(),
        });
    }
    let m1 = bc1.kernel_subspace(tol);
    let m2 = bc2.kernel_subspace(tol);
    Ok(subspace_equal(&m1, &m2, tol))
}

/// `ℒ_v ⊕ ℒ_v ⊆ ℂ^{2k}`: value and derivative slots of one vertex.
fn vertex_doubled(map: &BoundaryCoordinateMap, v: usize) -> Vec<usize> {
    let k = map.dim();
    let slots = map.vertex_slots(v);
    slots
        .iter()
        .copied()
        .chain(slots.iter().map(|&j| k + j))
        .collect()
}

fn vertex_intersections(
    bc: &BoundaryConditions,
    map: &BoundaryCoordinateMap,
    tol: &Tolerances,
) -> Result<(Subspace, Vec<Subspace>)> {
    bc.check_shape(map)?;
    let m = bc.isotropic_subspace(tol)?;
    let k = map.dim();
    let parts = (0..map.n_vertices())
        .map(|v| intersect(&m, &Subspace::coordinate(2 * k, &vertex_doubled(map, v)), tol))
        .collect::<Result<Vec<_>>>()?;
    Ok((m, parts))
}

/// Local iff `ℳ` splits as the direct sum of its parts over the vertex
/// subspaces, i.e. their dimensions add up to `k`.
pub fn is_local(bc: &BoundaryConditions, map: &BoundaryCoordinateMap, tol: &Tolerances) -> Result<bool> {
    let (_, parts) = vertex_intersections(bc, map, tol)?;
    Ok(parts.iter().map(Subspace::dim).sum::<usize>() == map.dim())
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexBlock {
    pub vertex: usize,
    /// Indices of `ℒ_v` in the canonical ordering.
    pub slots: Vec<usize>,
    pub a: CMatrix,
    pub b: CMatrix,
}

/// Per-vertex blocks of a local pair, together with the invertible `C`
/// such that `(CA, CB)` is the assembled block-diagonal pair.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexBlocks {
    pub blocks: Vec<VertexBlock>,
    pub mixing: CMatrix,
}

impl VertexBlocks {
    /// `(⊕ A_v, ⊕ B_v)` in canonical coordinates; the rows of vertex `v` sit
    /// at the indices of `ℒ_v`.
    pub fn assemble(&self, k: usize) -> Result<BoundaryConditions> {
        assemble_blocks(k, &self.blocks)
    }
}

pub(crate) fn assemble_blocks(k: usize, blocks: &[VertexBlock]) -> Result<BoundaryConditions> {
    let mut a = CMatrix::zeros(k, k);
    let mut b = CMatrix::zeros(k, k);
    for blk in blocks {
        for (r, &row) in blk.slots.iter().enumerate() {
            for (s, &col) in blk.slots.iter().enumerate() {
                a[(row, col)] = blk.a[(r, s)];
                b[(row, col)] = blk.b[(r, s)];
            }
        }
    }
    BoundaryConditions::new(a, b)
}

pub fn local_decomposition(
    bc: &BoundaryConditions,
    map: &BoundaryCoordinateMap,
    tol: &Tolerances,
) -> Result<VertexBlocks> {
    let (_, parts) = vertex_intersections(bc, map, tol)?;
    if parts.iter().map(Subspace::dim).sum::<usize>() != map.dim() {
        return Err(Error::NotLocal);
    }
    let mut blocks = Vec::with_capacity(parts.len());
    for (v, part) in parts.iter().enumerate() {
        let idx = vertex_doubled(map, v);
        let deg = map.vertex_slots(v).len();
        // restrict the basis of ℳ ∩ (ℒ_v ⊕ ℒ_v) to its own coordinates
        let restricted = CMatrix::from_fn(2 * deg, part.dim(), |r, col| part.basis()[(idx[r], col)]);
        // rows annihilating the restricted basis: (A_v | B_v) x = 0
        let annihilator = kernel(&restricted.transpose(), tol);
        let rows = annihilator.basis().transpose();
        if rows.nrows() != deg {
            return Err(Error::Numerical(format!(
                "vertex {v}: expected {deg} relations, found {}",
                rows.nrows()
            )));
        }
        blocks.push(VertexBlock {
            vertex: v,
            slots: map.vertex_slots(v).to_vec(),
            a: rows.columns(0, deg).into_owned(),
            b: rows.columns(deg, deg).into_owned(),
        });
    }
    let k = map.dim();
    let local = assemble_blocks(k, &blocks)?;
    let mixing = local.stacked() * pseudoinverse(&bc.stacked(), tol);
    let resid = (&mixing * bc.stacked() - local.stacked()).norm();
    if resid > tol.eq.sqrt() * local.stacked().norm().max(1.0) {
        return Err(Error::Numerical(format!("mixing matrix residual {resid:e}")));
    }
    Ok(VertexBlocks { blocks, mixing })
}

/// Delta coupling at a vertex of degree `d`: continuity rows
/// `ψ_r − ψ_{r+1}`, then `k_v ψ_d + Σ ψ′ = 0`.
pub fn delta_block(d: usize, strength: f64) -> (CMatrix, CMatrix) {
    let mut a = CMatrix::zeros(d, d);
    let mut b = CMatrix::zeros(d, d);
    for r in 0..d.saturating_sub(1) {
        a[(r, r)] = c(1.0, 0.0);
        a[(r, r + 1)] = c(-1.0, 0.0);
    }
    if d > 0 {
        a[(d - 1, d - 1)] = c(strength, 0.0);
        for s in 0..d {
            b[(d - 1, s)] = c(1.0, 0.0);
        }
    }
    (a, b)
}

/// Delta couplings of the given strengths at every vertex; all zeros gives
/// the standard (Kirchhoff) conditions.
pub fn standard_conditions(graph: &MetricGraph, strengths: &[f64]) -> Result<BoundaryConditions> {
    if strengths.len() != graph.n_vertices() {
        return Err(Error::DimensionMismatch {
            expected: graph.n_vertices(),
            found: strengths.len(),
        });
    }
    let map = graph.boundary_coordinate_map();
    let blocks: Vec<_> = strengths
        .iter()
        .enumerate()
        .map(|(v, &kv)| {
            let slots = map.vertex_slots(v).to_vec();
            let (a, b) = delta_block(slots.len(), kv);
            VertexBlock {
                vertex: v,
                slots,
                a,
                b,
            }
        })
        .collect();
    assemble_blocks(map.dim(), &blocks)
}

pub fn kirchhoff(graph: &MetricGraph) -> BoundaryConditions {
    standard_conditions(graph, &vec![0.0; graph.n_vertices()]).expect("one strength per vertex")
}

pub fn dirichlet(graph: &MetricGraph) -> BoundaryConditions {
    let k = graph.boundary_dim();
    BoundaryConditions {
        a: CMatrix::identity(k, k),
        b: CMatrix::zeros(k, k),
    }
}

pub fn neumann(graph: &MetricGraph) -> BoundaryConditions {
    let k = graph.boundary_dim();
    BoundaryConditions {
        a: CMatrix::zeros(k, k),
        b: CMatrix::identity(k, k),
    }
}
