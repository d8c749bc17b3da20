//! The group `𝖴` of diagonal unitaries on boundary coordinates, its subgroups
//! `𝖴₀` and `𝖶₀`, and the isotropy group `𝖶(A,B)` of a Laplacian.
//!
//! Membership in `𝖶(A,B)` follows the pseudoinverse characterization: `𝒰`
//! must leave `Ker A` and `Ker B` invariant and commute with `A⋆B` on
//! `B⁻¹(Ran A ∩ Ran B)`. The mirrored condition with `B⋆A` on
//! `A⁻¹(Ran A ∩ Ran B)` is evaluated alongside as a cross-check.

use nalgebra::DMatrix;

use crate::boundary::BoundaryConditions;
use crate::error::{Error, Result};
use crate::graph::{BoundaryCoordinateMap, Endpoint, MetricGraph};
use crate::homology::spanning_forest;
use crate::linalg::{self, c, intersect, kernel, preimage, range, CMatrix, Subspace, Tolerances, C64};
use crate::phase::{angle_distance, wrap_angle};

/// `diag(e^{iφ_1}, …, e^{iφ_k})` in canonical boundary ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalUnitary {
    phases: Vec<f64>,
}

impl DiagonalUnitary {
    pub fn new(phases: Vec<f64>) -> Self {
        Self { phases }
    }

    pub fn identity(k: usize) -> Self {
        Self::new(vec![0.0; k])
    }

    /// `e^{iα} 𝕀`
    pub fn scalar(k: usize, alpha: f64) -> Self {
        Self::new(vec![alpha; k])
    }

    /// The element of `𝖶₀` acting as `e^{iψ_v}` on each `ℒ_v`.
    pub fn from_vertex_phases(map: &BoundaryCoordinateMap, vertex_phases: &[f64]) -> Self {
        let phases = map.slots().iter().map(|s| vertex_phases[s.vertex]).collect();
        Self::new(phases)
    }

    /// `exp(i t θ)` for a real direction `θ`.
    pub fn exp(direction: &[f64], t: f64) -> Self {
        Self::new(direction.iter().map(|x| t * x).collect())
    }

    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Phases wrapped to `(−π, π]`.
    pub fn normalized_phases(&self) -> Vec<f64> {
        self.phases.iter().map(|&p| wrap_angle(p)).collect()
    }

    pub fn entry(&self, j: usize) -> C64 {
        C64::from_polar(1.0, self.phases[j])
    }

    pub fn to_matrix(&self) -> CMatrix {
        let k = self.dim();
        CMatrix::from_fn(k, k, |i, j| if i == j { self.entry(i) } else { c(0.0, 0.0) })
    }

    pub fn compose(&self, other: &DiagonalUnitary) -> DiagonalUnitary {
        assert_eq!(self.dim(), other.dim(), "unitaries of different size");
        Self::new(
            self.phases
                .iter()
                .zip(&other.phases)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn inverse(&self) -> DiagonalUnitary {
        Self::new(self.phases.iter().map(|a| -a).collect())
    }

    pub fn approx_eq(&self, other: &DiagonalUnitary, tol: f64) -> bool {
        self.dim() == other.dim()
            && self
                .phases
                .iter()
                .zip(&other.phases)
                .all(|(a, b)| angle_distance(*a, *b) <= tol)
    }

    /// `φ_i⁺ − φ_i⁻` for internal edge `i`.
    pub fn edge_gap(&self, map: &BoundaryCoordinateMap, i: usize) -> f64 {
        self.phases[map.terminal_slot(i)] - self.phases[map.initial_slot(i)]
    }
}

/// `𝖴₀`: equal phases (mod 2π) at both ends of every internal edge.
pub fn in_u0(u: &DiagonalUnitary, map: &BoundaryCoordinateMap, tol: &Tolerances) -> bool {
    u.dim() == map.dim() && (0..map.n_internal()).all(|i| wrap_angle(u.edge_gap(map, i)).abs() <= tol.eq)
}

/// `𝖶₀`: one phase (mod 2π) on each vertex subspace `ℒ_v`.
pub fn in_w0(u: &DiagonalUnitary, map: &BoundaryCoordinateMap, tol: &Tolerances) -> bool {
    u.dim() == map.dim()
        && map.all_vertex_slots().iter().all(|slots| {
            slots
                .windows(2)
                .all(|w| angle_distance(u.phases[w[0]], u.phases[w[1]]) <= tol.eq)
        })
}

/// Subspaces and matrices entering the membership conditions, computed once
/// per boundary condition.
struct IsotropyData {
    ker_a: Subspace,
    ker_b: Subspace,
    /// `A⋆B`
    a_pinv_b: CMatrix,
    /// `B⋆A`
    b_pinv_a: CMatrix,
    /// basis of `B⁻¹(Ran A ∩ Ran B)`
    pre_b: Subspace,
    /// basis of `A⁻¹(Ran A ∩ Ran B)`
    pre_a: Subspace,
    /// basis of `Ran A ∩ Ran B`
    common_range: Subspace,
}

impl IsotropyData {
    fn new(bc: &BoundaryConditions, tol: &Tolerances) -> Result<Self> {
        if !bc.check_self_adjoint(tol) {
            return Err(Error::NotSelfAdjoint);
        }
        let (a, b) = (bc.a(), bc.b());
        let common_range = intersect(&range(a, tol), &range(b, tol), tol)?;
        Ok(Self {
            ker_a: kernel(a, tol),
            ker_b: kernel(b, tol),
            a_pinv_b: bc.a_pinv(tol) * b,
            b_pinv_a: bc.b_pinv(tol) * a,
            pre_b: preimage(b, &common_range, tol)?,
            pre_a: preimage(a, &common_range, tol)?,
            common_range,
        })
    }
}

fn commutes_on(um: &CMatrix, m: &CMatrix, z: &Subspace, tol: &Tolerances) -> bool {
    let comm = um * m - m * um;
    (comm * z.basis()).norm() <= tol.eq * m.norm().max(1.0)
}

/// Outcome of each condition of the membership test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MembershipReport {
    pub ker_a_invariant: bool,
    pub ker_b_invariant: bool,
    /// `[𝒰, A⋆B] z = 0` on `B⁻¹(Ran A ∩ Ran B)`.
    pub commutator: bool,
    /// `[𝒰, B⋆A] z = 0` on `A⁻¹(Ran A ∩ Ran B)`.
    pub dual_commutator: bool,
}

impl MembershipReport {
    pub fn is_member(&self) -> bool {
        self.ker_a_invariant && self.ker_b_invariant && self.commutator
    }

    /// Whether the two equivalent forms of the commutator condition agree,
    /// given kernel invariance.
    pub fn consistent(&self) -> bool {
        !(self.ker_a_invariant && self.ker_b_invariant) || self.commutator == self.dual_commutator
    }
}

fn report_with(data: &IsotropyData, u: &DiagonalUnitary, tol: &Tolerances) -> MembershipReport {
    let um = u.to_matrix();
    MembershipReport {
        ker_a_invariant: data.ker_a.is_invariant_under(&um, tol),
        ker_b_invariant: data.ker_b.is_invariant_under(&um, tol),
        commutator: commutes_on(&um, &data.a_pinv_b, &data.pre_b, tol),
        dual_commutator: commutes_on(&um, &data.b_pinv_a, &data.pre_a, tol),
    }
}

pub fn membership_report(
    bc: &BoundaryConditions,
    u: &DiagonalUnitary,
    tol: &Tolerances,
) -> Result<MembershipReport> {
    check_unitary_dim(bc, u)?;
    let data = IsotropyData::new(bc, tol)?;
    Ok(report_with(&data, u, tol))
}

fn check_unitary_dim(bc: &BoundaryConditions, u: &DiagonalUnitary) -> Result<()> {
    if u.dim() != bc.dim() {
        return Err(Error::DimensionMismatch {
            expected: bc.dim(),
            found: u.dim(),
        });
    }
    Ok(())
}

/// Whether `Δ(A𝒰, B𝒰) = Δ(A, B)`.
pub fn isotropy_membership(bc: &BoundaryConditions, u: &DiagonalUnitary, tol: &Tolerances) -> Result<bool> {
    let report = membership_report(bc, u, tol)?;
    if !report.consistent() {
        return Err(Error::Numerical(
            "commutator conditions on B⁻¹(Ran A ∩ Ran B) and A⁻¹(Ran A ∩ Ran B) disagree".into(),
        ));
    }
    Ok(report.is_member())
}

/// `C = (A𝒰A⋆ + B𝒰B⋆)(P_{Ran A} + P_{Ran B})⁻¹`, satisfying `CA = A𝒰` and
/// `CB = B𝒰` for members of the isotropy group.
pub fn build_c(bc: &BoundaryConditions, u: &DiagonalUnitary, tol: &Tolerances) -> Result<CMatrix> {
    check_unitary_dim(bc, u)?;
    let data = IsotropyData::new(bc, tol)?;
    if !report_with(&data, u, tol).is_member() {
        return Err(Error::NotInIsotropyGroup);
    }
    let (a, b) = (bc.a(), bc.b());
    let um = u.to_matrix();
    let aua = a * &um * bc.a_pinv(tol);
    let bub = b * &um * bc.b_pinv(tol);
    // compatibility on Ran A ∩ Ran B
    let y = data.common_range.basis();
    let compat = (&aua * y - &bub * y).norm();
    if compat > tol.eq * (aua.norm() + bub.norm()).max(1.0) {
        return Err(Error::NotInIsotropyGroup);
    }
    let sum = range(a, tol).projector() + range(b, tol).projector();
    let inv = sum.try_inverse().ok_or(Error::Singular)?;
    Ok((aua + bub) * inv)
}

/// Identity component of `𝖶(A,B)`, described by its Lie algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotropyDescription {
    pub dimension: usize,
    /// Orthonormal basis of the real tangent space, one phase direction per entry.
    pub tangent_basis: Vec<Vec<f64>>,
    pub contains_w0: bool,
    pub equals_u: bool,
}

impl IsotropyDescription {
    /// Element `exp(i Σ t_j θ_j)` of the identity component.
    pub fn element(&self, coefficients: &[f64]) -> DiagonalUnitary {
        let k = self.tangent_basis.first().map_or(0, Vec::len);
        let mut phases = vec![0.0; k];
        for (basis, &t) in self.tangent_basis.iter().zip(coefficients) {
            for (p, x) in phases.iter_mut().zip(basis) {
                *p += t * x;
            }
        }
        DiagonalUnitary::new(phases)
    }

    /// Distance of a real direction from the tangent space.
    pub fn tangent_residual(&self, direction: &[f64]) -> f64 {
        let mut r = direction.to_vec();
        for basis in &self.tangent_basis {
            let dot: f64 = basis.iter().zip(direction).map(|(a, b)| a * b).sum();
            for (ri, bi) in r.iter_mut().zip(basis) {
                *ri -= dot * bi;
            }
        }
        r.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Real tangent space `{θ ∈ ℝ^k : Σ_j c_j θ_j = 0 for every row c}` of a
/// family of complex linear constraints on the diagonal entries.
fn real_tangent(rows: &[Vec<C64>], k: usize, tol: &Tolerances) -> Vec<Vec<f64>> {
    if k == 0 {
        return Vec::new();
    }
    let mut m = DMatrix::<f64>::zeros(2 * rows.len(), k);
    for (r, row) in rows.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            m[(2 * r, j)] = z.re;
            m[(2 * r + 1, j)] = z.im;
        }
    }
    // rows are O(1) by construction, so the cutoff is absolute below unit scale
    let basis = linalg::kernel_basis(&m, tol.rank, tol.rank);
    if basis.nrows() == 0 {
        return (0..k)
            .map(|j| (0..k).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
    }
    basis
        .column_iter()
        .map(|col| col.iter().copied().collect())
        .collect()
}

/// `(I − P) diag(u) Q = 0` written as rows of coefficients for `u`.
fn invariance_rows(s: &Subspace, out: &mut Vec<Vec<C64>>) {
    let k = s.ambient();
    let comp = CMatrix::identity(k, k) - s.projector();
    let q = s.basis();
    for col in 0..q.ncols() {
        for r in 0..k {
            out.push((0..k).map(|j| comp[(r, j)] * q[(j, col)]).collect());
        }
    }
}

/// `[diag(u), M] z = 0` written as rows of coefficients for `u`.
fn commutator_rows(m: &CMatrix, z: &Subspace, out: &mut Vec<Vec<C64>>) {
    let k = m.nrows();
    let scale = 1.0 / m.norm().max(1.0);
    for zc in z.basis().column_iter() {
        let mz = m * zc;
        for r in 0..k {
            out.push(
                (0..k)
                    .map(|j| {
                        let diag = if r == j { mz[r] } else { c(0.0, 0.0) };
                        (diag - m[(r, j)] * zc[j]) * scale
                    })
                    .collect(),
            );
        }
    }
}

/// Linearizes the membership conditions at the identity and returns the
/// resulting Lie algebra. Each basis direction is exponentiated at a few
/// parameters and checked against the exact membership test.
pub fn isotropy_identity_component(
    bc: &BoundaryConditions,
    map: &BoundaryCoordinateMap,
    tol: &Tolerances,
) -> Result<IsotropyDescription> {
    bc.check_shape(map)?;
    let data = IsotropyData::new(bc, tol)?;
    let k = bc.dim();
    let mut rows = Vec::new();
    invariance_rows(&data.ker_a, &mut rows);
    invariance_rows(&data.ker_b, &mut rows);
    commutator_rows(&data.a_pinv_b, &data.pre_b, &mut rows);
    let tangent_basis = real_tangent(&rows, k, tol);

    for dir in &tangent_basis {
        for t in [0.0, 0.3, 1.7] {
            let u = DiagonalUnitary::exp(dir, t);
            if !report_with(&data, &u, tol).is_member() {
                return Err(Error::Numerical(format!(
                    "tangent direction fails membership at t = {t}"
                )));
            }
        }
    }

    let mut desc = IsotropyDescription {
        dimension: tangent_basis.len(),
        tangent_basis,
        contains_w0: false,
        equals_u: false,
    };
    desc.equals_u = desc.dimension == k;
    desc.contains_w0 = (0..map.n_vertices()).all(|v| {
        let mut ind = vec![0.0; k];
        for &j in map.vertex_slots(v) {
            ind[j] = 1.0;
        }
        desc.tangent_residual(&ind) <= tol.eq.sqrt()
    });
    Ok(desc)
}

/// Dimension of `𝖶(A,B)` computed from the invariance of `ℳ(A,B)` under
/// `diag(𝒰, 𝒰)`, independently of the pseudoinverse conditions.
pub fn isotropy_dimension_by_invariance(bc: &BoundaryConditions, tol: &Tolerances) -> Result<usize> {
    let m = bc.isotropic_subspace(tol)?;
    let k = bc.dim();
    let comp = CMatrix::identity(2 * k, 2 * k) - m.projector();
    let q = m.basis();
    let mut rows = Vec::new();
    for col in 0..q.ncols() {
        for r in 0..2 * k {
            rows.push(
                (0..k)
                    .map(|j| comp[(r, j)] * q[(j, col)] + comp[(r, k + j)] * q[(k + j, col)])
                    .collect(),
            );
        }
    }
    Ok(real_tangent(&rows, k, tol).len())
}

/// Result of splitting `𝒰 = 𝒰₀ 𝒲₀` with `𝒰₀ ∈ 𝖴₀`, `𝒲₀ ∈ 𝖶₀`.
#[derive(Debug, Clone, PartialEq)]
pub enum Factorization {
    Product {
        u0: DiagonalUnitary,
        w0: DiagonalUnitary,
        vertex_phases: Vec<f64>,
    },
    /// The phase gaps around some cycle do not cancel; `edge` is the chord
    /// where the inconsistency was detected.
    NotInProduct { edge: usize, defect: f64 },
}

impl Factorization {
    pub fn is_product(&self) -> bool {
        matches!(self, Factorization::Product { .. })
    }
}

/// Solves `φ_e = β_e + ψ_{v(e)}`, `φ_i^∓ = α_i + ψ_{v∓(i)}` (mod 2π) by
/// propagating vertex phases along a spanning forest and checking chords.
pub fn factorize_u0w0(u: &DiagonalUnitary, graph: &MetricGraph, tol: &Tolerances) -> Result<Factorization> {
    let map = graph.boundary_coordinate_map();
    if u.dim() != map.dim() {
        return Err(Error::DimensionMismatch {
            expected: map.dim(),
            found: u.dim(),
        });
    }
    let forest = spanning_forest(graph);
    let edges = graph.internal_edges();
    let mut psi = vec![0.0; graph.n_vertices()];
    for &v in &forest.order {
        if let Some((i, p)) = forest.parent[v] {
            let gap = u.edge_gap(&map, i);
            psi[v] = if edges[i].initial == p {
                psi[p] + gap
            } else {
                psi[p] - gap
            };
        }
    }
    for &i in &forest.chords {
        let e = &edges[i];
        let defect = wrap_angle(u.edge_gap(&map, i) - (psi[e.terminal] - psi[e.initial]));
        if defect.abs() > tol.eq {
            return Ok(Factorization::NotInProduct { edge: i, defect });
        }
    }
    let w0 = DiagonalUnitary::from_vertex_phases(&map, &psi);
    let u0 = DiagonalUnitary::new(
        map.slots()
            .iter()
            .enumerate()
            .map(|(j, s)| {
                let edge_phase = match s.endpoint {
                    Endpoint::External(_) => u.phases[j] - psi[s.vertex],
                    Endpoint::Initial(i) | Endpoint::Terminal(i) => {
                        let init = map.initial_slot(i);
                        u.phases[init] - psi[edges[i].initial]
                    }
                };
                wrap_angle(edge_phase)
            })
            .collect(),
    );
    debug_assert!(u0.compose(&w0).approx_eq(u, 1e3 * tol.eq));
    Ok(Factorization::Product {
        u0,
        w0,
        vertex_phases: psi,
    })
}

/// Real linear map `(ψ, α, β) ↦ φ` behind [`factorize_u0w0`], with columns
/// ordered as vertices, internal edges, external edges.
pub fn factorization_system(graph: &MetricGraph) -> DMatrix<f64> {
    let map = graph.boundary_coordinate_map();
    let (nv, m, n) = (graph.n_vertices(), graph.n_internal(), graph.n_external());
    let mut sys = DMatrix::zeros(map.dim(), nv + m + n);
    for (j, s) in map.slots().iter().enumerate() {
        sys[(j, s.vertex)] = 1.0;
        match s.endpoint {
            Endpoint::External(e) => sys[(j, nv + m + e)] = 1.0,
            Endpoint::Initial(i) | Endpoint::Terminal(i) => sys[(j, nv + i)] = 1.0,
        }
    }
    sys
}

/// `dim 𝖴₀𝖶₀`, as the rank of [`factorization_system`].
pub fn factorization_dimension(graph: &MetricGraph, tol: &Tolerances) -> usize {
    let sys = factorization_system(graph);
    if sys.is_empty() {
        return 0;
    }
    let sv = crate::svd::svd(&sys).singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > tol.rank * max).count()
}
