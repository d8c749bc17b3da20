//! Eigenvalue solver for magnetic Laplacians on compact graphs.
//!
//! On a segment where `𝒜 ≡ c` every solution of `−(d/dx − ic)²ψ = k²ψ` is
//! `e^{icx}(p cos kx + q sin(kx)/k)`, the same span as
//! `α e^{i(c+k)x} + β e^{i(c−k)x}` but well conditioned as `k → 0`. The
//! unknowns are `(ψ, Dψ)` with `Dψ = ψ′ − i𝒜ψ` at the start of each piece.
//! Both are continuous across piece boundaries, and the boundary conditions
//! `Aψ̲ + B(ψ̲′ − i𝒜̲ψ̲) = 0` read `Aψ̲ + B·(Dψ(0), −Dψ(a))`. The secular value is
//! the smallest singular value of the resulting square system.

use std::thread;

use crate::boundary::BoundaryConditions;
use crate::error::{Error, Result};
use crate::graph::MetricGraph;
use crate::linalg::{c, singular_values, smallest_singular_value, CMatrix, C64};
use crate::potential::{Piece, VectorPotential};

/// Compact graph, boundary conditions, and an optional potential.
#[derive(Debug, Clone)]
pub struct SecularProblem {
    graph: MetricGraph,
    bc: BoundaryConditions,
    /// Pieces of every internal edge; one zero piece when there is no potential.
    pieces: Vec<Vec<Piece>>,
    /// Column offset of each edge's first piece.
    offsets: Vec<usize>,
    n_pieces: usize,
}

impl SecularProblem {
    pub fn new(
        graph: &MetricGraph,
        bc: &BoundaryConditions,
        potential: Option<&VectorPotential>,
    ) -> Result<Self> {
        if !graph.is_compact() {
            return Err(Error::NotCompact);
        }
        if graph.n_internal() == 0 {
            return Err(Error::InvalidGraph("no internal edges".into()));
        }
        bc.check_shape(&graph.boundary_coordinate_map())?;
        let zero;
        let pot = match potential {
            Some(p) => p,
            None => {
                zero = VectorPotential::zero(graph);
                &zero
            }
        };
        let pieces: Vec<Vec<Piece>> = graph
            .internal_edges()
            .iter()
            .enumerate()
            .map(|(i, e)| pot.pieces_or_zero(i, e.length))
            .collect();
        let mut offsets = Vec::with_capacity(pieces.len());
        let mut n_pieces = 0;
        for p in &pieces {
            offsets.push(n_pieces);
            n_pieces += p.len();
        }
        Ok(Self {
            graph: graph.clone(),
            bc: bc.clone(),
            pieces,
            offsets,
            n_pieces,
        })
    }

    pub fn graph(&self) -> &MetricGraph {
        &self.graph
    }

    pub fn boundary_conditions(&self) -> &BoundaryConditions {
        &self.bc
    }

    /// Size of the square secular system.
    pub fn size(&self) -> usize {
        2 * self.n_pieces
    }
}

/// Maps `(ψ, Dψ)` at the start of a piece to its end.
fn transfer(piece: &Piece, k: f64) -> [[C64; 2]; 2] {
    let (s, co) = (k * piece.length).sin_cos();
    let ph = C64::from_polar(1.0, piece.value * piece.length);
    [[ph * co, ph * (s / k)], [ph * (-k * s), ph * co]]
}

fn check_k(k: f64) -> Result<()> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidScan(format!("k = {k} must be positive")));
    }
    Ok(())
}

/// `A·X(k) + B·Y(k)` stacked with the continuity rows between pieces.
pub fn secular_matrix(prob: &SecularProblem, k: f64) -> Result<CMatrix> {
    check_k(k)?;
    let map = prob.graph.boundary_coordinate_map();
    let (a, b) = (prob.bc.a(), prob.bc.b());
    let kdim = map.dim();
    let size = prob.size();
    let mut m = CMatrix::zeros(size, size);
    let mut row = kdim;
    for (i, pieces) in prob.pieces.iter().enumerate() {
        let first = 2 * prob.offsets[i];
        let last = first + 2 * (pieces.len() - 1);
        let init = map.initial_slot(i);
        let term = map.terminal_slot(i);
        // ψ(0) and Dψ(0)
        for r in 0..kdim {
            m[(r, first)] += a[(r, init)];
            m[(r, first + 1)] += b[(r, init)];
        }
        // continuity between consecutive pieces
        for (p, piece) in pieces.iter().enumerate().take(pieces.len() - 1) {
            let t = transfer(piece, k);
            let col = first + 2 * p;
            for s in 0..2 {
                m[(row + s, col)] = t[s][0];
                m[(row + s, col + 1)] = t[s][1];
                m[(row + s, col + 2 + s)] = c(-1.0, 0.0);
            }
            row += 2;
        }
        // ψ(a) and −Dψ(a)
        let t = transfer(pieces.last().expect("nonempty"), k);
        for r in 0..kdim {
            for s in 0..2 {
                m[(r, last + s)] += a[(r, term)] * t[0][s] - b[(r, term)] * t[1][s];
            }
        }
    }
    debug_assert_eq!(row, size);
    Ok(m)
}

/// `σ_min` of the secular matrix; zero exactly when `k²` is an eigenvalue.
pub fn secular_value(prob: &SecularProblem, k: f64) -> Result<f64> {
    Ok(smallest_singular_value(&secular_matrix(prob, k)?))
}

/// A located eigenvalue `k²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub k: f64,
    pub residual: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    /// Sorted by `k`.
    pub roots: Vec<Root>,
    pub k_max: f64,
    pub grid_step: f64,
    pub threshold: f64,
}

impl SpectrumResult {
    /// A spectrum given by exact values in `(0, k_max]`; repeated values
    /// become multiplicities.
    pub fn reference(mut values: Vec<f64>, k_max: f64) -> Self {
        values.retain(|&k| k > 0.0 && k <= k_max + MERGE_TOL);
        values.sort_by(f64::total_cmp);
        let mut roots: Vec<Root> = Vec::new();
        for k in values {
            match roots.last_mut() {
                Some(r) if (r.k - k).abs() <= MERGE_TOL => r.multiplicity += 1,
                _ => roots.push(Root {
                    k,
                    residual: 0.0,
                    multiplicity: 1,
                }),
            }
        }
        Self {
            roots,
            k_max,
            grid_step: 0.0,
            threshold: 0.0,
        }
    }

    /// Roots repeated by multiplicity.
    pub fn expanded(&self) -> Vec<f64> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.k, r.multiplicity))
            .collect()
    }

    pub fn count(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }
}

/// Relative root acceptance threshold against the median grid value.
pub const ROOT_THRESHOLD: f64 = 1e-6;
const MERGE_TOL: f64 = 1e-7;
const REFINE_TOL: f64 = 1e-12;

fn evaluate_grid(prob: &SecularProblem, ks: &[f64]) -> Result<Vec<f64>> {
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(8);
    if workers <= 1 || ks.len() < 64 {
        return ks.iter().map(|&k| secular_value(prob, k)).collect();
    }
    let chunk = ks.len().div_ceil(workers);
    thread::scope(|scope| {
        let handles: Vec<_> = ks
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|&k| secular_value(prob, k))
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        let mut out = Vec::with_capacity(ks.len());
        for h in handles {
            out.extend(h.join().expect("grid worker panicked")?);
        }
        Ok(out)
    })
}

/// Golden-section search for the minimum of `f` on `[lo, hi]`.
fn golden_min(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while hi - lo > REFINE_TOL * hi.max(1.0) {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Locates eigenvalues `k²` with `k ∈ (0, k_max]`. Grid minima of the secular
/// value are refined by golden-section search and accepted below
/// [`ROOT_THRESHOLD`] times the median grid value. The step should not exceed
/// `π / (4 · total length)`.
pub fn eigenvalues_scan(prob: &SecularProblem, k_max: f64, grid_step: f64) -> Result<SpectrumResult> {
    if !(k_max.is_finite() && k_max > 0.0) {
        return Err(Error::InvalidScan(format!("k_max = {k_max} must be positive")));
    }
    if !(grid_step.is_finite() && grid_step > 0.0 && grid_step <= k_max) {
        return Err(Error::InvalidScan(format!(
            "grid step {grid_step} must lie in (0, k_max]"
        )));
    }
    let n = (k_max / grid_step).ceil() as usize + 1;
    let mut ks = vec![grid_step * 1e-3];
    ks.extend((1..=n).map(|j| j as f64 * grid_step));
    let fs = evaluate_grid(prob, &ks)?;
    let threshold = ROOT_THRESHOLD * median(&fs);

    let mut roots: Vec<Root> = Vec::new();
    for j in 1..ks.len() - 1 {
        if !(fs[j] <= fs[j - 1] && fs[j] <= fs[j + 1]) {
            continue;
        }
        let (k, residual) = golden_min(ks[j - 1], ks[j + 1], |x| secular_value(prob, x))?;
        if residual > threshold || k > k_max + 1e-8 {
            continue;
        }
        let sv = singular_values(&secular_matrix(prob, k)?);
        let multiplicity = sv.iter().filter(|&&s| s <= threshold).count().max(1);
        match roots.last_mut() {
            Some(r) if (r.k - k).abs() <= MERGE_TOL => {
                r.multiplicity = r.multiplicity.max(multiplicity);
                if residual < r.residual {
                    r.k = k;
                    r.residual = residual;
                }
            }
            _ => roots.push(Root {
                k,
                residual,
                multiplicity,
            }),
        }
    }
    Ok(SpectrumResult {
        roots,
        k_max,
        grid_step,
        threshold,
    })
}

/// Outcome of matching two spectra root by root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumComparison {
    /// Largest `|Δk|` over matched pairs.
    pub max_deviation: f64,
    pub matched: usize,
    /// Roots, counted with multiplicity, left without a partner.
    pub mismatches: usize,
}

impl SpectrumComparison {
    pub fn agrees(&self, tol: f64) -> bool {
        self.mismatches == 0 && self.max_deviation <= tol
    }
}

/// Greedy matching of sorted roots, expanded by multiplicity. Roots closer
/// than `tol` pair up; the rest count as mismatches.
pub fn compare_spectra(r1: &SpectrumResult, r2: &SpectrumResult, tol: f64) -> Result<SpectrumComparison> {
    if (r1.k_max - r2.k_max).abs() > 1e-12 * r1.k_max.max(1.0) {
        return Err(Error::WindowMismatch);
    }
    let (a, b) = (r1.expanded(), r2.expanded());
    let (mut i, mut j) = (0, 0);
    let mut out = SpectrumComparison {
        max_deviation: 0.0,
        matched: 0,
        mismatches: 0,
    };
    while i < a.len() && j < b.len() {
        let d = (a[i] - b[j]).abs();
        if d <= tol {
            out.max_deviation = out.max_deviation.max(d);
            out.matched += 1;
            i += 1;
            j += 1;
        } else if a[i] < b[j] {
            out.mismatches += 1;
            i += 1;
        } else {
            out.mismatches += 1;
            j += 1;
        }
    }
    out.mismatches += (a.len() - i) + (b.len() - j);
    Ok(out)
}

/// `{|2πn + θ| / L : n ∈ ℤ} ∩ (0, k_max]` with multiplicity: the spectrum of a
/// ring of length `L` with flux `θ`.
pub fn ring_spectrum(length: f64, theta: f64, k_max: f64) -> SpectrumResult {
    let two_pi = 2.0 * std::f64::consts::PI;
    let n_max = (k_max * length / two_pi).ceil() as i64 + 2;
    let values = (-n_max..=n_max)
        .map(|n| (two_pi * n as f64 + theta).abs() / length)
        .collect();
    SpectrumResult::reference(values, k_max)
}
