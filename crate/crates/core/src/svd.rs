//! One-sided Jacobi singular value decomposition.
//!
//! Columns are orthogonalized pairwise by plane rotations until every pair is
//! orthogonal to working precision. Small singular values come out with high
//! relative accuracy and the right singular vectors of a rank-deficient matrix
//! span its kernel exactly, which is what the rank decisions in this crate
//! rely on.

use nalgebra::{ComplexField, DMatrix, DVector};

/// `M = U Σ V†` with `U` of size `m × n` (columns of zero singular values
/// are zero), `Σ` sorted in decreasing order, and `V` unitary `n × n`.
#[derive(Debug, Clone)]
pub struct Svd<T: ComplexField<RealField = f64>> {
    pub u: DMatrix<T>,
    pub singular_values: DVector<f64>,
    pub v: DMatrix<T>,
}

const MAX_SWEEPS: usize = 80;

pub fn svd<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> Svd<T> {
    let (rows, n) = m.shape();
    // zero rows keep every column rotation inside ℂ^rows
    let mut w = if rows < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (rows, n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let mut v = DMatrix::<T>::identity(n, n);
    let eps = f64::EPSILON;

    // columns this small are zero for every purpose here; rotating two of
    // them would form inner products in the subnormal range
    let negligible = (1e-30 * w.norm()).powi(2);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma = w.column(p).dotc(&w.column(q));
                let g = gamma.clone().modulus();
                if g == 0.0 || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // rotate column q by the phase of γ so the problem is real
                let phase = gamma.conjugate().unscale(g);
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for mat in [&mut w, &mut v] {
                    for r in 0..mat.nrows() {
                        let xp = mat[(r, p)].clone();
                        let xq = mat[(r, q)].clone() * phase.clone();
                        mat[(r, p)] = xp.clone().scale(cs) - xq.clone().scale(sn);
                        mat[(r, q)] = xp.scale(sn) + xq.scale(cs);
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));

    let mut u = DMatrix::zeros(rows, n);
    let mut vs = DMatrix::zeros(n, n);
    let mut sv = DVector::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        sv[dst] = s;
        vs.set_column(dst, &v.column(src));
        if s > 0.0 {
            for r in 0..rows {
                u[(r, dst)] = w[(r, src)].clone().unscale(s);
            }
        }
    }
    Svd {
        u,
        singular_values: sv,
        v: vs,
    }
}
