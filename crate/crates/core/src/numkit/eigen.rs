//! Cyclic Jacobi methods for Hermitian eigenproblems and singular values.
//!
//! Both routines apply the same complex plane rotation: for a Hermitian 2×2
//! pivot `[[a, g], [ḡ, b]]` with `g = |g|e^{iφ}` the unitary
//!
//! ```text
//! J = [[ c,          s        ],
//!      [-s e^{-iφ},  c e^{-iφ}]]
//! ```
//!
//! diagonalizes the pivot, where `(c, s)` is the real symmetric Jacobi
//! rotation for `[[a, |g|], [|g|, b]]`.

use crate::prelude::*;

use super::matrix::{vec_norm, CMatrix, C64, ZERO};

const MAX_SWEEPS: usize = 100;

#[derive(Clone, Copy)]
struct Rotation {
    c: f64,
    s: f64,
    /// e^{-iφ}
    phase: C64,
}

impl Rotation {
    fn new(a: f64, b: f64, g: C64) -> Option<Self> {
        let mag = g.norm();
        // subnormal pivots lose the phase to rounding
        if mag < f64::MIN_POSITIVE {
            return None;
        }
        let tau = (b - a) / (2.0 * mag);
        let t = if tau >= 0.0 {
            1.0 / (tau + (1.0 + tau * tau).sqrt())
        } else {
            -1.0 / (-tau + (1.0 + tau * tau).sqrt())
        };
        let c = 1.0 / (1.0 + t * t).sqrt();
        let phase = (g / mag).conj();
        Some(Self { c, s: t * c, phase: phase / phase.norm() })
    }

    /// Columns `p, q` of `m` ← `m · J`.
    fn apply_right(&self, m: &mut CMatrix, p: usize, q: usize) {
        for i in 0..m.rows() {
            let (mp, mq) = (m[(i, p)], m[(i, q)]);
            m[(i, p)] = mp * self.c - mq * self.phase * self.s;
            m[(i, q)] = mp * self.s + mq * self.phase * self.c;
        }
    }

    /// Rows `p, q` of `m` ← `J† · m`.
    fn apply_left_adjoint(&self, m: &mut CMatrix, p: usize, q: usize) {
        let ph = self.phase.conj();
        for j in 0..m.cols() {
            let (mp, mq) = (m[(p, j)], m[(q, j)]);
            m[(p, j)] = mp * self.c - mq * ph * self.s;
            m[(q, j)] = mp * self.s + mq * ph * self.c;
        }
    }
}

/// Eigenvalues in descending order with matching unit eigenvectors as columns.
///
/// Each eigenvector has its first component of modulus above `1e-12` made
/// real and positive, so the decomposition is reproducible run to run.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

/// Eigendecomposition of a Hermitian matrix. Only the Hermitian part of `m` is used.
pub fn hermitian_eigen(m: &CMatrix) -> HermitianEigen {
    assert!(m.is_square(), "hermitian_eigen: non-square input");
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm();
    if n > 1 && scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= f64::EPSILON * scale * 1e-2 {
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let g = a[(p, q)];
                    if g.norm() <= f64::MIN_POSITIVE {
                        continue;
                    }
                    let Some(rot) = Rotation::new(a[(p, p)].re, a[(q, q)].re, g) else {
                        continue;
                    };
                    rot.apply_right(&mut a, p, q);
                    rot.apply_left_adjoint(&mut a, p, q);
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    a[(p, p)].im = 0.0;
                    a[(q, q)].im = 0.0;
                    rot.apply_right(&mut v, p, q);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(y, y)].re.total_cmp(&a[(x, x)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = v.select_columns(&order);
    normalize_phases(&mut vectors);
    HermitianEigen { values, vectors }
}

/// Rotates each column so its first component with modulus above 1e-12 is real positive.
pub(crate) fn normalize_phases(vectors: &mut CMatrix) {
    for j in 0..vectors.cols() {
        let col = vectors.column(j);
        let Some(lead) = col.iter().find(|z| z.norm() > 1e-12) else { continue };
        let phase = lead.conj() / lead.norm();
        let fixed: Vec<C64> = col.iter().map(|z| z * phase).collect();
        vectors.set_column(j, &fixed);
    }
}

/// Thin SVD `a · V = U · diag(s)` from one-sided Jacobi.
///
/// `v` is square unitary (cols(a) × cols(a)); `s` has one entry per column of
/// `a`, descending. Columns of `u` are unit vectors where `s > 0` and zero
/// otherwise.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

pub fn svd(a: &CMatrix) -> Svd {
    let n = a.cols();
    let mut w = a.clone();
    let mut v = CMatrix::identity(n);
    // columns below this squared norm are zero at working precision
    let negligible = (f64::EPSILON * a.frobenius_norm()).powi(2);
    if n > 1 {
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, ZERO);
                    for i in 0..w.rows() {
                        let (wp, wq) = (w[(i, p)], w[(i, q)]);
                        alpha += wp.norm_sqr();
                        beta += wq.norm_sqr();
                        gamma += wp.conj() * wq;
                    }
                    if alpha.min(beta) <= negligible || gamma.norm() <= f64::EPSILON * alpha.sqrt() * beta.sqrt() {
                        continue;
                    }
                    let Some(rot) = Rotation::new(alpha, beta, gamma) else { continue };
                    rot.apply_right(&mut w, p, q);
                    rot.apply_right(&mut v, p, q);
                    rotated = true;
                }
            }
            if !rotated {
                break;
            }
        }
    }
    let norms: Vec<f64> = (0..n).map(|j| vec_norm(&w.column(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let s: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let v = v.select_columns(&order);
    let mut u = w.select_columns(&order);
    for (j, &sj) in s.iter().enumerate() {
        let col: Vec<C64> = if sj > 0.0 {
            u.column(j).iter().map(|z| z / sj).collect()
        } else {
            alloc::vec![ZERO; u.rows()]
        };
        u.set_column(j, &col);
    }
    Svd { u, s, v }
}
