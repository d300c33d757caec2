use crate::numkit::{kolmogorov_factor, solve_on_span, CMatrix, NumError, C64};
use crate::prelude::*;

use super::{ItoAlgebra, ItoError, Quadruple};

/// Worst-case defects of a GNS construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GnsResiduals {
    /// `max |l(e_i⋆ e_j) − k(e_i)†k(e_j)|`.
    pub isometry: f64,
    /// `max ‖T(e_i e_j) − T(e_i)T(e_j)‖_F`.
    pub homomorphism: f64,
    /// `max ‖T(e_i⋆) − T(e_i)♭‖_F`.
    pub flat: f64,
    pub threshold: f64,
}

impl GnsResiduals {
    pub fn passed(&self) -> bool {
        self.isometry <= self.threshold && self.homomorphism <= self.threshold && self.flat <= self.threshold
    }
}

/// Quadruples of the basis elements; extends linearly to the whole algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct GnsRepresentation {
    pub dim_k: usize,
    pub basis_quadruples: Vec<Quadruple>,
    pub residuals: GnsResiduals,
}

impl GnsRepresentation {
    /// `Q(a) = Σ a_i Q(e_i)`.
    pub fn quadruple(&self, a: &[C64]) -> Result<Quadruple, ItoError> {
        if a.len() != self.basis_quadruples.len() {
            return Err(ItoError::DimensionMismatch { expected: self.basis_quadruples.len(), found: a.len() });
        }
        Ok(a.iter()
            .zip(&self.basis_quadruples)
            .fold(Quadruple::zero(self.dim_k), |acc, (c, q)| acc.add(&q.scale(*c))))
    }
}

/// GNS construction: factor `Γ_ij = l(e_i⋆ e_j)` as `k(e_i)†k(e_j)`, solve
/// `j(a)k(b) = k(ab)` on the span of the `k`'s, and set `k*(a) = k(a⋆)†`.
///
/// A non-positive `l` surfaces as [`NumError::NegativeEigenvalue`]; a `j`
/// that cannot be represented (an axiom defect) as
/// [`NumError::ResidualTooLarge`].
pub fn gns_quadruple(alg: &ItoAlgebra) -> Result<GnsRepresentation, ItoError> {
    let tol = alg.tolerance();
    let n = alg.dim();
    let gram = alg.gram();
    let factor = kolmogorov_factor(&gram, tol)?;
    let v = factor.v;
    let dk = factor.rank;

    let k_of = |coeffs: &[C64]| v.mul_vec(coeffs);
    let mut quads = Vec::with_capacity(n);
    for i in 0..n {
        let ei = alg.basis_vector(i);
        let j = if dk == 0 {
            CMatrix::zeros(0, 0)
        } else {
            let targets = CMatrix::from_columns(
                dk,
                &(0..n).map(|c| k_of(&alg.mul_unchecked(&ei, &alg.basis_vector(c)))).collect::<Vec<_>>(),
            );
            solve_on_span(&targets, &v, tol)?
        };
        let kstar = k_of(&alg.star_unchecked(&ei)).iter().map(|z| z.conj()).collect();
        quads.push(Quadruple { l: alg.functional()[i], k: v.column(i), kstar, j });
    }

    let kk = v.adjoint_mul(&v);
    let isometry = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (gram[(i, j)] - kk[(i, j)]).norm())
        .fold(0.0, f64::max);
    let rep = GnsRepresentation {
        dim_k: dk,
        basis_quadruples: quads,
        residuals: GnsResiduals { isometry, homomorphism: 0.0, flat: 0.0, threshold: 0.0 },
    };
    let mut homomorphism = 0.0f64;
    let mut flat = 0.0f64;
    let mut scale = 1.0f64;
    for i in 0..n {
        let qi = &rep.basis_quadruples[i];
        scale = scale.max(qi.to_triangular().max_abs());
        for j in 0..n {
            let prod = alg.mul_unchecked(&alg.basis_vector(i), &alg.basis_vector(j));
            let lhs = rep.quadruple(&prod)?;
            let rhs = qi.mul(&rep.basis_quadruples[j])?;
            homomorphism = homomorphism.max(lhs.distance(&rhs));
        }
        let star = rep.quadruple(&alg.star_unchecked(&alg.basis_vector(i)))?;
        flat = flat.max(star.distance(&qi.flat()));
    }
    let threshold = tol.threshold(scale * scale * n.max(1) as f64).max(factor.threshold);
    let residuals = GnsResiduals { isometry, homomorphism, flat, threshold };
    let out = GnsRepresentation { residuals, ..rep };
    if !residuals.passed() {
        let worst = residuals.isometry.max(residuals.homomorphism).max(residuals.flat);
        return Err(ItoError::Num(NumError::ResidualTooLarge { residual: worst, threshold }));
    }
    Ok(out)
}
