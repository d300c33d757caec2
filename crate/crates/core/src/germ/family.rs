use crate::ito_algebra::{gns_quadruple, GnsRepresentation, ItoAlgebra, ItoError};
use crate::numkit::{nullspace_basis, psd_check, CMatrix, Tolerance, C64, ONE};
use crate::prelude::*;

use super::{sandwich_block, GermError, GermMap, PdVerdict};

/// A finite test family `x_1 … x_m` for the conditional positivity form.
pub trait GermFamily {
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn space_dim(&self) -> usize;
    /// `dK · d`.
    fn dot_dim(&self) -> usize;
    /// Reference representation `i(x_k)`.
    fn rep(&self, k: usize) -> CMatrix;
    /// Block matrix of `x_l⋆x_k`.
    fn block(&self, l: usize, k: usize) -> CMatrix;
}

impl GermFamily for GermMap {
    fn len(&self) -> usize {
        self.semigroup().len()
    }

    fn space_dim(&self) -> usize {
        GermMap::space_dim(self)
    }

    fn dot_dim(&self) -> usize {
        GermMap::dot_dim(self)
    }

    fn rep(&self, k: usize) -> CMatrix {
        self.rep().image(k).clone()
    }

    fn block(&self, l: usize, k: usize) -> CMatrix {
        self.block_matrix(self.semigroup().star_mul(l, k))
    }
}

/// Positivity of `Σ ⟨η^l | λ_block(x_l⋆x_k) η^k⟩` on `{η : Σ_k i(x_k) η^k_D = 0}`.
///
/// The degenerate form `Σ ⟨η^l_D | i(x_l⋆x_k) η^k_D⟩` is `‖Σ_k i(x_k) η^k_D‖²`
/// for a ⋆-representation, so its kernel is a null space.
pub fn conditional_pd<F: GermFamily + ?Sized>(family: &F, tol: Tolerance) -> Result<PdVerdict, GermError> {
    let m = family.len();
    let d = family.space_dim();
    let b = d + family.dot_dim();
    let mut gram = CMatrix::zeros(m * b, m * b);
    let mut constraint = CMatrix::zeros(d, m * b);
    for k in 0..m {
        for l in 0..m {
            gram.set_block(l * b, k * b, &family.block(l, k));
        }
        constraint.set_block(0, k * b, &family.rep(k));
    }
    let n = nullspace_basis(&constraint, tol)?;
    let form = n.adjoint_mul(&(&gram * &n));
    let report = psd_check(&form, tol)?;
    Ok(PdVerdict::from_report(report, form.rows()))
}

/// The scalar germ of the vacuum exponential over `1 + 𝔞`, on a finite list
/// of elements `1 + a_k`: `i = 1` and
///
/// ```text
///   λ_block(1 + a) = [ l(a)   k*(a)    ]
///                    [ k(a)   I + j(a) ]
/// ```
///
/// with `(l, k, k*, j)` the GNS quadruple of `a`.
#[derive(Debug, Clone)]
pub struct ItoSemigroupGerm {
    alg: ItoAlgebra,
    gns: GnsRepresentation,
    elements: Vec<Vec<C64>>,
}

impl ItoSemigroupGerm {
    pub fn new(alg: ItoAlgebra, elements: Vec<Vec<C64>>) -> Result<Self, ItoError> {
        if let Some(bad) = elements.iter().find(|a| a.len() != alg.dim()) {
            return Err(ItoError::DimensionMismatch { expected: alg.dim(), found: bad.len() });
        }
        let gns = gns_quadruple(&alg)?;
        Ok(Self { alg, gns, elements })
    }

    pub fn noise_dim(&self) -> usize {
        self.gns.dim_k
    }

    pub fn elements(&self) -> &[Vec<C64>] {
        &self.elements
    }

    /// Block matrix of `1 + a` for an arbitrary algebra vector `a`.
    pub fn block_of(&self, a: &[C64]) -> Result<CMatrix, ItoError> {
        let q = self.gns.quadruple(a)?;
        let dk = q.dim_k();
        let mut out = CMatrix::zeros(1 + dk, 1 + dk);
        out[(0, 0)] = q.l;
        for r in 0..dk {
            out[(0, 1 + r)] = q.kstar[r];
            out[(1 + r, 0)] = q.k[r];
            for c in 0..dk {
                out[(1 + r, 1 + c)] = q.j[(r, c)];
            }
            out[(1 + r, 1 + r)] += ONE;
        }
        Ok(out)
    }

    /// Sandwich form at `(1 + a_l)⋆(1 + a_k)`.
    pub fn sandwich(&self, b_vec: &[C64], l: usize, k: usize, a_vec: &[C64]) -> Result<CMatrix, GermError> {
        sandwich_block(&self.block(l, k), 1, self.noise_dim(), b_vec, a_vec)
    }
}

impl GermFamily for ItoSemigroupGerm {
    fn len(&self) -> usize {
        self.elements.len()
    }

    fn space_dim(&self) -> usize {
        1
    }

    fn dot_dim(&self) -> usize {
        self.gns.dim_k
    }

    fn rep(&self, _k: usize) -> CMatrix {
        CMatrix::identity(1)
    }

    fn block(&self, l: usize, k: usize) -> CMatrix {
        let z = self.alg.star_product(&self.elements[l], &self.elements[k]).expect("element lengths were validated");
        self.block_of(&z).expect("star product stays in the algebra")
    }
}
