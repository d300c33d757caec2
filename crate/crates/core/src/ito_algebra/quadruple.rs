use crate::numkit::{CMatrix, C64, ZERO};
use crate::prelude::*;

use super::ItoError;

/// GNS image `(l, k, k*, j)` of an algebra element.
///
/// Realized as the strictly upper-triangular block matrix on the index order
/// `(−, •, +)`:
///
/// ```text
///        −    •      +
///   − [  0   k*     l ]
///   • [  0   j      k ]
///   + [  0   0      0 ]
/// ```
///
/// so that the Itô product is the matrix product and the ♭-involution is the
/// adjoint conjugated by the `− ↔ +` flip.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadruple {
    pub l: C64,
    pub k: Vec<C64>,
    pub kstar: Vec<C64>,
    pub j: CMatrix,
}

impl Quadruple {
    pub fn zero(dim_k: usize) -> Self {
        Self { l: ZERO, k: vec![ZERO; dim_k], kstar: vec![ZERO; dim_k], j: CMatrix::zeros(dim_k, dim_k) }
    }

    pub fn dim_k(&self) -> usize {
        self.k.len()
    }

    pub fn to_triangular(&self) -> CMatrix {
        let dk = self.dim_k();
        let plus = dk + 1;
        let mut t = CMatrix::zeros(dk + 2, dk + 2);
        t[(0, plus)] = self.l;
        for a in 0..dk {
            t[(0, 1 + a)] = self.kstar[a];
            t[(1 + a, plus)] = self.k[a];
            for b in 0..dk {
                t[(1 + a, 1 + b)] = self.j[(a, b)];
            }
        }
        t
    }

    /// Reads the four blocks back; entries outside the triangular pattern are ignored.
    pub fn from_triangular(t: &CMatrix) -> Self {
        assert!(t.is_square() && t.rows() >= 2, "triangular realization must be square of size >= 2");
        let dk = t.rows() - 2;
        let plus = dk + 1;
        Self {
            l: t[(0, plus)],
            k: (0..dk).map(|a| t[(1 + a, plus)]).collect(),
            kstar: (0..dk).map(|a| t[(0, 1 + a)]).collect(),
            j: t.block(1, 1, dk, dk),
        }
    }

    /// Itô product: the triangular product `T(x)·T(y)`.
    pub fn mul(&self, other: &Self) -> Result<Self, ItoError> {
        if self.dim_k() != other.dim_k() {
            return Err(ItoError::DimensionMismatch { expected: self.dim_k(), found: other.dim_k() });
        }
        Ok(Self::from_triangular(&(&self.to_triangular() * &other.to_triangular())))
    }

    /// ♭-involution `F·T†·F`, with `F` the `− ↔ +` flip.
    pub fn flat(&self) -> Self {
        Self {
            l: self.l.conj(),
            k: self.kstar.iter().map(|z| z.conj()).collect(),
            kstar: self.k.iter().map(|z| z.conj()).collect(),
            j: self.j.adjoint(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            l: self.l + other.l,
            k: self.k.iter().zip(&other.k).map(|(a, b)| a + b).collect(),
            kstar: self.kstar.iter().zip(&other.kstar).map(|(a, b)| a + b).collect(),
            j: &self.j + &other.j,
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            l: self.l * s,
            k: self.k.iter().map(|z| z * s).collect(),
            kstar: self.kstar.iter().map(|z| z * s).collect(),
            j: self.j.scale(s),
        }
    }

    /// Frobenius distance of the triangular realizations.
    pub fn distance(&self, other: &Self) -> f64 {
        self.to_triangular().distance(&other.to_triangular())
    }
}
