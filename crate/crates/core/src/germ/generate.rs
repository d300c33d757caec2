use alloc::format;

use crate::check::{Check, Worst};
use crate::numkit::{CMatrix, Tolerance, I};
use crate::prelude::*;

use super::{GermError, GermMap, Representation, StarSemigroup};

/// Ingredients of a germ that is conditionally positive by construction.
///
/// With `i` on `D` (dim `d`) and an auxiliary representation `j` on `D°`
/// (dim `r`):
///
/// ```text
///   k(x)     = T i(x) − j(x) T
///   l(x)     = T†j(x)T − T†T i(x) + ι(H i(x) − i(x) H)
///   D        = T†T + C
///   λ(x)     = l(x) + D i(x)
///   λ^•(x)   = Lso† k(x) + Lplus i(x)
///   λ_•(x)   = λ^•(x⋆)†
///   λ^•_•(x) = Lso† j(x) Lso
/// ```
///
/// where `ι` is the imaginary unit, `C` is Hermitian and commutes with
/// every `i(x)`, and `H` is Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct GermGenerator {
    pub sg: StarSemigroup,
    pub i: Representation,
    pub j: Representation,
    /// `r × d`.
    pub t: CMatrix,
    /// `d × d`.
    pub c: CMatrix,
    /// `d × d`.
    pub h: CMatrix,
    /// `r × dK·d`, the map `L^∘_•`.
    pub lso: CMatrix,
    /// `dK·d × d`, the map `L^•₊`.
    pub lplus: CMatrix,
}

/// A generated germ together with the data it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedGerm {
    pub germ: GermMap,
    pub k_images: Vec<CMatrix>,
    pub l_images: Vec<CMatrix>,
    pub d_const: CMatrix,
    /// Derivation, coboundary and adjoint-form identities, all passing.
    pub checks: Vec<Check>,
}

impl GermGenerator {
    /// All maps zero: `T = C = H = Lso = Lplus = 0`.
    pub fn zero(sg: StarSemigroup, i: Representation, j: Representation, noise_dim: usize) -> Self {
        let d = i.dim();
        let r = j.dim();
        let nd = noise_dim * d;
        Self {
            sg,
            i,
            j,
            t: CMatrix::zeros(r, d),
            c: CMatrix::zeros(d, d),
            h: CMatrix::zeros(d, d),
            lso: CMatrix::zeros(r, nd),
            lplus: CMatrix::zeros(nd, d),
        }
    }

    fn check_shapes(&self) -> Result<usize, GermError> {
        let d = self.i.dim();
        let r = self.j.dim();
        if d == 0 {
            return Err(GermError::Malformed { field: "rep", element: None, reason: "space dimension is 0".into() });
        }
        if !self.lso.cols().is_multiple_of(d) {
            return Err(GermError::Malformed {
                field: "lso",
                element: None,
                reason: format!("{} columns is not a multiple of d = {d}", self.lso.cols()),
            });
        }
        let nd = self.lso.cols();
        let shapes: [(&'static str, &CMatrix, (usize, usize)); 5] = [
            ("t", &self.t, (r, d)),
            ("c", &self.c, (d, d)),
            ("h", &self.h, (d, d)),
            ("lso", &self.lso, (r, nd)),
            ("lplus", &self.lplus, (nd, d)),
        ];
        for (field, m, shape) in shapes {
            if m.shape() != shape {
                return Err(GermError::Malformed {
                    field,
                    element: None,
                    reason: format!("is {}x{}, expected {}x{}", m.rows(), m.cols(), shape.0, shape.1),
                });
            }
        }
        Ok(nd / d)
    }

    fn scale(&self) -> f64 {
        [&self.t, &self.c, &self.h, &self.lso, &self.lplus]
            .into_iter()
            .chain(self.i.images())
            .chain(self.j.images())
            .map(|m| m.max_abs())
            .fold(1.0, f64::max)
    }

    pub fn generate(&self, tol: Tolerance) -> Result<GeneratedGerm, GermError> {
        let noise_dim = self.check_shapes()?;
        let sg = &self.sg;
        let m = sg.len();
        let d = self.i.dim();
        let s = self.scale();
        let dims = (d + self.j.dim() + self.lso.cols()) as f64;
        let thr = tol.threshold(s * s * s * s * dims * dims);
        for rep in [&self.i, &self.j] {
            if let Some(bad) = rep.verify(sg, tol)?.into_iter().find(|c| !c.pass) {
                return Err(GermError::GeneratorDefect { check: bad.name, defect: bad.defect, threshold: bad.threshold });
            }
        }
        for (field, herm) in [("c", &self.c), ("h", &self.h)] {
            let defect = herm.distance(&herm.adjoint());
            if defect > tol.threshold(s) {
                return Err(GermError::Malformed { field, element: None, reason: format!("not Hermitian (defect {defect:e})") });
            }
        }
        let gauge = (0..m).map(|x| (&self.c * self.i.image(x)).distance(&(self.i.image(x) * &self.c))).fold(0.0, f64::max);
        if gauge > tol.threshold(s * s * d as f64) {
            return Err(GermError::NonCommutingGauge { defect: gauge, threshold: tol.threshold(s * s * d as f64) });
        }

        let i = |x: usize| self.i.image(x);
        let j = |x: usize| self.j.image(x);
        let t = &self.t;
        let tt = t.adjoint_mul(t);
        let d_const = &tt + &self.c;
        let lso_adj = self.lso.adjoint();

        let k_images: Vec<CMatrix> = (0..m).map(|x| &(t * i(x)) - &(j(x) * t)).collect();
        let l_images: Vec<CMatrix> = (0..m)
            .map(|x| {
                let comm = &(&self.h * i(x)) - &(i(x) * &self.h);
                &(&t.adjoint_mul(&(j(x) * t)) - &(&tt * i(x))) + &comm.scale(I)
            })
            .collect();
        let lam: Vec<CMatrix> = (0..m).map(|x| &l_images[x] + &(&d_const * i(x))).collect();
        let lam_out: Vec<CMatrix> = (0..m).map(|x| &(&lso_adj * &k_images[x]) + &(&self.lplus * i(x))).collect();
        let lam_in: Vec<CMatrix> = (0..m).map(|x| lam_out[sg.star(x)].adjoint()).collect();
        let lam_dot: Vec<CMatrix> = (0..m).map(|x| &(&lso_adj * j(x)) * &self.lso).collect();

        let mut derivation = Worst::default();
        let mut coboundary = Worst::default();
        let mut adjoint_form = Worst::default();
        for y in 0..m {
            let ys = sg.star(y);
            // λ(y) = l*(y) + i(y) D with l*(y) = l(y⋆)†
            adjoint_form.update(lam[y].distance(&(&l_images[ys].adjoint() + &(i(y) * &d_const))), (y, y));
            for x in 0..m {
                let yx = sg.star_mul(y, x);
                let dk = &(&k_images[yx] - &j(y).adjoint_mul(&k_images[x])) - &(&k_images[ys] * i(x));
                derivation.update(dk.frobenius_norm(), (y, x));
                let dl = &(&(&l_images[yx] - &i(y).adjoint_mul(&l_images[x])) - &(&l_images[ys] * i(x)))
                    - &k_images[y].adjoint_mul(&k_images[x]);
                coboundary.update(dl.frobenius_norm(), (y, x));
            }
        }
        let checks = vec![
            derivation.check("derivation", thr),
            coboundary.check("coboundary", thr),
            adjoint_form.check("adjoint-form", thr),
        ];
        if let Some(bad) = checks.iter().find(|c| !c.pass) {
            return Err(GermError::GeneratorDefect { check: bad.name, defect: bad.defect, threshold: bad.threshold });
        }
        let germ = GermMap::new(sg.clone(), self.i.clone(), noise_dim, lam, lam_out, lam_in, lam_dot)?;
        Ok(GeneratedGerm { germ, k_images, l_images, d_const, checks })
    }
}
