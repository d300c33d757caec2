//! Germ matrices over finite ⋆-semigroups.
//!
//! A germ carries four blocks per element `x`, acting on `D ⊕ D^•` with
//! `D^• = 𝒦⊗D` (index `κ·d + δ`):
//!
//! ```text
//!   λ_block(x) = [ λ(x)    λ_•(x)  ]     λ = lam,      λ_• = lam_in
//!                [ λ^•(x)  λ^•_•(x) ]    λ^• = lam_out, λ^•_• = lam_dot
//! ```

mod family;
mod generate;
mod semigroup;

pub use family::{conditional_pd, GermFamily, ItoSemigroupGerm};
pub use generate::{GeneratedGerm, GermGenerator};
pub use semigroup::{cyclic_character, symmetric3_irrep, Representation, StarSemigroup};

use alloc::format;
use alloc::string::String;

use thiserror::Error;

use crate::check::{Check, Worst};
use crate::numkit::{psd_check, CMatrix, NumError, PsdReport, Tolerance, C64};
use crate::prelude::*;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GermError {
    #[error("malformed `{field}`{}: {reason}", element.map(|e| format!(" at element {e}")).unwrap_or_default())]
    Malformed { field: &'static str, element: Option<usize>, reason: String },
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch { context: &'static str, expected: usize, found: usize },
    #[error("gauge C does not commute with the representation: defect {defect:e} exceeds {threshold:e}")]
    NonCommutingGauge { defect: f64, threshold: f64 },
    #[error("generated germ fails `{check}`: defect {defect:e} exceeds {threshold:e}")]
    GeneratorDefect { check: &'static str, defect: f64, threshold: f64 },
    #[error(transparent)]
    Num(#[from] NumError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GermMap {
    sg: StarSemigroup,
    rep: Representation,
    noise_dim: usize,
    lam: Vec<CMatrix>,
    lam_out: Vec<CMatrix>,
    lam_in: Vec<CMatrix>,
    lam_dot: Vec<CMatrix>,
}

/// PSD verdict with the near-zero band flagged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdVerdict {
    pub positive: bool,
    /// `|λ_min| ≤ 10 × threshold`: the verdict is within rounding of flipping.
    pub indeterminate: bool,
    /// Dimension of the form that was tested.
    pub dim: usize,
    pub report: PsdReport,
}

impl PdVerdict {
    pub(crate) fn from_report(report: PsdReport, dim: usize) -> Self {
        Self {
            positive: report.psd,
            indeterminate: report.min_eigenvalue.abs() <= 10.0 * report.threshold,
            dim,
            report,
        }
    }
}

/// Both positivity criteria side by side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equivalence {
    pub conditional: PdVerdict,
    pub dissipator: PdVerdict,
}

impl Equivalence {
    /// Both minimum eigenvalues lie outside the indeterminate band.
    pub fn decidable(&self) -> bool {
        !self.conditional.indeterminate && !self.dissipator.indeterminate
    }

    pub fn agree(&self) -> bool {
        self.conditional.positive == self.dissipator.positive
    }
}

/// Hermitian kernel `Δ(y, x)` assembled over all element pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct DissipatorGram {
    /// Row/column `(x, ·)` starts at `x * block_dim`; inside a block `D` comes first.
    pub matrix: CMatrix,
    pub elements: usize,
    pub block_dim: usize,
}

impl DissipatorGram {
    pub fn block(&self, y: usize, x: usize) -> CMatrix {
        let b = self.block_dim;
        self.matrix.block(y * b, x * b, b, b)
    }
}

impl GermMap {
    /// Shape-checks every block; symmetry is left to [`GermMap::check_symmetry`].
    pub fn new(
        sg: StarSemigroup,
        rep: Representation,
        noise_dim: usize,
        lam: Vec<CMatrix>,
        lam_out: Vec<CMatrix>,
        lam_in: Vec<CMatrix>,
        lam_dot: Vec<CMatrix>,
    ) -> Result<Self, GermError> {
        let m = sg.len();
        let d = rep.dim();
        let nd = noise_dim * d;
        if rep.len() != m {
            return Err(GermError::Malformed { field: "rep", element: None, reason: format!("{} images for {m} elements", rep.len()) });
        }
        let fields: [(&'static str, &[CMatrix], (usize, usize)); 4] =
            [("lam", &lam, (d, d)), ("lam_out", &lam_out, (nd, d)), ("lam_in", &lam_in, (d, nd)), ("lam_dot", &lam_dot, (nd, nd))];
        for (field, mats, shape) in fields {
            if mats.len() != m {
                return Err(GermError::Malformed { field, element: None, reason: format!("{} blocks for {m} elements", mats.len()) });
            }
            for (x, mat) in mats.iter().enumerate() {
                if mat.shape() != shape {
                    return Err(GermError::Malformed {
                        field,
                        element: Some(x),
                        reason: format!("block is {}x{}, expected {}x{}", mat.rows(), mat.cols(), shape.0, shape.1),
                    });
                }
                if !mat.is_finite() {
                    return Err(GermError::Malformed { field, element: Some(x), reason: "non-finite entry".into() });
                }
            }
        }
        Ok(Self { sg, rep, noise_dim, lam, lam_out, lam_in, lam_dot })
    }

    /// `λ = λ^• = λ_• = 0` and `λ^•_• = i⊗1`.
    pub fn zero_alpha(sg: StarSemigroup, rep: Representation, noise_dim: usize) -> Result<Self, GermError> {
        let m = sg.len();
        let d = rep.dim();
        let nd = noise_dim * d;
        let lam_dot = (0..m.min(rep.len())).map(|x| rep.ampliate(x, noise_dim)).collect();
        Self::new(
            sg,
            rep,
            noise_dim,
            vec![CMatrix::zeros(d, d); m],
            vec![CMatrix::zeros(nd, d); m],
            vec![CMatrix::zeros(d, nd); m],
            lam_dot,
        )
    }

    pub fn semigroup(&self) -> &StarSemigroup {
        &self.sg
    }

    pub fn rep(&self) -> &Representation {
        &self.rep
    }

    pub fn space_dim(&self) -> usize {
        self.rep.dim()
    }

    pub fn noise_dim(&self) -> usize {
        self.noise_dim
    }

    /// `dK · d`.
    pub fn dot_dim(&self) -> usize {
        self.noise_dim * self.rep.dim()
    }

    pub fn lam(&self) -> &[CMatrix] {
        &self.lam
    }

    pub fn lam_out(&self) -> &[CMatrix] {
        &self.lam_out
    }

    pub fn lam_in(&self) -> &[CMatrix] {
        &self.lam_in
    }

    pub fn lam_dot(&self) -> &[CMatrix] {
        &self.lam_dot
    }

    pub fn lam_dot_mut(&mut self) -> &mut [CMatrix] {
        &mut self.lam_dot
    }

    /// `D = λ(1)`.
    pub fn d_const(&self) -> &CMatrix {
        &self.lam[self.sg.unit()]
    }

    /// The full `(d + dK·d)`-square block matrix of `x`.
    pub fn block_matrix(&self, x: usize) -> CMatrix {
        let d = self.space_dim();
        let nd = self.dot_dim();
        let mut out = CMatrix::zeros(d + nd, d + nd);
        out.set_block(0, 0, &self.lam[x]);
        out.set_block(0, d, &self.lam_in[x]);
        out.set_block(d, 0, &self.lam_out[x]);
        out.set_block(d, d, &self.lam_dot[x]);
        out
    }

    /// Largest entry over all blocks and the representation, at least 1.
    pub fn scale(&self) -> f64 {
        self.lam
            .iter()
            .chain(&self.lam_out)
            .chain(&self.lam_in)
            .chain(&self.lam_dot)
            .chain(self.rep.images())
            .map(|m| m.max_abs())
            .fold(1.0, f64::max)
    }

    /// ♭-symmetries of the three block families plus Hermiticity of `D`,
    /// preceded by the representation checks on `i`.
    pub fn check_symmetry(&self, tol: Tolerance) -> Result<Vec<Check>, GermError> {
        let mut checks = self.rep.verify(&self.sg, tol)?;
        let thr = tol.threshold(self.scale());
        let mut lam = Worst::default();
        let mut out_in = Worst::default();
        let mut dot = Worst::default();
        for x in 0..self.sg.len() {
            let xs = self.sg.star(x);
            lam.update(self.lam[xs].distance(&self.lam[x].adjoint()), (x, xs));
            out_in.update(self.lam_out[xs].distance(&self.lam_in[x].adjoint()), (x, xs));
            dot.update(self.lam_dot[xs].distance(&self.lam_dot[x].adjoint()), (x, xs));
        }
        let u = self.sg.unit();
        let d = self.d_const();
        checks.push(lam.check("lam-symmetry", thr));
        checks.push(out_in.check("lam_out-lam_in-symmetry", thr));
        checks.push(dot.check("lam_dot-symmetry", thr));
        checks.push(Check::new("D-hermitian", d.distance(&d.adjoint()), thr).at((u, u)));
        Ok(checks)
    }

    /// `Δ(y, x)` of the germ for every pair, with `D = λ(1)`.
    pub fn dissipator(&self) -> DissipatorGram {
        let m = self.sg.len();
        let d = self.space_dim();
        let nd = self.dot_dim();
        let b = d + nd;
        let dc = self.d_const();
        let i = |x: usize| self.rep.image(x);
        // Δ⁻_•(y, x) = λ_•(y⋆x) − i(y)†λ_•(x)
        let minus_dot = |y: usize, x: usize| &self.lam_in[self.sg.star_mul(y, x)] - &i(y).adjoint_mul(&self.lam_in[x]);
        let mut out = CMatrix::zeros(m * b, m * b);
        for y in 0..m {
            let ys = self.sg.star(y);
            for x in 0..m {
                let yx = self.sg.star_mul(y, x);
                let mp = &(&(&self.lam[yx] - &i(y).adjoint_mul(&self.lam[x])) - &(&self.lam[ys] * i(x)))
                    + &i(y).adjoint_mul(&(dc * i(x)));
                out.set_block(y * b, x * b, &mp);
                out.set_block(y * b, x * b + d, &minus_dot(y, x));
                out.set_block(y * b + d, x * b, &minus_dot(x, y).adjoint());
                out.set_block(y * b + d, x * b + d, &self.lam_dot[yx]);
            }
        }
        DissipatorGram { matrix: out, elements: m, block_dim: b }
    }

    /// Positivity of the dissipator kernel.
    pub fn dissipator_pd(&self, tol: Tolerance) -> Result<PdVerdict, GermError> {
        let gram = self.dissipator();
        let report = psd_check(&gram.matrix, tol)?;
        Ok(PdVerdict::from_report(report, gram.matrix.rows()))
    }

    /// Runs both criteria; a decidable disagreement contradicts the theory.
    pub fn equivalence(&self, tol: Tolerance) -> Result<Equivalence, GermError> {
        Ok(Equivalence { conditional: conditional_pd(self, tol)?, dissipator: self.dissipator_pd(tol)? })
    }

    /// `b_•λ^•_•(x)a^• + b_•λ^•(x) + λ_•(x)a^• + λ(x)` with `a^• = a⊗1`, `b_• = b⊗1`.
    ///
    /// `b_vec` is taken as the covector itself; pass conjugated coordinates
    /// to pair with a vector.
    pub fn sandwich(&self, b_vec: &[C64], x: usize, a_vec: &[C64]) -> Result<CMatrix, GermError> {
        if x >= self.sg.len() {
            return Err(GermError::DimensionMismatch { context: "sandwich element", expected: self.sg.len(), found: x });
        }
        sandwich_block(&self.block_matrix(x), self.space_dim(), self.noise_dim, b_vec, a_vec)
    }
}

/// `[I, b⊗1] · block · [I; a⊗1]` for a block on `D ⊕ 𝒦⊗D`.
pub fn sandwich_block(block: &CMatrix, d: usize, noise_dim: usize, b_vec: &[C64], a_vec: &[C64]) -> Result<CMatrix, GermError> {
    for (v, context) in [(b_vec, "sandwich covector"), (a_vec, "sandwich vector")] {
        if v.len() != noise_dim {
            return Err(GermError::DimensionMismatch { context, expected: noise_dim, found: v.len() });
        }
    }
    let eye = CMatrix::identity(d);
    let right = CMatrix::vstack(&[&eye, &CMatrix::column_vector(a_vec).kron(&eye)]);
    let left = CMatrix::hstack(&[&eye, &CMatrix::row_vector(b_vec).kron(&eye)]);
    Ok(&(&left * block) * &right)
}

#[cfg(test)]
mod tests;
