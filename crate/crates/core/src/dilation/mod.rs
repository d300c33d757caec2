//! Minimal dilation of a conditionally positive germ and its pseudo-Hilbert
//! ♭-representation.
//!
//! Factoring the dissipator `Δ = V†V` gives vectors `K(x)w ∈ D° = ℂʳ`, one
//! per element and basis vector `w` of `D ⊕ D^•`, which satisfy
//! `K(x)(η ⊕ η^•) = k(x)η + j(x)L^∘_• η^•`. Everything else is read off or
//! solved for, then checked a posteriori.

mod pseudo;

pub use pseudo::{assemble_pseudo_hilbert, flat_adjoint, metric, metric_inverse, PseudoHilbert, Signature};

use thiserror::Error;

use crate::check::{Check, Worst};
use crate::germ::{GermError, GermMap};
use crate::numkit::{kolmogorov_factor, solve_on_span, CMatrix, NumError, Tolerance};
use crate::prelude::*;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DilationError {
    #[error("dissipator is not positive: eigenvalue {min_eigenvalue:e} below -{threshold:e}")]
    NegativeDissipator { min_eigenvalue: f64, threshold: f64 },
    #[error("`{identity}` residual {residual:e} exceeds {threshold:e}")]
    ResidualTooLarge { identity: &'static str, residual: f64, threshold: f64 },
    #[error("factorization fails at element {element}: residual {residual:e} exceeds {threshold:e}")]
    FactorizationDefect { element: usize, residual: f64, threshold: f64 },
    #[error(transparent)]
    Germ(#[from] GermError),
    #[error(transparent)]
    Num(NumError),
}

impl From<NumError> for DilationError {
    fn from(e: NumError) -> Self {
        match e {
            NumError::NegativeEigenvalue { value, threshold } => Self::NegativeDissipator { min_eigenvalue: value, threshold },
            other => Self::Num(other),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dilation {
    /// `dim D°`, the numerical rank of the dissipator.
    pub r: usize,
    pub j_images: Vec<CMatrix>,
    pub k_images: Vec<CMatrix>,
    pub l_images: Vec<CMatrix>,
    /// `L^∘_•`, `r × dK·d`.
    pub lso: CMatrix,
    /// `L^•₊`, `dK·d × d`.
    pub lplus: CMatrix,
    pub d_const: CMatrix,
    /// `‖V†V − Δ‖_F`.
    pub gram_residual: f64,
    pub residuals: Vec<Check>,
}

impl Dilation {
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(|c| c.pass)
    }

    /// `k*(x) = k(x⋆)†`.
    pub fn kstar(&self, g: &GermMap, x: usize) -> CMatrix {
        self.k_images[g.semigroup().star(x)].adjoint()
    }

    /// The germ these data induce on `g`'s semigroup and representation.
    pub fn reconstruct(&self, g: &GermMap) -> Result<GermMap, GermError> {
        let sg = g.semigroup();
        let m = sg.len();
        let i = |x: usize| g.rep().image(x);
        let lso_adj = self.lso.adjoint();
        let lminus = self.lplus.adjoint();
        let lam = (0..m).map(|x| &self.l_images[x] + &(&self.d_const * i(x))).collect();
        let lam_out = (0..m).map(|x| &(&lso_adj * &self.k_images[x]) + &(&self.lplus * i(x))).collect();
        let lam_in = (0..m).map(|x| &(&self.kstar(g, x) * &self.lso) + &(i(x) * &lminus)).collect();
        let lam_dot = (0..m).map(|x| &(&lso_adj * &self.j_images[x]) * &self.lso).collect();
        GermMap::new(sg.clone(), g.rep().clone(), g.noise_dim(), lam, lam_out, lam_in, lam_dot)
    }

    fn scale(&self) -> f64 {
        self.j_images
            .iter()
            .chain(&self.k_images)
            .chain(&self.l_images)
            .chain([&self.lso, &self.lplus, &self.d_const])
            .map(|m| m.max_abs())
            .fold(1.0, f64::max)
    }
}

/// Builds the minimal dilation of `g` from its dissipator.
pub fn dilate(g: &GermMap, tol: Tolerance) -> Result<Dilation, DilationError> {
    let sg = g.semigroup();
    let m = sg.len();
    let d = g.space_dim();
    let nd = g.dot_dim();
    let b = d + nd;
    let u = sg.unit();
    let gram = g.dissipator();
    let factor = kolmogorov_factor(&gram.matrix, tol)?;
    let v = factor.v;
    let r = factor.rank;
    let big_k = |x: usize| v.block(0, x * b, r, b);

    let k_images: Vec<CMatrix> = (0..m).map(|x| big_k(x).block(0, 0, r, d)).collect();
    let k_unit = k_images[u].frobenius_norm();
    let k_thr = tol.threshold(factor.eigenvalues.first().copied().unwrap_or(0.0).sqrt());
    if k_unit > k_thr {
        return Err(DilationError::ResidualTooLarge { identity: "k(1) = 0", residual: k_unit, threshold: k_thr });
    }
    let lso = big_k(u).block(0, d, r, nd);

    let mut j_images = Vec::with_capacity(m);
    for z in 0..m {
        // column (x, w): K(zx)w − K(z)(i(x)η ⊕ 0)
        let mut targets = CMatrix::zeros(r, m * b);
        for x in 0..m {
            let mut blk = big_k(sg.mul(z, x));
            let shift = &k_images[z] * g.rep().image(x);
            let head = &blk.block(0, 0, r, d) - &shift;
            blk.set_block(0, 0, &head);
            targets.set_block(0, x * b, &blk);
        }
        let j = solve_on_span(&targets, &v, tol).map_err(|e| match e {
            NumError::ResidualTooLarge { residual, threshold } => {
                DilationError::ResidualTooLarge { identity: "j(z)K(x) = K(zx) − K(z)i(x)", residual, threshold }
            }
            other => other.into(),
        })?;
        j_images.push(j);
    }

    let d_const = g.d_const().clone();
    let l_images = (0..m).map(|x| &g.lam()[x] - &(&d_const * g.rep().image(x))).collect();
    let lplus = g.lam_out()[u].clone();
    let mut dl = Dilation {
        r,
        j_images,
        k_images,
        l_images,
        lso,
        lplus,
        d_const,
        gram_residual: factor.residual,
        residuals: Vec::new(),
    };
    let mut checks = vec![Check::new("gram-reconstruction", factor.residual, factor.threshold * (1.0 + (m * b) as f64))];
    checks.extend(verify_structure(&dl, g, tol));
    dl.residuals = checks;
    Ok(dl)
}

/// Representation, derivation and coboundary identities of the dilation data
/// and the four block relations back to `g`, each as its worst pair.
pub fn verify_structure(dl: &Dilation, g: &GermMap, tol: Tolerance) -> Vec<Check> {
    let sg = g.semigroup();
    let m = sg.len();
    let i = |x: usize| g.rep().image(x);
    let s = dl.scale().max(g.scale());
    let dims = (g.space_dim() + g.dot_dim() + dl.r).max(1) as f64;
    let thr = tol.threshold(s * s * s * dims);

    let mut rep = Worst::default();
    let mut derivation = Worst::default();
    let mut coboundary = Worst::default();
    let (mut lam, mut out, mut inn, mut dot) = (Worst::default(), Worst::default(), Worst::default(), Worst::default());
    let lso_adj = dl.lso.adjoint();
    let lminus = dl.lplus.adjoint();
    for y in 0..m {
        let ys = sg.star(y);
        let l = &(&dl.l_images[y] + &(&dl.d_const * i(y))) - &g.lam()[y];
        lam.update(l.frobenius_norm(), (y, y));
        let o = &(&(&lso_adj * &dl.k_images[y]) + &(&dl.lplus * i(y))) - &g.lam_out()[y];
        out.update(o.frobenius_norm(), (y, y));
        let n = &(&(&dl.kstar(g, y) * &dl.lso) + &(i(y) * &lminus)) - &g.lam_in()[y];
        inn.update(n.frobenius_norm(), (y, y));
        dot.update((&(&lso_adj * &dl.j_images[y]) * &dl.lso).distance(&g.lam_dot()[y]), (y, y));
        for x in 0..m {
            let yx = sg.star_mul(y, x);
            rep.update(dl.j_images[yx].distance(&dl.j_images[y].adjoint_mul(&dl.j_images[x])), (y, x));
            let dk = &(&dl.k_images[yx] - &dl.j_images[y].adjoint_mul(&dl.k_images[x])) - &(&dl.k_images[ys] * i(x));
            derivation.update(dk.frobenius_norm(), (y, x));
            let dl_ = &(&(&dl.l_images[yx] - &i(y).adjoint_mul(&dl.l_images[x])) - &(&dl.l_images[ys] * i(x)))
                - &dl.k_images[y].adjoint_mul(&dl.k_images[x]);
            coboundary.update(dl_.frobenius_norm(), (y, x));
        }
    }
    let u = sg.unit();
    vec![
        rep.check("representation", thr),
        Check::new("unital", dl.j_images[u].distance(&CMatrix::identity(dl.r)), thr).at((u, u)),
        derivation.check("derivation", thr),
        coboundary.check("coboundary", thr),
        lam.check("lam-block", thr),
        out.check("lam_out-block", thr),
        inn.check("lam_in-block", thr),
        dot.check("lam_dot-block", thr),
    ]
}
