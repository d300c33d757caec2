use crate::check::{Check, Worst};
use crate::germ::GermMap;
use crate::numkit::{hermitian_eigen, CMatrix, Tolerance};
use crate::prelude::*;

use super::{Dilation, DilationError};

/// Inertia of the metric: counts of negative, zero and positive eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

/// `ℰ = D′ ⊕ D° ⊕ D` (blocks `−, ∘, +`) with its indefinite metric.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoHilbert {
    pub d: usize,
    pub r: usize,
    pub g: CMatrix,
    pub g_inv: CMatrix,
    /// `ȷ(x)`, one `(2d + r)`-square matrix per element.
    pub jmath_images: Vec<CMatrix>,
    /// `(2d + r) × (d + dK·d)`.
    pub l: CMatrix,
    pub signature: Signature,
    /// Metric inverse, unitality, ♭-representation and factorization.
    pub checks: Vec<Check>,
}

impl PseudoHilbert {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// `M♭ = G⁻¹M†G`.
    pub fn flat(&self, m: &CMatrix) -> CMatrix {
        flat_adjoint(&self.g, &self.g_inv, m)
    }

    /// `L♭ȷ(x)L`, which should reproduce the germ's block matrix.
    pub fn factorized(&self, x: usize) -> CMatrix {
        let l_flat = self.l.adjoint_mul(&self.g);
        &(&l_flat * &self.jmath_images[x]) * &self.l
    }
}

/// `G = [[0, 0, I], [0, I, 0], [I, 0, D]]`.
pub fn metric(d_const: &CMatrix, r: usize) -> CMatrix {
    let d = d_const.rows();
    let eye = CMatrix::identity(d);
    let mut g = CMatrix::zeros(2 * d + r, 2 * d + r);
    g.set_block(0, d + r, &eye);
    g.set_block(d, d, &CMatrix::identity(r));
    g.set_block(d + r, 0, &eye);
    g.set_block(d + r, d + r, d_const);
    g
}

/// `G⁻¹ = [[−D, 0, I], [0, I, 0], [I, 0, 0]]`.
pub fn metric_inverse(d_const: &CMatrix, r: usize) -> CMatrix {
    let d = d_const.rows();
    let eye = CMatrix::identity(d);
    let mut g = CMatrix::zeros(2 * d + r, 2 * d + r);
    g.set_block(0, 0, &-d_const);
    g.set_block(0, d + r, &eye);
    g.set_block(d, d, &CMatrix::identity(r));
    g.set_block(d + r, 0, &eye);
    g
}

pub fn flat_adjoint(g: &CMatrix, g_inv: &CMatrix, m: &CMatrix) -> CMatrix {
    &(g_inv * &m.adjoint()) * g
}

fn jmath(dl: &Dilation, g: &GermMap, x: usize) -> CMatrix {
    let d = g.space_dim();
    let r = dl.r;
    let ix = g.rep().image(x);
    let mut out = CMatrix::zeros(2 * d + r, 2 * d + r);
    out.set_block(0, 0, ix);
    out.set_block(0, d, &dl.kstar(g, x));
    out.set_block(0, d + r, &dl.l_images[x]);
    out.set_block(d, d, &dl.j_images[x]);
    out.set_block(d, d + r, &dl.k_images[x]);
    out.set_block(d + r, d + r, ix);
    out
}

/// Builds `G`, `ȷ` and `L` from verified dilation data and checks the
/// ♭-representation property and `λ_block(x) = L♭ȷ(x)L` for every `x`.
pub fn assemble_pseudo_hilbert(dl: &Dilation, g: &GermMap, tol: Tolerance) -> Result<PseudoHilbert, DilationError> {
    let sg = g.semigroup();
    let m = sg.len();
    let d = g.space_dim();
    let nd = g.dot_dim();
    let r = dl.r;
    let metric_g = metric(&dl.d_const, r);
    let g_inv = metric_inverse(&dl.d_const, r);

    // L = [[0, L⁻_•], [0, L^∘_•], [I, 0]] with L⁻_• = (L^•₊)†
    let mut l = CMatrix::zeros(2 * d + r, d + nd);
    l.set_block(0, d, &dl.lplus.adjoint());
    l.set_block(d, d, &dl.lso);
    l.set_block(d + r, 0, &CMatrix::identity(d));

    let jm: Vec<CMatrix> = (0..m).map(|x| jmath(dl, g, x)).collect();
    let scale = jm.iter().chain([&metric_g, &l]).map(|a| a.max_abs()).fold(g.scale(), f64::max);
    let dims = (2 * d + r + nd) as f64;
    let thr = tol.threshold(scale * scale * scale * dims);

    let eye = CMatrix::identity(2 * d + r);
    let inverse = (&metric_g * &g_inv).distance(&eye);
    let u = sg.unit();
    let unital = jm[u].distance(&eye);
    let mut flat_rep = Worst::default();
    for y in 0..m {
        let yf = flat_adjoint(&metric_g, &g_inv, &jm[y]);
        for x in 0..m {
            flat_rep.update(jm[sg.star_mul(y, x)].distance(&(&yf * &jm[x])), (y, x));
        }
    }
    let ph = PseudoHilbert {
        d,
        r,
        signature: signature(&metric_g, tol),
        g: metric_g,
        g_inv,
        jmath_images: jm,
        l,
        checks: Vec::new(),
    };
    let mut factorization = Worst::default();
    for x in 0..m {
        factorization.update(ph.factorized(x).distance(&g.block_matrix(x)), (x, x));
    }
    let fact = factorization.check("factorization", thr);
    if !fact.pass {
        return Err(DilationError::FactorizationDefect {
            element: fact.at.map_or(0, |p| p.0),
            residual: fact.defect,
            threshold: thr,
        });
    }
    let checks = vec![
        Check::new("metric-inverse", inverse, tol.threshold(scale)),
        Check::new("unital", unital, thr).at((u, u)),
        flat_rep.check("flat-representation", thr),
        fact,
    ];
    Ok(PseudoHilbert { checks, ..ph })
}

fn signature(g: &CMatrix, tol: Tolerance) -> Signature {
    let e = hermitian_eigen(g);
    let thr = tol.threshold(e.values.iter().map(|v| v.abs()).fold(0.0, f64::max));
    Signature {
        negative: e.values.iter().filter(|&&v| v < -thr).count(),
        zero: e.values.iter().filter(|&&v| v.abs() <= thr).count(),
        positive: e.values.iter().filter(|&&v| v > thr).count(),
    }
}
