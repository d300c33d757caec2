//! Random instances for tests and the acceptance corpus.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::germ::{
    conditional_pd, cyclic_character, symmetric3_irrep, GermError, GermGenerator, GermMap, Representation, StarSemigroup,
};
use crate::ito_algebra::{CanonicalKind, ItoAlgebra, ItoError};
use crate::numkit::{hermitian_eigen, psd_check, vec_norm, CMatrix, Tolerance, C64};
use crate::prelude::*;

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, sigma: f64) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * (sigma / 2f64.sqrt())
    })
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize, sigma: f64) -> CMatrix {
    random_complex(rng, n, n, sigma).hermitian_part()
}

/// Haar-distributed unitary from Gram–Schmidt on a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    loop {
        let g = random_complex(rng, n, n, 1.0);
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
        let mut ok = true;
        for c in 0..n {
            let mut v = g.column(c);
            for q in &cols {
                let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
            let norm = vec_norm(&v);
            if norm < 1e-8 {
                ok = false;
                break;
            }
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
        if ok {
            return CMatrix::from_columns(n, &cols);
        }
    }
}

/// The groups of the germ corpus, all with `x⋆ = x⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmallGroup {
    Z2,
    Z3,
    Z4,
    S3,
}

impl SmallGroup {
    pub const ALL: [SmallGroup; 4] = [Self::Z2, Self::Z3, Self::Z4, Self::S3];

    pub fn semigroup(self) -> StarSemigroup {
        match self {
            Self::Z2 => StarSemigroup::cyclic(2),
            Self::Z3 => StarSemigroup::cyclic(3),
            Self::Z4 => StarSemigroup::cyclic(4),
            Self::S3 => StarSemigroup::symmetric3(),
        }
    }

    /// A random direct sum of irreducibles of total dimension `dim`,
    /// conjugated by a random unitary.
    pub fn random_rep<R: Rng + ?Sized>(self, rng: &mut R, dim: usize) -> Representation {
        let mut parts: Vec<Representation> = Vec::new();
        let mut remaining = dim;
        while remaining > 0 {
            let irrep = match self {
                Self::Z2 | Self::Z3 | Self::Z4 => {
                    let n = self.semigroup().len();
                    cyclic_character(n, rng.random_range(0..n))
                }
                Self::S3 => symmetric3_irrep(rng.random_range(0..if remaining >= 2 { 3 } else { 2 })),
            };
            remaining -= irrep.dim();
            parts.push(irrep);
        }
        let sum = match parts.split_first() {
            Some((first, rest)) => rest.iter().fold(first.clone(), |acc, p| acc.direct_sum(p)),
            None => Representation::trivial(&self.semigroup(), 0),
        };
        sum.conjugated(&random_unitary(rng, dim))
    }
}

/// Group average `(1/|G|) Σ i(g) M i(g)†`, which commutes with every `i(h)`.
pub fn twirl(rep: &Representation, m: &CMatrix) -> CMatrix {
    let n = rep.len() as f64;
    rep.images()
        .iter()
        .fold(CMatrix::zeros(m.rows(), m.cols()), |acc, g| &acc + &(&(g * m) * &g.adjoint()))
        .scale_real(1.0 / n)
}

/// Random generator inputs over `group` with `dim D = d`, `dim D° = r` and `dK` noise.
pub fn random_generator<R: Rng + ?Sized>(rng: &mut R, group: SmallGroup, d: usize, r: usize, noise_dim: usize) -> GermGenerator {
    let i = group.random_rep(rng, d);
    let j = group.random_rep(rng, r);
    let raw = random_hermitian(rng, d, 1.0);
    let c = twirl(&i, &raw).hermitian_part();
    GermGenerator {
        sg: group.semigroup(),
        t: random_complex(rng, r, d, 1.0),
        h: random_hermitian(rng, d, 1.0),
        lso: random_complex(rng, r, noise_dim * d, 1.0),
        lplus: random_complex(rng, noise_dim * d, d, 1.0),
        c,
        i,
        j,
    }
}

/// Shifts the lowest eigenvalue of `λ^•_•(1)` to `−10³ × threshold`, where
/// the threshold is the larger of the two positivity tests' thresholds on
/// the unperturbed germ.
///
/// The pure `D^•` vector at the unit then witnesses the violation in both
/// the conditional form and the dissipator.
pub fn invalidate(germ: &GermMap, tol: Tolerance) -> Result<GermMap, GermError> {
    let cpd = conditional_pd(germ, tol)?;
    let diss = psd_check(&germ.dissipator().matrix, tol)?;
    let target = -1e3 * cpd.report.threshold.max(diss.threshold);
    let mut out = germ.clone();
    let u = out.semigroup().unit();
    let block = &mut out.lam_dot_mut()[u];
    if block.rows() == 0 {
        return Err(GermError::Malformed { field: "lam_dot", element: Some(u), reason: "no noise dimension to perturb".into() });
    }
    let e = hermitian_eigen(&block.hermitian_part());
    let n = block.rows();
    let low = *e.values.last().expect("non-empty block");
    let v = e.vectors.column(n - 1);
    let shift = CMatrix::from_fn(n, n, |a, b| v[a] * v[b].conj() * (low - target));
    *block = (&*block - &shift).hermitian_part();
    Ok(out)
}

/// Random direct sum of one to three canonical algebras with scales in
/// `[0.5, 2]`, presented in a random basis of condition number at most 4.
pub fn random_algebra<R: Rng + ?Sized>(rng: &mut R) -> Result<ItoAlgebra, ItoError> {
    let parts = rng.random_range(1..=3);
    let mut alg: Option<ItoAlgebra> = None;
    for _ in 0..parts {
        let kind = CanonicalKind::ALL[rng.random_range(0..3)];
        let next = ItoAlgebra::canonical(kind, rng.random_range(0.5..2.0))?;
        alg = Some(match alg {
            None => next,
            Some(a) => a.direct_sum(&next)?,
        });
    }
    let alg = alg.expect("at least one component");
    let n = alg.dim();
    let sing: Vec<C64> = (0..n).map(|_| C64::new(rng.random_range(0.5..2.0), 0.0)).collect();
    let p = &(&random_unitary(rng, n) * &CMatrix::diag(&sing)) * &random_unitary(rng, n);
    alg.change_basis(&p)
}

/// Random vector with complex Gaussian entries.
pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, n: usize, sigma: f64) -> Vec<C64> {
    random_complex(rng, n, 1, sigma).into_vec()
}
