//! Dense complex linear algebra: PSD decisions, Gram factorization, null
//! spaces and residual-checked least squares.

mod eigen;
mod matrix;

pub use eigen::{hermitian_eigen, svd, HermitianEigen, Svd};
pub use matrix::{inner, vec_norm, CMatrix, C64, I, ONE, ZERO};

use thiserror::Error;

use crate::prelude::*;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumError {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch { context: &'static str, expected: usize, found: usize },
    #[error("eigenvalue {value:e} is below -{threshold:e}; input is not a PSD Gram")]
    NegativeEigenvalue { value: f64, threshold: f64 },
    #[error("least-squares residual {residual:e} exceeds {threshold:e}")]
    ResidualTooLarge { residual: f64, threshold: f64 },
    #[error("matrix is singular")]
    Singular,
}

/// Absolute floor plus a scale-relative factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_eps: f64,
    pub rel_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs_eps: 1e-10, rel_eps: 1e-12 }
    }
}

impl Tolerance {
    pub fn new(abs_eps: f64, rel_eps: f64) -> Self {
        assert!(abs_eps >= 0.0 && rel_eps >= 0.0, "tolerances must be nonnegative");
        Self { abs_eps, rel_eps }
    }

    /// Effective threshold for a quantity of magnitude `scale`.
    #[inline]
    pub fn threshold(&self, scale: f64) -> f64 {
        self.abs_eps + self.rel_eps * scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdReport {
    pub psd: bool,
    /// Smallest eigenvalue of the Hermitian part; 0 for an empty matrix.
    pub min_eigenvalue: f64,
    /// Largest absolute eigenvalue, the scale behind `threshold`.
    pub spectral_radius: f64,
    /// Frobenius norm of `(m - m†)/2`.
    pub asymmetry: f64,
    pub threshold: f64,
}

fn check_square_finite(m: &CMatrix) -> Result<(), NumError> {
    if !m.is_square() {
        return Err(NumError::NonSquare { rows: m.rows(), cols: m.cols() });
    }
    if !m.is_finite() {
        return Err(NumError::NonFinite);
    }
    Ok(())
}

/// Decides positive semidefiniteness of the Hermitian part of `m`.
pub fn psd_check(m: &CMatrix, tol: Tolerance) -> Result<PsdReport, NumError> {
    check_square_finite(m)?;
    let herm = m.hermitian_part();
    let asymmetry = (m - &herm).frobenius_norm();
    if m.rows() == 0 {
        return Ok(PsdReport {
            psd: true,
            min_eigenvalue: 0.0,
            spectral_radius: 0.0,
            asymmetry,
            threshold: tol.abs_eps,
        });
    }
    let e = hermitian_eigen(&herm);
    let min_eigenvalue = *e.values.last().unwrap_or(&0.0);
    let spectral_radius = e.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let threshold = tol.threshold(spectral_radius);
    Ok(PsdReport { psd: min_eigenvalue >= -threshold, min_eigenvalue, spectral_radius, asymmetry, threshold })
}

/// Gram factor `v` with `v†v = g` and one row per retained eigenvalue.
#[derive(Debug, Clone)]
pub struct GramFactor {
    pub v: CMatrix,
    pub rank: usize,
    /// Eigenvalues of `g`, descending.
    pub eigenvalues: Vec<f64>,
    pub threshold: f64,
    /// `‖v†v − g‖_F`.
    pub residual: f64,
}

/// Factors a Hermitian PSD Gram matrix through its eigendecomposition.
///
/// Rows of `v` are `√μ · u†` for eigenpairs `(μ, u)` with `μ > threshold`,
/// ordered by descending `μ`. Eigenvalues in `[-threshold, threshold]` are
/// dropped; anything below `-threshold` is rejected.
pub fn kolmogorov_factor(g: &CMatrix, tol: Tolerance) -> Result<GramFactor, NumError> {
    check_square_finite(g)?;
    let n = g.rows();
    let e = hermitian_eigen(g);
    let radius = e.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let threshold = tol.threshold(radius);
    if let Some(&lowest) = e.values.last() {
        if lowest < -threshold {
            return Err(NumError::NegativeEigenvalue { value: lowest, threshold });
        }
    }
    let rank = e.values.iter().take_while(|&&mu| mu > threshold).count();
    let v = CMatrix::from_fn(rank, n, |r, c| e.vectors[(c, r)].conj() * e.values[r].sqrt());
    let residual = v.adjoint_mul(&v).distance(g);
    if residual > threshold * (1.0 + n as f64) {
        // dropped eigenvalues sum below n * threshold; anything larger is numerical failure
        return Err(NumError::ResidualTooLarge { residual, threshold });
    }
    Ok(GramFactor { v, rank, eigenvalues: e.values, threshold, residual })
}

/// Orthonormal basis (as columns) of `{v : c·v = 0}`.
pub fn nullspace_basis(c: &CMatrix, tol: Tolerance) -> Result<CMatrix, NumError> {
    if !c.is_finite() {
        return Err(NumError::NonFinite);
    }
    let n = c.cols();
    if c.rows() == 0 {
        return Ok(CMatrix::identity(n));
    }
    let Svd { s, v, .. } = svd(c);
    let threshold = tol.threshold(s.first().copied().unwrap_or(0.0));
    let keep: Vec<usize> = (0..n).filter(|&j| s[j] <= threshold).collect();
    let mut basis = v.select_columns(&keep);
    eigen::normalize_phases(&mut basis);
    Ok(basis)
}

/// Minimum-norm least-squares `a` with `a · sources ≈ targets`.
///
/// Fails with [`NumError::ResidualTooLarge`] when the best fit misses the
/// targets by more than the threshold scaled to `‖targets‖_F`.
pub fn solve_on_span(targets: &CMatrix, sources: &CMatrix, tol: Tolerance) -> Result<CMatrix, NumError> {
    if targets.cols() != sources.cols() {
        return Err(NumError::DimensionMismatch {
            context: "solve_on_span columns",
            expected: sources.cols(),
            found: targets.cols(),
        });
    }
    if !targets.is_finite() || !sources.is_finite() {
        return Err(NumError::NonFinite);
    }
    // a·S = T  ⇔  S†·a† = T†; SVD of S† = U Σ V† gives a† = U Σ⁺ V† T†
    let st = sources.adjoint();
    let Svd { u, s, v } = svd(&st);
    let cut = tol.threshold(s.first().copied().unwrap_or(0.0));
    let mut a_adj = CMatrix::zeros(sources.rows(), targets.rows());
    let tt = targets.adjoint();
    for (j, &sj) in s.iter().enumerate() {
        if sj <= cut {
            break;
        }
        // column j of U has unit norm; contribute v_j (u_j† T†) / s_j
        let uj = u.column(j);
        let coeff: Vec<C64> = (0..tt.cols()).map(|c| inner(&uj, &tt.column(c)) / sj).collect();
        for r in 0..a_adj.rows() {
            let vr = v[(r, j)];
            for (c, k) in coeff.iter().enumerate() {
                a_adj[(r, c)] += vr * k;
            }
        }
    }
    let a = a_adj.adjoint();
    let residual = (&a * sources).distance(targets);
    let threshold = tol.threshold(targets.frobenius_norm());
    if residual > threshold {
        return Err(NumError::ResidualTooLarge { residual, threshold });
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn psd_identity_and_swap() {
        let r = psd_check(&CMatrix::identity(2), Tolerance::default()).unwrap();
        assert!(r.psd);
        assert!((r.min_eigenvalue - 1.0).abs() < 1e-15);
        let swap = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let r = psd_check(&swap, Tolerance::default()).unwrap();
        assert!(!r.psd);
        assert!((r.min_eigenvalue + 1.0).abs() < 1e-15);
    }

    #[test]
    fn psd_errors() {
        let tol = Tolerance::default();
        assert_eq!(psd_check(&CMatrix::zeros(2, 3), tol).unwrap_err(), NumError::NonSquare { rows: 2, cols: 3 });
    }

    #[test]
    fn psd_records_asymmetry() {
        let m = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let r = psd_check(&m, Tolerance::default()).unwrap();
        assert!((r.asymmetry - (0.5f64).sqrt()).abs() < 1e-15);
        assert!(r.psd);
    }

    #[test]
    fn factor_rank_one() {
        let g = CMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let f = kolmogorov_factor(&g, Tolerance::default()).unwrap();
        assert_eq!(f.rank, 1);
        assert!((f.v[(0, 0)] - re(1.0)).norm() < 1e-14);
        assert!((f.v[(0, 1)] - re(1.0)).norm() < 1e-14);
        assert!((f.eigenvalues[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn factor_zero_and_indefinite() {
        let f = kolmogorov_factor(&CMatrix::zeros(3, 3), Tolerance::default()).unwrap();
        assert_eq!(f.rank, 0);
        assert_eq!(f.v.shape(), (0, 3));
        let bad = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        assert!(matches!(
            kolmogorov_factor(&bad, Tolerance::default()),
            Err(NumError::NegativeEigenvalue { .. })
        ));
    }

    #[test]
    fn factor_clamps_tiny_negative() {
        let g = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1e-13]]);
        let f = kolmogorov_factor(&g, Tolerance::default()).unwrap();
        assert_eq!(f.rank, 1);
    }

    #[test]
    fn nullspace_examples() {
        let tol = Tolerance::default();
        let n = nullspace_basis(&CMatrix::from_real_rows(&[&[1.0, 1.0]]), tol).unwrap();
        assert_eq!(n.cols(), 1);
        let h = 0.5f64.sqrt();
        assert!((n[(0, 0)] - re(h)).norm() < 1e-14);
        assert!((n[(1, 0)] - re(-h)).norm() < 1e-14);
        assert_eq!(nullspace_basis(&CMatrix::identity(3), tol).unwrap().cols(), 0);
    }

    #[test]
    fn solve_identity_sources() {
        let t = CMatrix::from_rows(&[&[re(1.0), C64::new(0.0, 2.0)], &[re(3.0), re(-1.0)]]);
        let a = solve_on_span(&t, &CMatrix::identity(2), Tolerance::default()).unwrap();
        assert!(a.distance(&t) < 1e-14);
    }

    #[test]
    fn solve_inconsistent_fails() {
        // both source columns equal, targets differ
        let s = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let t = CMatrix::from_real_rows(&[&[1.0, 2.0]]);
        assert!(matches!(
            solve_on_span(&t, &s, Tolerance::default()),
            Err(NumError::ResidualTooLarge { .. })
        ));
    }

    #[test]
    fn solve_rank_deficient_minimum_norm() {
        let s = CMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 0.0]]);
        let t = CMatrix::from_real_rows(&[&[3.0, 6.0]]);
        let a = solve_on_span(&t, &s, Tolerance::default()).unwrap();
        assert!((a[(0, 0)] - re(3.0)).norm() < 1e-13);
        assert!(a[(0, 1)].norm() < 1e-13);
    }
}
