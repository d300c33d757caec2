//! Finite-dimensional Itô ⋆-algebras.
//!
//! An algebra is stored in a fixed basis `e_0 … e_{n-1}` through its
//! structure constants `e_i e_j = Σ_k c[i][j][k] e_k`, an antilinear
//! involution `e_i⋆ = Σ_k s[i][k] e_k` and the mean functional `l`.

mod gns;
mod quadruple;

pub use gns::{gns_quadruple, GnsRepresentation, GnsResiduals};
pub use quadruple::Quadruple;

use alloc::string::{String, ToString};
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::check::Check;
use crate::numkit::{psd_check, CMatrix, NumError, Tolerance, C64, ONE, ZERO};
use crate::prelude::*;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ItoError {
    #[error("unknown canonical algebra kind `{0}`")]
    UnknownKind(String),
    #[error("malformed algebra: {0}")]
    Malformed(String),
    #[error("axiom `{check}` violated: defect {defect:e} exceeds {threshold:e}")]
    AxiomViolation { check: &'static str, defect: f64, threshold: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Num(#[from] NumError),
}

/// The three one-noise building blocks of commutative Itô algebras.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CanonicalKind {
    /// `dt`, with `(dt)² = 0`.
    Newton,
    /// `{dt, dQ}`, with `dQ² = dt`.
    Wiener,
    /// `dP`, with `dP² = dP`.
    Poisson,
}

impl CanonicalKind {
    pub const ALL: [CanonicalKind; 3] = [Self::Newton, Self::Wiener, Self::Poisson];

    pub fn name(self) -> &'static str {
        match self {
            Self::Newton => "newton",
            Self::Wiener => "wiener",
            Self::Poisson => "poisson",
        }
    }
}

impl fmt::Display for CanonicalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CanonicalKind {
    type Err = ItoError;
    fn from_str(s: &str) -> Result<Self, ItoError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "newton" => Ok(Self::Newton),
            "wiener" => Ok(Self::Wiener),
            "poisson" => Ok(Self::Poisson),
            other => Err(ItoError::UnknownKind(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ItoAlgebra {
    basis: Vec<String>,
    /// `c[i][j][k]` at `(i * n + j) * n + k`.
    structure: Vec<C64>,
    involution: CMatrix,
    functional: Vec<C64>,
    tol: Tolerance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub checks: Vec<Check>,
    /// Smallest eigenvalue of the Gram `Γ_ij = l(e_i⋆ e_j)`.
    pub gram_min_eigenvalue: f64,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }
}

impl ItoAlgebra {
    /// Builds an algebra from raw tables. Only shapes and finiteness are
    /// checked here; call [`ItoAlgebra::verify_axioms`] for the rest.
    pub fn new(
        basis: Vec<String>,
        structure: Vec<C64>,
        involution: CMatrix,
        functional: Vec<C64>,
        tol: Tolerance,
    ) -> Result<Self, ItoError> {
        let n = basis.len();
        if structure.len() != n * n * n {
            return Err(ItoError::Malformed(alloc::format!(
                "structure has {} entries, expected {}",
                structure.len(),
                n * n * n
            )));
        }
        if involution.shape() != (n, n) {
            return Err(ItoError::Malformed(alloc::format!(
                "involution is {}x{}, expected {n}x{n}",
                involution.rows(),
                involution.cols()
            )));
        }
        if functional.len() != n {
            return Err(ItoError::Malformed(alloc::format!(
                "functional has {} entries, expected {n}",
                functional.len()
            )));
        }
        let finite = |z: &C64| z.re.is_finite() && z.im.is_finite();
        if !structure.iter().all(finite) || !functional.iter().all(finite) || !involution.is_finite() {
            return Err(ItoError::Num(NumError::NonFinite));
        }
        Ok(Self { basis, structure, involution, functional, tol })
    }

    /// Newton, Wiener or Poisson algebra with `l` multiplied by `scale`.
    pub fn canonical(kind: CanonicalKind, scale: f64) -> Result<Self, ItoError> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(ItoError::Malformed(alloc::format!("scale must be positive, got {scale}")));
        }
        let s = C64::new(scale, 0.0);
        let tol = Tolerance::default();
        match kind {
            CanonicalKind::Newton => {
                Self::new(vec!["tau".into()], vec![ZERO], CMatrix::identity(1), vec![s], tol)
            }
            CanonicalKind::Poisson => {
                Self::new(vec!["e".into()], vec![ONE], CMatrix::identity(1), vec![s], tol)
            }
            CanonicalKind::Wiener => {
                // basis (tau, omega): omega·omega = tau, the entry c[1][1][0]
                let mut c = vec![ZERO; 8];
                c[6] = ONE;
                Self::new(vec!["tau".into(), "omega".into()], c, CMatrix::identity(2), vec![s, ZERO], tol)
            }
        }
    }

    /// The algebra of all quadruples over a `dim_k`-dimensional noise space,
    /// realized as strictly upper-triangular matrices on `(−, •, +)` with the
    /// flip-adjoint involution and `l(a) = a⁻₊`.
    ///
    /// Basis order: `E⁻₊`, then `E⁻_κ`, then `E^κ₊`, then `E^κ_λ` (row-major).
    pub fn quadruple_algebra(dim_k: usize) -> Self {
        let plus = dim_k + 1;
        let mut units: Vec<(usize, usize)> = vec![(0, plus)];
        units.extend((0..dim_k).map(|k| (0, 1 + k)));
        units.extend((0..dim_k).map(|k| (1 + k, plus)));
        for a in 0..dim_k {
            for b in 0..dim_k {
                units.push((1 + a, 1 + b));
            }
        }
        let n = units.len();
        let index_of = |p: (usize, usize)| units.iter().position(|&u| u == p);
        let flip = |i: usize| if i == 0 { plus } else if i == plus { 0 } else { i };
        let mut structure = vec![ZERO; n * n * n];
        for (i, &(r1, c1)) in units.iter().enumerate() {
            for (j, &(r2, c2)) in units.iter().enumerate() {
                if c1 == r2 {
                    let k = index_of((r1, c2)).expect("product of triangular units is triangular");
                    structure[(i * n + j) * n + k] = ONE;
                }
            }
        }
        let mut involution = CMatrix::zeros(n, n);
        for (i, &(r, c)) in units.iter().enumerate() {
            // F E_{rc}† F = E_{flip(c) flip(r)}
            let k = index_of((flip(c), flip(r))).expect("flip-adjoint preserves the unit set");
            involution[(i, k)] = ONE;
        }
        let mut functional = vec![ZERO; n];
        functional[0] = ONE;
        let basis = units
            .iter()
            .map(|&(r, c)| {
                let name = |x: usize| if x == 0 { "-".to_string() } else if x == plus { "+".to_string() } else { alloc::format!("{}", x - 1) };
                alloc::format!("E[{},{}]", name(r), name(c))
            })
            .collect();
        Self::new(basis, structure, involution, functional, Tolerance::default())
            .expect("quadruple algebra tables are well-formed")
    }

    pub fn with_tolerance(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn structure(&self) -> &[C64] {
        &self.structure
    }

    /// `c[i][j][k]`.
    #[inline]
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> C64 {
        let n = self.dim();
        self.structure[(i * n + j) * n + k]
    }

    pub fn involution(&self) -> &CMatrix {
        &self.involution
    }

    pub fn functional(&self) -> &[C64] {
        &self.functional
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    /// Coefficient vector of the basis element `e_i`.
    pub fn basis_vector(&self, i: usize) -> Vec<C64> {
        let mut v = vec![ZERO; self.dim()];
        v[i] = ONE;
        v
    }

    fn check_len(&self, v: &[C64]) -> Result<(), ItoError> {
        if v.len() != self.dim() {
            return Err(ItoError::DimensionMismatch { expected: self.dim(), found: v.len() });
        }
        Ok(())
    }

    /// Bilinear product through the structure constants.
    pub fn ito_mul(&self, x: &[C64], y: &[C64]) -> Result<Vec<C64>, ItoError> {
        self.check_len(x)?;
        self.check_len(y)?;
        Ok(self.mul_unchecked(x, y))
    }

    fn mul_unchecked(&self, x: &[C64], y: &[C64]) -> Vec<C64> {
        let n = self.dim();
        let mut out = vec![ZERO; n];
        for (i, xi) in x.iter().enumerate() {
            if *xi == ZERO {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                let w = xi * yj;
                if w == ZERO {
                    continue;
                }
                let base = (i * n + j) * n;
                for (k, o) in out.iter_mut().enumerate() {
                    *o += w * self.structure[base + k];
                }
            }
        }
        out
    }

    /// Antilinear involution `a ↦ a⋆`.
    pub fn star(&self, a: &[C64]) -> Result<Vec<C64>, ItoError> {
        self.check_len(a)?;
        Ok(self.star_unchecked(a))
    }

    fn star_unchecked(&self, a: &[C64]) -> Vec<C64> {
        let n = self.dim();
        (0..n).map(|k| (0..n).map(|i| a[i].conj() * self.involution[(i, k)]).sum()).collect()
    }

    /// `l(a)`.
    pub fn mean(&self, a: &[C64]) -> Result<C64, ItoError> {
        self.check_len(a)?;
        Ok(a.iter().zip(&self.functional).map(|(x, l)| x * l).sum())
    }

    /// `a ⋆ b = b + a⋆b + a⋆`, so that `(1 + a)⋆(1 + b) = 1 + a ⋆ b`.
    pub fn star_product(&self, a: &[C64], b: &[C64]) -> Result<Vec<C64>, ItoError> {
        self.check_len(a)?;
        self.check_len(b)?;
        let a_star = self.star_unchecked(a);
        let prod = self.mul_unchecked(&a_star, b);
        Ok((0..self.dim()).map(|k| b[k] + prod[k] + a_star[k]).collect())
    }

    /// Product in the unital semigroup `1 + 𝔞`: `(1 + a)(1 + b) = 1 + (a + b + ab)`.
    pub fn semigroup_mul(&self, a: &[C64], b: &[C64]) -> Result<Vec<C64>, ItoError> {
        let prod = self.ito_mul(a, b)?;
        Ok((0..self.dim()).map(|k| a[k] + b[k] + prod[k]).collect())
    }

    /// Gram matrix `Γ_ij = l(e_i⋆ e_j)`.
    pub fn gram(&self) -> CMatrix {
        let n = self.dim();
        CMatrix::from_fn(n, n, |i, j| {
            let ei_star = self.star_unchecked(&self.basis_vector(i));
            let p = self.mul_unchecked(&ei_star, &self.basis_vector(j));
            p.iter().zip(&self.functional).map(|(x, l)| x * l).sum()
        })
    }

    fn magnitude(&self) -> f64 {
        let c = self.structure.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let s = self.involution.max_abs();
        let l = self.functional.iter().map(|z| z.norm()).fold(0.0, f64::max);
        self.dim() as f64 * (1.0 + c) * (1.0 + s) * (1.0 + s) * (1.0 + l)
    }

    /// Checks associativity, the involution laws, and positivity and
    /// ⋆-symmetry of `l`, reporting the worst defect of each.
    pub fn verify_axioms(&self) -> AxiomReport {
        let n = self.dim();
        let thr = self.tol.threshold(self.magnitude());
        let e: Vec<Vec<C64>> = (0..n).map(|i| self.basis_vector(i)).collect();
        let dist = |x: &[C64], y: &[C64]| x.iter().zip(y).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);

        let mut assoc = 0.0f64;
        let mut anti = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let ij = self.mul_unchecked(&e[i], &e[j]);
                for k in 0..n {
                    let left = self.mul_unchecked(&ij, &e[k]);
                    let right = self.mul_unchecked(&e[i], &self.mul_unchecked(&e[j], &e[k]));
                    assoc = assoc.max(dist(&left, &right));
                }
                let lhs = self.star_unchecked(&ij);
                let rhs = self.mul_unchecked(&self.star_unchecked(&e[j]), &self.star_unchecked(&e[i]));
                anti = anti.max(dist(&lhs, &rhs));
            }
        }
        let invol = (0..n)
            .map(|i| dist(&self.star_unchecked(&self.star_unchecked(&e[i])), &e[i]))
            .fold(0.0, f64::max);
        let symmetry = (0..n)
            .map(|i| {
                let li = self.functional[i];
                let l_star: C64 = self.star_unchecked(&e[i]).iter().zip(&self.functional).map(|(x, l)| x * l).sum();
                (l_star - li.conj()).norm()
            })
            .fold(0.0, f64::max);
        let gram = self.gram();
        let (gram_defect, gram_thr, gram_min, gram_ok) = match psd_check(&gram, self.tol) {
            Ok(r) => ((-r.min_eigenvalue).max(0.0).max(r.asymmetry), r.threshold.max(thr), r.min_eigenvalue, r.psd && r.asymmetry <= thr),
            Err(_) => (f64::INFINITY, thr, f64::NEG_INFINITY, false),
        };
        let mut positivity = Check::new("functional-positivity", gram_defect, gram_thr);
        positivity.pass = gram_ok;
        let checks = vec![
            Check::new("associativity", assoc, thr),
            Check::new("involution", invol, thr),
            Check::new("anti-multiplicativity", anti, thr),
            Check::new("functional-symmetry", symmetry, thr),
            positivity,
        ];
        AxiomReport { checks, gram_min_eigenvalue: gram_min }
    }

    fn require_axioms(&self) -> Result<(), ItoError> {
        let report = self.verify_axioms();
        match report.first_failure() {
            Some(c) => Err(ItoError::AxiomViolation { check: c.name, defect: c.defect, threshold: c.threshold }),
            None => Ok(()),
        }
    }

    /// Orthogonal sum: block-diagonal tables, cross products zero.
    pub fn direct_sum(&self, other: &Self) -> Result<Self, ItoError> {
        self.require_axioms()?;
        other.require_axioms()?;
        let (n1, n2) = (self.dim(), other.dim());
        let n = n1 + n2;
        let mut structure = vec![ZERO; n * n * n];
        for i in 0..n1 {
            for j in 0..n1 {
                for k in 0..n1 {
                    structure[(i * n + j) * n + k] = self.structure_constant(i, j, k);
                }
            }
        }
        for i in 0..n2 {
            for j in 0..n2 {
                for k in 0..n2 {
                    structure[((n1 + i) * n + n1 + j) * n + n1 + k] = other.structure_constant(i, j, k);
                }
            }
        }
        let mut basis = self.basis.clone();
        basis.extend(other.basis.iter().cloned());
        // keep labels distinct so that a sum of two copies still reads unambiguously
        let mut seen: Vec<String> = Vec::new();
        for (idx, b) in basis.iter_mut().enumerate() {
            if seen.contains(b) {
                *b = alloc::format!("{b}#{idx}");
            }
            seen.push(b.clone());
        }
        let mut functional = self.functional.clone();
        functional.extend_from_slice(&other.functional);
        let tol = Tolerance {
            abs_eps: self.tol.abs_eps.max(other.tol.abs_eps),
            rel_eps: self.tol.rel_eps.max(other.tol.rel_eps),
        };
        Self::new(basis, structure, self.involution.direct_sum(&other.involution), functional, tol)
    }

    /// Same algebra in the basis `f_i = Σ_k p[i][k] e_k`.
    pub fn change_basis(&self, p: &CMatrix) -> Result<Self, ItoError> {
        let n = self.dim();
        if p.shape() != (n, n) {
            return Err(ItoError::DimensionMismatch { expected: n, found: p.rows() });
        }
        let q = p.inverse()?;
        let rows: Vec<Vec<C64>> = (0..n).map(|i| p.row(i).to_vec()).collect();
        let mut structure = vec![ZERO; n * n * n];
        for i in 0..n {
            for j in 0..n {
                let prod = self.mul_unchecked(&rows[i], &rows[j]);
                let coords = q.transpose().mul_vec(&prod);
                for (m, z) in coords.into_iter().enumerate() {
                    structure[(i * n + j) * n + m] = z;
                }
            }
        }
        let involution = &(&p.conj() * &self.involution) * &q;
        let functional = p.mul_vec(&self.functional);
        let basis = (0..n).map(|i| alloc::format!("f{i}")).collect();
        Self::new(basis, structure, involution, functional, self.tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn canon(kind: CanonicalKind) -> ItoAlgebra {
        ItoAlgebra::canonical(kind, 1.0).unwrap()
    }

    #[test]
    fn canonical_products() {
        let w = canon(CanonicalKind::Wiener);
        assert_eq!(w.ito_mul(&[ZERO, ONE], &[ZERO, ONE]).unwrap(), vec![ONE, ZERO]);
        let p = canon(CanonicalKind::Poisson);
        assert_eq!(p.ito_mul(&[ONE], &[ONE]).unwrap(), vec![ONE]);
        let n = canon(CanonicalKind::Newton);
        assert_eq!(n.ito_mul(&[ONE], &[ONE]).unwrap(), vec![ZERO]);
    }

    #[test]
    fn wiener_is_second_order_nilpotent() {
        let w = canon(CanonicalKind::Wiener);
        assert!(w.verify_axioms().passed());
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let p = w.ito_mul(&w.ito_mul(&w.basis_vector(i), &w.basis_vector(j)).unwrap(), &w.basis_vector(k)).unwrap();
                    assert!(p.iter().all(|z| *z == ZERO));
                }
            }
        }
    }

    #[test]
    fn negative_functional_fails_positivity() {
        let w = canon(CanonicalKind::Wiener);
        let bad = ItoAlgebra::new(
            w.basis().to_vec(),
            w.structure().to_vec(),
            w.involution().clone(),
            vec![re(-1.0), ZERO],
            Tolerance::default(),
        )
        .unwrap();
        let report = bad.verify_axioms();
        assert!(!report.passed());
        assert_eq!(report.first_failure().unwrap().name, "functional-positivity");
        assert!((report.gram_min_eigenvalue + 1.0).abs() < 1e-14);
    }

    #[test]
    fn unknown_kind_and_bad_scale() {
        assert!(matches!("levy".parse::<CanonicalKind>(), Err(ItoError::UnknownKind(_))));
        assert_eq!("Wiener".parse::<CanonicalKind>().unwrap(), CanonicalKind::Wiener);
        assert!(ItoAlgebra::canonical(CanonicalKind::Poisson, 0.0).is_err());
    }

    #[test]
    fn star_product_examples() {
        let p = canon(CanonicalKind::Poisson);
        assert_eq!(p.star_product(&[ONE], &[ONE]).unwrap(), vec![re(3.0)]);
        let b = C64::new(0.5, -2.0);
        assert_eq!(p.star_product(&[ZERO], &[b]).unwrap(), vec![b]);
        let w = canon(CanonicalKind::Wiener);
        let beta = C64::new(0.3, 0.7);
        let got = w.star_product(&[ZERO, beta], &[ZERO, beta]).unwrap();
        assert!((got[0] - re(beta.norm_sqr())).norm() < 1e-15);
        assert!((got[1] - (beta + beta.conj())).norm() < 1e-15);
    }

    #[test]
    fn direct_sum_shapes() {
        let w = canon(CanonicalKind::Wiener);
        let p = canon(CanonicalKind::Poisson);
        let s = w.direct_sum(&p).unwrap();
        assert_eq!(s.dim(), 3);
        assert!(s.verify_axioms().passed());
        let empty = ItoAlgebra::new(vec![], vec![], CMatrix::zeros(0, 0), vec![], Tolerance::default()).unwrap();
        assert_eq!(w.direct_sum(&empty).unwrap(), w);
        let n = canon(CanonicalKind::Newton);
        let nn = n.direct_sum(&n).unwrap();
        assert_eq!(nn.basis(), &["tau".to_string(), "tau#1".to_string()]);
    }

    #[test]
    fn direct_sum_rejects_invalid() {
        let bad = ItoAlgebra::new(vec!["x".into()], vec![ONE], CMatrix::identity(1), vec![re(-1.0)], Tolerance::default()).unwrap();
        assert!(matches!(bad.direct_sum(&bad), Err(ItoError::AxiomViolation { .. })));
    }

    #[test]
    fn quadruple_algebra_passes_axioms() {
        for k in 0..3 {
            let q = ItoAlgebra::quadruple_algebra(k);
            assert_eq!(q.dim(), 1 + 2 * k + k * k);
            assert!(q.verify_axioms().passed(), "dim_k = {k}");
        }
    }

    #[test]
    fn change_basis_keeps_axioms() {
        let s = canon(CanonicalKind::Wiener).direct_sum(&canon(CanonicalKind::Poisson)).unwrap();
        let p = CMatrix::from_rows(&[
            &[ONE, C64::new(0.5, 0.5), ZERO],
            &[ZERO, re(2.0), C64::new(0.0, -1.0)],
            &[re(0.25), ZERO, ONE],
        ]);
        let t = s.change_basis(&p).unwrap();
        assert!(t.verify_axioms().passed());
    }
}
