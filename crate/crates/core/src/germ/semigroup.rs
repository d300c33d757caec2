use alloc::format;
use alloc::string::String;

use crate::check::{Check, Worst};
use crate::numkit::{CMatrix, Tolerance, C64};
use crate::prelude::*;

use super::GermError;

/// Finite unital semigroup with an involution `x ↦ x⋆`, `(xy)⋆ = y⋆x⋆`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarSemigroup {
    labels: Vec<String>,
    unit: usize,
    /// `mult[x * m + y] = xy`.
    mult: Vec<usize>,
    star: Vec<usize>,
}

impl StarSemigroup {
    /// Validates every axiom exhaustively; `mult` is row-major `m × m`.
    pub fn new(labels: Vec<String>, unit: usize, mult: Vec<usize>, star: Vec<usize>) -> Result<Self, GermError> {
        let m = labels.len();
        let bad = |reason: String| GermError::Malformed { field: "semigroup", element: None, reason };
        if m == 0 {
            return Err(bad("semigroup has no elements".into()));
        }
        if unit >= m {
            return Err(bad(format!("unit index {unit} out of range")));
        }
        if mult.len() != m * m {
            return Err(bad(format!("mult has {} entries, expected {}", mult.len(), m * m)));
        }
        if star.len() != m {
            return Err(bad(format!("star has {} entries, expected {m}", star.len())));
        }
        if let Some(&x) = mult.iter().chain(&star).find(|&&x| x >= m) {
            return Err(bad(format!("element index {x} out of range")));
        }
        let s = Self { labels, unit, mult, star };
        for x in 0..m {
            if s.mul(unit, x) != x || s.mul(x, unit) != x {
                return Err(bad(format!("unit law fails at element {x}")));
            }
            if s.star(s.star(x)) != x {
                return Err(bad(format!("star is not involutive at element {x}")));
            }
            for y in 0..m {
                if s.star(s.mul(x, y)) != s.mul(s.star(y), s.star(x)) {
                    return Err(bad(format!("star is not anti-multiplicative at ({x}, {y})")));
                }
                for z in 0..m {
                    if s.mul(s.mul(x, y), z) != s.mul(x, s.mul(y, z)) {
                        return Err(bad(format!("mult is not associative at ({x}, {y}, {z})")));
                    }
                }
            }
        }
        Ok(s)
    }

    /// One-element semigroup `{1}`.
    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// Cyclic group `Z_n` with `x⋆ = x⁻¹`; element `k` is the generator power `g^k`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0, "cyclic group needs n >= 1");
        let labels = (0..n).map(|k| if k == 0 { "1".into() } else { format!("g{k}") }).collect();
        let mult = (0..n * n).map(|i| (i / n + i % n) % n).collect();
        let star = (0..n).map(|k| (n - k) % n).collect();
        Self { labels, unit: 0, mult, star }
    }

    /// Symmetric group on three letters with `x⋆ = x⁻¹` and `xy = x∘y`.
    pub fn symmetric3() -> Self {
        let perms = symmetric3_perms();
        let index = |p: [usize; 3]| perms.iter().position(|&q| q == p).expect("S3 is closed");
        let mut mult = Vec::with_capacity(36);
        for p in &perms {
            for q in &perms {
                mult.push(index([p[q[0]], p[q[1]], p[q[2]]]));
            }
        }
        let star = perms
            .iter()
            .map(|p| {
                let mut inv = [0; 3];
                for (k, &pk) in p.iter().enumerate() {
                    inv[pk] = k;
                }
                index(inv)
            })
            .collect();
        let labels = perms.iter().map(|p| format!("({}{}{})", p[0], p[1], p[2])).collect();
        Self { labels, unit: 0, mult, star }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn mult_table(&self) -> &[usize] {
        &self.mult
    }

    pub fn star_table(&self) -> &[usize] {
        &self.star
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mult[x * self.len() + y]
    }

    #[inline]
    pub fn star(&self, x: usize) -> usize {
        self.star[x]
    }

    /// `y⋆x`, the argument of every Gram block.
    #[inline]
    pub fn star_mul(&self, y: usize, x: usize) -> usize {
        self.mul(self.star(y), x)
    }
}

/// Permutations of `{0,1,2}` in a fixed order with the identity first.
pub(crate) fn symmetric3_perms() -> [[usize; 3]; 6] {
    [[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]]
}

/// A family of `d × d` matrices indexed by semigroup elements.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    dim: usize,
    images: Vec<CMatrix>,
}

impl Representation {
    /// Checks shapes and finiteness only; see [`Representation::verify`].
    pub fn new(dim: usize, images: Vec<CMatrix>) -> Result<Self, GermError> {
        for (x, m) in images.iter().enumerate() {
            if m.shape() != (dim, dim) {
                return Err(GermError::Malformed {
                    field: "rep",
                    element: Some(x),
                    reason: format!("image is {}x{}, expected {dim}x{dim}", m.rows(), m.cols()),
                });
            }
            if !m.is_finite() {
                return Err(GermError::Malformed { field: "rep", element: Some(x), reason: "non-finite entry".into() });
            }
        }
        Ok(Self { dim, images })
    }

    /// `i(x) = I` for every element.
    pub fn trivial(sg: &StarSemigroup, dim: usize) -> Self {
        Self { dim, images: vec![CMatrix::identity(dim); sg.len()] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[CMatrix] {
        &self.images
    }

    #[inline]
    pub fn image(&self, x: usize) -> &CMatrix {
        &self.images[x]
    }

    /// `i(x)⊗1` on `𝒦⊗D` with index `κ·d + δ`.
    pub fn ampliate(&self, x: usize, noise_dim: usize) -> CMatrix {
        CMatrix::identity(noise_dim).kron(&self.images[x])
    }

    /// Unitary conjugate `U i(x) U†`.
    pub fn conjugated(&self, u: &CMatrix) -> Self {
        let uh = u.adjoint();
        Self { dim: self.dim, images: self.images.iter().map(|m| &(u * m) * &uh).collect() }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "direct sum of representations of different semigroups");
        Self {
            dim: self.dim + other.dim,
            images: self.images.iter().zip(&other.images).map(|(a, b)| a.direct_sum(b)).collect(),
        }
    }

    /// Unital ⋆-representation checks: `i(xy) = i(x)i(y)`, `i(x⋆) = i(x)†`, `i(1) = I`.
    pub fn verify(&self, sg: &StarSemigroup, tol: Tolerance) -> Result<Vec<Check>, GermError> {
        if self.len() != sg.len() {
            return Err(GermError::DimensionMismatch { context: "rep images", expected: sg.len(), found: self.len() });
        }
        let scale = self.images.iter().map(|m| m.max_abs()).fold(1.0, f64::max);
        let thr = tol.threshold(scale * scale * self.dim.max(1) as f64);
        let mut hom = Worst::default();
        let mut star = Worst::default();
        for x in 0..sg.len() {
            star.update(self.images[sg.star(x)].distance(&self.images[x].adjoint()), (x, x));
            for y in 0..sg.len() {
                let prod = &self.images[x] * &self.images[y];
                hom.update(self.images[sg.mul(x, y)].distance(&prod), (x, y));
            }
        }
        let u = sg.unit();
        let unit = Check::new("unital", self.images[u].distance(&CMatrix::identity(self.dim)), thr).at((u, u));
        Ok(vec![hom.check("multiplicative", thr), star.check("star-preserving", thr), unit])
    }
}

/// One-dimensional characters and the standard representation, as
/// unitary irreducible building blocks for the groups used in tests.
pub fn cyclic_character(n: usize, m: usize) -> Representation {
    let images = (0..n)
        .map(|k| {
            let q = (m * k) % n;
            // quarter turns exactly, so real characters stay real
            let z = match (4 * q % n, 4 * q / n) {
                (0, 0) => C64::new(1.0, 0.0),
                (0, 1) => C64::new(0.0, 1.0),
                (0, 2) => C64::new(-1.0, 0.0),
                (0, _) => C64::new(0.0, -1.0),
                _ => C64::from_polar(1.0, 2.0 * core::f64::consts::PI * q as f64 / n as f64),
            };
            CMatrix::scalar(z)
        })
        .collect();
    Representation { dim: 1, images }
}

/// Irreducible representations of [`StarSemigroup::symmetric3`]:
/// index 0 trivial, 1 sign, 2 the two-dimensional standard one.
pub fn symmetric3_irrep(which: usize) -> Representation {
    let perms = symmetric3_perms();
    let sign = |p: &[usize; 3]| {
        let inversions = (0..3).flat_map(|a| (a + 1..3).map(move |b| (a, b))).filter(|&(a, b)| p[a] > p[b]).count();
        if inversions % 2 == 0 { 1.0 } else { -1.0 }
    };
    match which {
        0 => Representation { dim: 1, images: vec![CMatrix::identity(1); 6] },
        1 => Representation { dim: 1, images: perms.iter().map(|p| CMatrix::scalar(C64::new(sign(p), 0.0))).collect() },
        2 => {
            // orthonormal basis of the sum-zero plane in ℂ³
            let a = 1.0 / 2f64.sqrt();
            let b = 1.0 / 6f64.sqrt();
            let basis = CMatrix::from_real_rows(&[&[a, b], &[-a, b], &[0.0, -2.0 * b]]);
            let images = perms
                .iter()
                .map(|p| {
                    let perm = CMatrix::from_fn(3, 3, |r, c| if r == p[c] { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
                    basis.adjoint_mul(&(&perm * &basis))
                })
                .collect();
            Representation { dim: 2, images }
        }
        _ => panic!("S3 has three irreducible representations"),
    }
}
