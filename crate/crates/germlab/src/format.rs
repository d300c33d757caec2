//! JSON wire types for algebras and germs, with conversions to and from the
//! core domain values. Complex numbers travel as `[re, im]`, matrices as
//! row-major nested arrays.

use germlab_core::germ::{GermMap, Representation, StarSemigroup};
use germlab_core::ito_algebra::{CanonicalKind, ItoAlgebra};
use germlab_core::{CMatrix, Tolerance, C64};
use serde::{Deserialize, Serialize};

use crate::spec::SpecError;

/// `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Complex(pub f64, pub f64);

impl From<C64> for Complex {
    fn from(z: C64) -> Self {
        Self(z.re, z.im)
    }
}

impl From<Complex> for C64 {
    fn from(z: Complex) -> Self {
        C64::new(z.0, z.1)
    }
}

pub type Matrix = Vec<Vec<Complex>>;

pub fn matrix_to_wire(m: &CMatrix) -> Matrix {
    (0..m.rows()).map(|i| m.row(i).iter().map(|&z| z.into()).collect()).collect()
}

pub fn vector_to_wire(v: &[C64]) -> Vec<Complex> {
    v.iter().map(|&z| z.into()).collect()
}

fn vector_from_wire(v: &[Complex]) -> Vec<C64> {
    v.iter().map(|&z| z.into()).collect()
}

/// Converts a wire matrix, which must have exactly the expected shape.
fn matrix_from_wire(m: &Matrix, shape: (usize, usize), field: &str, element: Option<&str>) -> Result<CMatrix, SpecError> {
    let found_cols = m.first().map_or(shape.1, Vec::len);
    if m.len() != shape.0 || m.iter().any(|row| row.len() != found_cols) || found_cols != shape.1 {
        let rows: Vec<usize> = m.iter().map(Vec::len).collect();
        return Err(SpecError::schema(
            field,
            element,
            format!("expected a {}x{} matrix, found row lengths {rows:?}", shape.0, shape.1),
        ));
    }
    let data = m.iter().flatten().map(|&z| z.into()).collect();
    Ok(CMatrix::new(shape.0, shape.1, data).expect("shape checked above"))
}

/// An algebra named by its canonical kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CanonicalSpec {
    pub canonical: String,
    #[serde(default = "unit_scale")]
    pub scale: f64,
}

fn unit_scale() -> f64 {
    1.0
}

/// An algebra given by its tables: `structure[i][j][k]` is the coefficient
/// of `e_k` in `e_i e_j`, `involution[i][j]` the coefficient of `e_i` in
/// `e_j⋆`, and `functional[i] = l(e_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub dim: usize,
    pub basis: Vec<String>,
    pub structure: Vec<Vec<Vec<Complex>>>,
    pub involution: Matrix,
    pub functional: Vec<Complex>,
}

impl AlgebraSpec {
    pub fn from_algebra(alg: &ItoAlgebra) -> Self {
        let n = alg.dim();
        Self {
            dim: n,
            basis: alg.basis().to_vec(),
            structure: (0..n)
                .map(|i| (0..n).map(|j| (0..n).map(|k| alg.structure_constant(i, j, k).into()).collect()).collect())
                .collect(),
            involution: matrix_to_wire(alg.involution()),
            functional: vector_to_wire(alg.functional()),
        }
    }

    /// Shape-checked conversion; axioms are not verified here.
    pub fn to_algebra(&self, tol: Tolerance) -> Result<ItoAlgebra, SpecError> {
        let n = self.dim;
        if self.basis.len() != n {
            return Err(SpecError::schema("basis", None, format!("{} labels for dim {n}", self.basis.len())));
        }
        if self.structure.len() != n {
            return Err(SpecError::schema("structure", None, format!("{} slices for dim {n}", self.structure.len())));
        }
        let mut structure = Vec::with_capacity(n * n * n);
        for (i, slice) in self.structure.iter().enumerate() {
            let m = matrix_from_wire(slice, (n, n), "structure", Some(&self.basis[i]))?;
            structure.extend(m.into_vec());
        }
        let involution = matrix_from_wire(&self.involution, (n, n), "involution", None)?;
        if self.functional.len() != n {
            return Err(SpecError::schema("functional", None, format!("{} entries for dim {n}", self.functional.len())));
        }
        ItoAlgebra::new(self.basis.clone(), structure, involution, vector_from_wire(&self.functional), tol)
            .map_err(|e| SpecError::schema("algebra", None, e.to_string()))
    }
}

impl CanonicalSpec {
    pub fn to_algebra(&self, tol: Tolerance) -> Result<ItoAlgebra, SpecError> {
        let kind: CanonicalKind = self.canonical.parse().map_err(|e: germlab_core::ito_algebra::ItoError| {
            SpecError::schema("canonical", None, e.to_string())
        })?;
        ItoAlgebra::canonical(kind, self.scale)
            .map(|a| a.with_tolerance(tol))
            .map_err(|e| SpecError::schema("scale", None, e.to_string()))
    }
}

/// A finite ⋆-semigroup by its tables: `mult[x][y]` is the index of `x·y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemigroupSpec {
    pub elements: Vec<String>,
    pub unit: usize,
    pub mult: Vec<Vec<usize>>,
    pub star: Vec<usize>,
}

/// A germ: `rep[x] = i(x)` on `D`, and the four blocks per element, all
/// listed in element order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GermSpec {
    pub semigroup: SemigroupSpec,
    pub rep: Vec<Matrix>,
    pub noise_dim: usize,
    pub lam: Vec<Matrix>,
    pub lam_out: Vec<Matrix>,
    pub lam_in: Vec<Matrix>,
    pub lam_dot: Vec<Matrix>,
}

impl GermSpec {
    pub fn from_germ(g: &GermMap) -> Self {
        let sg = g.semigroup();
        let m = sg.len();
        let wire = |ms: &[CMatrix]| ms.iter().map(matrix_to_wire).collect();
        Self {
            semigroup: SemigroupSpec {
                elements: sg.labels().to_vec(),
                unit: sg.unit(),
                mult: sg.mult_table().chunks(m).map(<[usize]>::to_vec).collect(),
                star: sg.star_table().to_vec(),
            },
            rep: wire(g.rep().images()),
            noise_dim: g.noise_dim(),
            lam: wire(g.lam()),
            lam_out: wire(g.lam_out()),
            lam_in: wire(g.lam_in()),
            lam_dot: wire(g.lam_dot()),
        }
    }

    /// Shape-checked conversion; symmetry is not verified here.
    pub fn to_germ(&self) -> Result<GermMap, SpecError> {
        let s = &self.semigroup;
        let m = s.elements.len();
        if m == 0 {
            return Err(SpecError::schema("semigroup.elements", None, "no elements".into()));
        }
        if let Some(x) = s.mult.iter().position(|row| row.len() != m) {
            return Err(SpecError::schema("semigroup.mult", Some(&s.elements[x]), format!("row must have {m} entries")));
        }
        if s.mult.len() != m {
            return Err(SpecError::schema("semigroup.mult", None, format!("{} rows for {m} elements", s.mult.len())));
        }
        let sg = StarSemigroup::new(s.elements.clone(), s.unit, s.mult.concat(), s.star.clone())
            .map_err(|e| SpecError::invariant("semigroup", None, e.to_string()))?;

        let labels = &s.elements;
        let blocks = |field: &str, mats: &[Matrix], shape: (usize, usize)| -> Result<Vec<CMatrix>, SpecError> {
            if mats.len() != m {
                return Err(SpecError::schema(field, None, format!("{} blocks for {m} elements", mats.len())));
            }
            mats.iter().zip(labels).map(|(mat, label)| matrix_from_wire(mat, shape, field, Some(label))).collect()
        };
        let d = self.rep.first().map_or(0, Vec::len);
        if d == 0 {
            return Err(SpecError::schema("rep", None, "representation space is empty".into()));
        }
        let nd = self.noise_dim * d;
        let rep = Representation::new(d, blocks("rep", &self.rep, (d, d))?).map_err(|e| SpecError::schema("rep", None, e.to_string()))?;
        GermMap::new(
            sg,
            rep,
            self.noise_dim,
            blocks("lam", &self.lam, (d, d))?,
            blocks("lam_out", &self.lam_out, (nd, d))?,
            blocks("lam_in", &self.lam_in, (d, nd))?,
            blocks("lam_dot", &self.lam_dot, (nd, nd))?,
        )
        .map_err(|e| SpecError::schema("germ", None, e.to_string()))
    }
}
