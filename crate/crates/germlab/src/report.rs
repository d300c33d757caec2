//! Schema-versioned JSON reports. Every report is a pure function of its
//! inputs, so identical inputs and seeds give byte-identical output.

use germlab_core::dilation::{assemble_pseudo_hilbert, dilate, Dilation, DilationError, PseudoHilbert};
use germlab_core::germ::{GermMap, PdVerdict};
use germlab_core::ito_algebra::{gns_quadruple, CanonicalKind, ItoAlgebra};
use germlab_core::noise_sim::{ExpReport, KernelReport, MomentReport};
use germlab_core::{Check, Tolerance};
use serde::Serialize;

use crate::format::{matrix_to_wire, vector_to_wire, Complex, Matrix};
use crate::spec::{element_label, SpecError};

pub const SCHEMA: &str = "germlab.report.v1";

/// Echo of everything that determines a report.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    pub abs_tol: f64,
    pub rel_tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub batch: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_sigmas: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub elements: Vec<Vec<Complex>>,
}

impl Params {
    pub fn new(input: Option<String>, tol: Tolerance) -> Self {
        Self { input, abs_tol: tol.abs_eps, rel_tol: tol.rel_eps, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_eigenvalue: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    /// Input or usage problem rather than a failed mathematical check.
    #[serde(skip)]
    pub usage: bool,
}

impl Failure {
    pub fn usage(kind: &str, message: String) -> Self {
        Self { kind: kind.into(), message, field: None, element: None, min_eigenvalue: None, threshold: None, usage: true }
    }
}

impl From<&SpecError> for Failure {
    fn from(e: &SpecError) -> Self {
        let mut f = Failure::usage(e.kind(), e.to_string());
        if let SpecError::Schema { at, .. } | SpecError::Invariant { at, .. } = e {
            f.field = Some(at.field.clone());
            f.element = at.element.clone();
        }
        f
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report<T> {
    pub schema: &'static str,
    pub command: &'static str,
    pub passed: bool,
    pub params: Params,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<T>,
}

impl<T: Serialize> Report<T> {
    pub fn ok(command: &'static str, params: Params, passed: bool, result: T) -> Self {
        Self { schema: SCHEMA, command, passed, params, failure: None, result: Some(result) }
    }

    pub fn failed(command: &'static str, params: Params, failure: Failure) -> Self {
        Self { schema: SCHEMA, command, passed: false, params, failure: Some(failure), result: None }
    }

    /// 0 when every check passes, 1 on a failed check, 2 on bad input.
    pub fn exit_code(&self) -> u8 {
        match (&self.failure, self.passed) {
            (_, true) => 0,
            (Some(f), _) if f.usage => 2,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> String {
        crate::spec::to_pretty(self)
    }
}

/// One verified identity with its worst defect and where it occurred.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub name: &'static str,
    pub defect: f64,
    pub threshold: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub at: Option<[String; 2]>,
}

impl CheckRow {
    fn plain(c: &Check) -> Self {
        Self { name: c.name, defect: c.defect, threshold: c.threshold, pass: c.pass, at: None }
    }

    fn located(c: &Check, g: &GermMap) -> Self {
        Self { at: c.at.map(|(y, x)| [element_label(g, y), element_label(g, x)]), ..Self::plain(c) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub positive: bool,
    pub indeterminate: bool,
    pub dim: usize,
    pub min_eigenvalue: f64,
    pub threshold: f64,
    pub asymmetry: f64,
}

impl From<&PdVerdict> for Verdict {
    fn from(v: &PdVerdict) -> Self {
        Self {
            positive: v.positive,
            indeterminate: v.indeterminate,
            dim: v.dim,
            min_eigenvalue: v.report.min_eigenvalue,
            threshold: v.report.threshold,
            asymmetry: v.report.asymmetry,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgebraResult {
    pub dim: usize,
    pub basis: Vec<String>,
    pub checks: Vec<CheckRow>,
    pub gram_min_eigenvalue: f64,
}

pub fn verify_algebra(alg: &ItoAlgebra, params: Params) -> Report<AlgebraResult> {
    let axioms = alg.verify_axioms();
    let result = AlgebraResult {
        dim: alg.dim(),
        basis: alg.basis().to_vec(),
        checks: axioms.checks.iter().map(CheckRow::plain).collect(),
        gram_min_eigenvalue: axioms.gram_min_eigenvalue,
    };
    Report::ok("verify-algebra", params, axioms.passed(), result)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadrupleRow {
    pub element: String,
    pub l: Complex,
    pub k: Vec<Complex>,
    pub kstar: Vec<Complex>,
    pub j: Matrix,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GnsResult {
    pub dim_k: usize,
    pub quadruples: Vec<QuadrupleRow>,
    pub isometry: f64,
    pub homomorphism: f64,
    pub flat: f64,
    pub threshold: f64,
}

pub fn gns(alg: &ItoAlgebra, params: Params) -> Report<GnsResult> {
    match gns_quadruple(alg) {
        Ok(rep) => {
            let quadruples = alg
                .basis()
                .iter()
                .zip(&rep.basis_quadruples)
                .map(|(label, q)| QuadrupleRow {
                    element: label.clone(),
                    l: q.l.into(),
                    k: vector_to_wire(&q.k),
                    kstar: vector_to_wire(&q.kstar),
                    j: matrix_to_wire(&q.j),
                })
                .collect();
            let r = rep.residuals;
            let result = GnsResult {
                dim_k: rep.dim_k,
                quadruples,
                isometry: r.isometry,
                homomorphism: r.homomorphism,
                flat: r.flat,
                threshold: r.threshold,
            };
            Report::ok("gns", params, r.passed(), result)
        }
        Err(e) => Report::failed("gns", params, Failure { usage: false, ..Failure::usage("GnsError", e.to_string()) }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GermCheckResult {
    pub elements: Vec<String>,
    pub space_dim: usize,
    pub noise_dim: usize,
    pub symmetry: Vec<CheckRow>,
    pub conditional: Verdict,
    pub dissipator: Verdict,
    pub decidable: bool,
    pub agree: bool,
}

/// Symmetry checks plus both positivity tests; passes when the germ is
/// symmetric and both tests accept it.
pub fn germ_check(g: &GermMap, tol: Tolerance, params: Params) -> Report<GermCheckResult> {
    let run = || -> Result<Report<GermCheckResult>, germlab_core::germ::GermError> {
        let symmetry: Vec<CheckRow> = g.check_symmetry(tol)?.iter().map(|c| CheckRow::located(c, g)).collect();
        let eq = g.equivalence(tol)?;
        let symmetric = symmetry.iter().all(|c| c.pass);
        let result = GermCheckResult {
            elements: g.semigroup().labels().to_vec(),
            space_dim: g.space_dim(),
            noise_dim: g.noise_dim(),
            symmetry,
            conditional: (&eq.conditional).into(),
            dissipator: (&eq.dissipator).into(),
            decidable: eq.decidable(),
            agree: eq.agree(),
        };
        let passed = symmetric && eq.conditional.positive && eq.dissipator.positive && eq.agree();
        Ok(Report::ok("germ-check", params.clone(), passed, result))
    };
    run().unwrap_or_else(|e| Report::failed("germ-check", params.clone(), Failure::usage("GermError", e.to_string())))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Signature {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DilationResult {
    pub space_dim: usize,
    pub noise_dim: usize,
    pub r: usize,
    pub pseudo_dim: usize,
    pub signature: Signature,
    pub gram_residual: f64,
    pub residuals: Vec<CheckRow>,
    pub pseudo_hilbert: Vec<CheckRow>,
}

fn dilation_failure(e: &DilationError) -> Failure {
    let (kind, usage, min_eigenvalue, threshold) = match e {
        DilationError::NegativeDissipator { min_eigenvalue, threshold } => ("NegativeDissipator", false, Some(*min_eigenvalue), Some(*threshold)),
        DilationError::ResidualTooLarge { threshold, .. } => ("ResidualTooLarge", false, None, Some(*threshold)),
        DilationError::FactorizationDefect { threshold, .. } => ("FactorizationDefect", false, None, Some(*threshold)),
        DilationError::Germ(_) => ("GermError", true, None, None),
        DilationError::Num(_) => ("NumError", true, None, None),
    };
    Failure { min_eigenvalue, threshold, usage, ..Failure::usage(kind, e.to_string()) }
}

/// Dilation and pseudo-Hilbert assembly with their residual tables.
pub fn dilation(g: &GermMap, tol: Tolerance, params: Params) -> Report<DilationResult> {
    let built = dilate(g, tol).and_then(|dl| assemble_pseudo_hilbert(&dl, g, tol).map(|ph| (dl, ph)));
    match built {
        Ok((dl, ph)) => dilation_report(g, &dl, &ph, params),
        Err(e) => Report::failed("dilate", params, dilation_failure(&e)),
    }
}

fn dilation_report(g: &GermMap, dl: &Dilation, ph: &PseudoHilbert, params: Params) -> Report<DilationResult> {
    let residuals: Vec<CheckRow> = dl.residuals.iter().map(|c| CheckRow::located(c, g)).collect();
    let pseudo: Vec<CheckRow> = ph.checks.iter().map(|c| CheckRow::located(c, g)).collect();
    let passed = residuals.iter().chain(&pseudo).all(|c| c.pass);
    let result = DilationResult {
        space_dim: g.space_dim(),
        noise_dim: g.noise_dim(),
        r: dl.r,
        pseudo_dim: ph.g.rows(),
        signature: Signature { negative: ph.signature.negative, zero: ph.signature.zero, positive: ph.signature.positive },
        gram_residual: dl.gram_residual,
        residuals,
        pseudo_hilbert: pseudo,
    };
    Report::ok("dilate", params, passed, result)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpResult {
    pub algebra: Vec<String>,
    pub mc_mean: Complex,
    pub std_error: [f64; 2],
    pub closed_form: Complex,
    pub bias_allowance: f64,
    pub sigmas: Option<f64>,
    pub exact_mean: Complex,
    pub exact_std_error: [f64; 2],
    pub exact_sigmas: Option<f64>,
}

pub fn sim_exp(alg: &ItoAlgebra, r: &ExpReport, tol_sigmas: f64, params: Params) -> Report<ExpResult> {
    let result = ExpResult {
        algebra: alg.basis().to_vec(),
        mc_mean: r.mc_mean.into(),
        std_error: r.std_error,
        closed_form: r.closed_form.into(),
        bias_allowance: r.bias_allowance,
        sigmas: r.sigmas,
        exact_mean: r.exact_mean.into(),
        exact_std_error: r.exact_std_error,
        exact_sigmas: r.exact_sigmas,
    };
    Report::ok("sim-exp", params, r.passed(tol_sigmas), result)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentRow {
    pub name: &'static str,
    pub estimate: f64,
    pub target: f64,
    pub std_error: f64,
    pub allowance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentsResult {
    pub kind: String,
    pub checks: Vec<MomentRow>,
}

pub fn sim_moments(kind: CanonicalKind, r: &MomentReport, params: Params) -> Report<MomentsResult> {
    let checks = r
        .checks
        .iter()
        .map(|c| MomentRow {
            name: c.name,
            estimate: c.estimate,
            target: c.target,
            std_error: c.std_error,
            allowance: c.allowance,
            pass: c.pass,
        })
        .collect();
    Report::ok("sim-moments", params, r.passed(), MomentsResult { kind: kind.name().into(), checks })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelResult {
    pub gram: Matrix,
    pub psd: bool,
    pub min_eigenvalue: f64,
    pub psd_threshold: f64,
    pub mc_gram: Matrix,
    pub max_sigmas: Option<f64>,
    pub derivative: Matrix,
    pub derivative_defect: f64,
    pub derivative_threshold: f64,
    pub germ: Verdict,
}

pub fn kernel_check(r: &KernelReport, tol_sigmas: f64, params: Params) -> Report<KernelResult> {
    let result = KernelResult {
        gram: matrix_to_wire(&r.gram),
        psd: r.psd.psd,
        min_eigenvalue: r.psd.min_eigenvalue,
        psd_threshold: r.psd.threshold,
        mc_gram: matrix_to_wire(&r.mc_gram),
        max_sigmas: r.max_sigmas,
        derivative: matrix_to_wire(&r.derivative),
        derivative_defect: r.derivative_defect,
        derivative_threshold: r.derivative_threshold,
        germ: (&r.germ).into(),
    };
    Report::ok("kernel-check", params, r.passed(tol_sigmas), result)
}
