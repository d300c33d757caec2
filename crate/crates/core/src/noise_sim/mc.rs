use crate::germ::{conditional_pd, ItoSemigroupGerm, PdVerdict};
use crate::ito_algebra::{CanonicalKind, ItoAlgebra, ItoError};
use crate::numkit::{psd_check, CMatrix, PsdReport, Tolerance, C64, ONE, ZERO};
use crate::prelude::*;

use super::{classical_components, component_seed, sample_increments, ClassicalComponent, SimError, StepGrid};

/// Monte Carlo parameters shared by the estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub step: f64,
    pub seed: u64,
    pub batch: usize,
}

/// Running mean and variance of a complex sample, real and imaginary parts
/// tracked separately; summation order is the path order.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct ComplexStats {
    n: u64,
    mean: [f64; 2],
    m2: [f64; 2],
}

impl ComplexStats {
    pub fn push(&mut self, z: C64) {
        self.n += 1;
        let n = self.n as f64;
        for (c, x) in [z.re, z.im].into_iter().enumerate() {
            let delta = x - self.mean[c];
            self.mean[c] += delta / n;
            self.m2[c] += delta * (x - self.mean[c]);
        }
    }

    pub fn mean(&self) -> C64 {
        C64::new(self.mean[0], self.mean[1])
    }

    /// Standard errors of the mean, per component.
    pub fn std_error(&self) -> [f64; 2] {
        if self.n < 2 {
            return [0.0, 0.0];
        }
        let n = self.n as f64;
        [(self.m2[0] / (n - 1.0) / n).sqrt(), (self.m2[1] / (n - 1.0) / n).sqrt()]
    }
}

/// Worst component-wise deviation in standard errors, `None` when the
/// estimate has no spread at all.
pub(crate) fn deviation_sigmas(dev: C64, se: [f64; 2]) -> Option<f64> {
    if se[0] == 0.0 && se[1] == 0.0 {
        return None;
    }
    let comp = |d: f64, s: f64| if s > 0.0 { d.abs() / s } else if d.abs() <= 1e-12 { 0.0 } else { f64::INFINITY };
    Some(comp(dev.re, se[0]).max(comp(dev.im, se[1])))
}

/// Component-wise `|dev| ≤ k·se + slack`.
pub(crate) fn within(dev: C64, se: [f64; 2], k: f64, slack: f64) -> bool {
    dev.re.abs() <= k * se[0] + slack && dev.im.abs() <= k * se[1] + slack
}

/// Per-path increments for every component of an algebra.
struct Simulator {
    comps: Vec<ClassicalComponent>,
    grid: StepGrid,
    seed: u64,
    bufs: Vec<Vec<f64>>,
}

impl Simulator {
    fn new(alg: &ItoAlgebra, grid: StepGrid, seed: u64) -> Result<Self, SimError> {
        let comps = classical_components(alg)?;
        let bufs = vec![Vec::with_capacity(grid.len()); comps.len()];
        Ok(Self { comps, grid, seed, bufs })
    }

    fn load(&mut self, path: u64) {
        for (c, comp) in self.comps.iter().enumerate() {
            sample_increments(comp.kind, &self.grid, comp.scale, component_seed(self.seed, c), path, &mut self.bufs[c]);
        }
    }

    /// `Π_k (1 + ΔΛ_k(a))` on the loaded path.
    fn discrete_product(&self, a: &[C64]) -> C64 {
        let mut v = ONE;
        for k in 0..self.grid.len() {
            let dt = self.grid.step_len(k);
            let mut inc = ZERO;
            for (comp, buf) in self.comps.iter().zip(&self.bufs) {
                inc += match comp.kind {
                    CanonicalKind::Newton => a[comp.indices[0]] * (comp.scale * dt),
                    CanonicalKind::Poisson => a[comp.indices[0]] * buf[k],
                    CanonicalKind::Wiener => a[comp.indices[0]] * (comp.scale * dt) + a[comp.indices[1]] * buf[k],
                };
            }
            v *= ONE + inc;
        }
        v
    }

    /// Discretization-free stochastic exponential at the horizon:
    /// `exp(a s T)`, `(1 + a)^{N_T}` and `exp(α s T + β Q_T − β² s T / 2)`.
    fn exact(&self, a: &[C64]) -> C64 {
        let t = self.grid.horizon();
        let mut v = ONE;
        for (comp, buf) in self.comps.iter().zip(&self.bufs) {
            v *= match comp.kind {
                CanonicalKind::Newton => (a[comp.indices[0]] * (comp.scale * t)).exp(),
                CanonicalKind::Poisson => {
                    let jumps: f64 = buf.iter().sum();
                    (ONE + a[comp.indices[0]]).powi(jumps as i32)
                }
                CanonicalKind::Wiener => {
                    let q: f64 = buf.iter().sum();
                    let (alpha, beta) = (a[comp.indices[0]], a[comp.indices[1]]);
                    (alpha * (comp.scale * t) + beta * q - beta * beta * (comp.scale * t / 2.0)).exp()
                }
            };
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpReport {
    pub horizon: f64,
    pub config: McConfig,
    /// Mean of the discretized product integral.
    pub mc_mean: C64,
    pub std_error: [f64; 2],
    /// `exp(l(a) T)`.
    pub closed_form: C64,
    /// First-order weak-error allowance `e^{|l|T} |l|² T Δt` of the product.
    pub bias_allowance: f64,
    pub sigmas: Option<f64>,
    /// Mean of the exact evaluator on the same paths.
    pub exact_mean: C64,
    pub exact_std_error: [f64; 2],
    pub exact_sigmas: Option<f64>,
}

impl ExpReport {
    pub fn passed(&self, tol_sigmas: f64) -> bool {
        let slack = 1e-12 * (1.0 + self.closed_form.norm());
        within(self.mc_mean - self.closed_form, self.std_error, tol_sigmas, self.bias_allowance + slack)
            && within(self.exact_mean - self.closed_form, self.exact_std_error, tol_sigmas, slack)
    }
}

/// Vacuum mean of the stochastic exponential of `a` against `exp(l(a) T)`.
pub fn stochastic_exponential_mc(alg: &ItoAlgebra, a: &[C64], horizon: f64, cfg: McConfig) -> Result<ExpReport, SimError> {
    if a.len() != alg.dim() {
        return Err(ItoError::DimensionMismatch { expected: alg.dim(), found: a.len() }.into());
    }
    if cfg.batch == 0 {
        return Err(SimError::EmptyBatch);
    }
    let grid = StepGrid::new(horizon, cfg.step)?;
    let mut sim = Simulator::new(alg, grid, cfg.seed)?;
    let mut disc = ComplexStats::default();
    let mut exact = ComplexStats::default();
    for p in 0..cfg.batch as u64 {
        sim.load(p);
        disc.push(sim.discrete_product(a));
        exact.push(sim.exact(a));
    }
    let l = alg.mean(a)?;
    let closed_form = (l * horizon).exp();
    let bias_allowance = (l.norm() * horizon).exp() * l.norm_sqr() * horizon * cfg.step;
    Ok(ExpReport {
        horizon,
        config: cfg,
        mc_mean: disc.mean(),
        std_error: disc.std_error(),
        closed_form,
        bias_allowance,
        sigmas: deviation_sigmas(disc.mean() - closed_form, disc.std_error()),
        exact_mean: exact.mean(),
        exact_std_error: exact.std_error(),
        exact_sigmas: deviation_sigmas(exact.mean() - closed_form, exact.std_error()),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelReport {
    pub time: f64,
    pub config: McConfig,
    /// `exp(t · l(a_i ⋆ a_j))`.
    pub gram: CMatrix,
    pub psd: PsdReport,
    /// Mean of `V_t(a_i)* V_t(a_j)` over shared paths.
    pub mc_gram: CMatrix,
    pub max_sigmas: Option<f64>,
    /// `d/dt` of the gram at `t = 0`, that is `l(a_i ⋆ a_j)`.
    pub derivative: CMatrix,
    /// Largest gap between `derivative` and the scalar germ's sandwich entries.
    pub derivative_defect: f64,
    pub derivative_threshold: f64,
    /// Conditional positivity of the scalar germ on `1 + a_i`.
    pub germ: PdVerdict,
}

impl KernelReport {
    pub fn passed(&self, tol_sigmas: f64) -> bool {
        self.psd.psd
            && self.max_sigmas.is_none_or(|s| s <= tol_sigmas)
            && self.derivative_defect <= self.derivative_threshold
            && self.germ.positive
    }
}

/// Positivity of the kernel `φ_t(a, b) = exp(t · l(a ⋆ b))` on a finite list,
/// with a Monte Carlo estimate of every entry and the `t = 0` derivative
/// cross-checked against the scalar germ over `1 + 𝔞`.
pub fn pd_kernel_check(
    alg: &ItoAlgebra,
    elements: &[Vec<C64>],
    t: f64,
    tol: Tolerance,
    cfg: McConfig,
) -> Result<KernelReport, SimError> {
    if let Some(bad) = elements.iter().find(|a| a.len() != alg.dim()) {
        return Err(ItoError::DimensionMismatch { expected: alg.dim(), found: bad.len() }.into());
    }
    if cfg.batch == 0 {
        return Err(SimError::EmptyBatch);
    }
    let m = elements.len();
    let mut derivative = CMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            derivative[(i, j)] = alg.mean(&alg.star_product(&elements[i], &elements[j])?)?;
        }
    }
    let gram = derivative.map(|l| (l * t).exp());
    let psd = psd_check(&gram, tol)?;

    let grid = StepGrid::new(t, cfg.step)?;
    let mut sim = Simulator::new(alg, grid, cfg.seed)?;
    let mut stats = vec![ComplexStats::default(); m * m];
    let mut v = vec![ZERO; m];
    for p in 0..cfg.batch as u64 {
        sim.load(p);
        for (vi, a) in v.iter_mut().zip(elements) {
            *vi = sim.exact(a);
        }
        for i in 0..m {
            for j in 0..m {
                stats[i * m + j].push(v[i].conj() * v[j]);
            }
        }
    }
    let mc_gram = CMatrix::from_fn(m, m, |i, j| stats[i * m + j].mean());
    let max_sigmas = (0..m * m)
        .filter_map(|k| deviation_sigmas(stats[k].mean() - gram[(k / m, k % m)], stats[k].std_error()))
        .reduce(f64::max);

    let family = ItoSemigroupGerm::new(alg.clone(), elements.to_vec())?;
    let zeros = vec![ZERO; family.noise_dim()];
    let mut derivative_defect = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            let entry = family.sandwich(&zeros, i, j, &zeros)?[(0, 0)];
            derivative_defect = derivative_defect.max((entry - derivative[(i, j)]).norm());
        }
    }
    let derivative_threshold = tol.threshold(derivative.max_abs());
    let germ = conditional_pd(&family, tol)?;
    Ok(KernelReport {
        time: t,
        config: cfg,
        gram,
        psd,
        mc_gram,
        max_sigmas,
        derivative,
        derivative_defect,
        derivative_threshold,
        germ,
    })
}
