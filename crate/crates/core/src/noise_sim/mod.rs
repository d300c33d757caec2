//! Classical shadows of the canonical Itô algebras: Newton time, Wiener and
//! Poisson noise, simulated on a step grid.
//!
//! Every path is a pure function of `(seed, index)`: component `c` of path
//! `p` draws from a ChaCha stream keyed by the mixed seed and `p`, so batches
//! are reproducible and paths are independent across indices.

mod mc;
mod moments;

pub use mc::{pd_kernel_check, stochastic_exponential_mc, ExpReport, KernelReport, McConfig};
pub use moments::{ito_moment_check, MomentCheck, MomentReport};

use alloc::format;
use alloc::string::String;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use thiserror::Error;

use crate::germ::GermError;
use crate::ito_algebra::{CanonicalKind, ItoAlgebra, ItoError};
use crate::numkit::{NumError, C64};
use crate::prelude::*;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("bad step: need 0 < step <= horizon, got step {step} and horizon {horizon}")]
    BadStep { horizon: f64, step: f64 },
    #[error("unsupported algebra: {0}")]
    UnsupportedAlgebra(String),
    #[error("batch must be nonempty")]
    EmptyBatch,
    #[error(transparent)]
    Ito(#[from] ItoError),
    #[error(transparent)]
    Germ(#[from] GermError),
    #[error(transparent)]
    Num(#[from] NumError),
}

/// `n = ⌈T/Δt⌉` steps of length `Δt`, the last one cut to end at `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepGrid {
    horizon: f64,
    step: f64,
    steps: usize,
}

impl StepGrid {
    pub fn new(horizon: f64, step: f64) -> Result<Self, SimError> {
        if !(horizon.is_finite() && horizon > 0.0 && step.is_finite() && step > 0.0 && step <= horizon) {
            return Err(SimError::BadStep { horizon, step });
        }
        // the guard keeps T/Δt = 1000.0000000000001 from adding a sliver step
        let steps = ((horizon / step) - 1e-9).ceil().max(1.0) as usize;
        Ok(Self { horizon, step, steps })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.steps
    }

    pub fn is_empty(&self) -> bool {
        self.steps == 0
    }

    #[inline]
    pub fn step_len(&self, k: usize) -> f64 {
        if k + 1 < self.steps {
            self.step
        } else {
            self.horizon - (self.steps - 1) as f64 * self.step
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoisePath {
    pub kind: CanonicalKind,
    pub horizon: f64,
    pub step: f64,
    pub seed: u64,
    pub index: u64,
    /// `Δt` for newton, `ΔQ` for wiener, jump counts `ΔN` for poisson.
    pub increments: Vec<f64>,
}

fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Seed of component `c` inside a direct sum; component 0 keeps the user seed.
pub(crate) fn component_seed(seed: u64, c: usize) -> u64 {
    seed ^ (c as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Increments of one path; `rate` is the Poisson intensity and the Wiener
/// variance per unit time.
pub(crate) fn sample_increments(kind: CanonicalKind, grid: &StepGrid, rate: f64, seed: u64, index: u64, out: &mut Vec<f64>) {
    out.clear();
    let n = grid.len();
    match kind {
        CanonicalKind::Newton => out.extend((0..n).map(|k| grid.step_len(k))),
        CanonicalKind::Wiener => {
            let mut rng = path_rng(seed, index);
            out.extend((0..n).map(|k| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z * (rate * grid.step_len(k)).sqrt()
            }));
        }
        CanonicalKind::Poisson => {
            let mut rng = path_rng(seed, index);
            out.resize(n, 0.0);
            let mut t = 0.0;
            loop {
                let gap: f64 = Exp1.sample(&mut rng);
                t += gap / rate;
                if t >= grid.horizon() {
                    break;
                }
                let k = ((t / grid.step()) as usize).min(n - 1);
                out[k] += 1.0;
            }
        }
    }
}

/// One standard path (unit rate) of the given kind.
pub fn sample_path(kind: CanonicalKind, grid: &StepGrid, seed: u64, index: u64) -> NoisePath {
    let mut increments = Vec::with_capacity(grid.len());
    sample_increments(kind, grid, 1.0, seed, index, &mut increments);
    NoisePath { kind, horizon: grid.horizon(), step: grid.step(), seed, index, increments }
}

/// Paths `0 … batch−1`. Each is independent of the batch size.
pub fn sample_paths(kind: CanonicalKind, horizon: f64, step: f64, seed: u64, batch: usize) -> Result<Vec<NoisePath>, SimError> {
    let grid = StepGrid::new(horizon, step)?;
    Ok((0..batch as u64).map(|p| sample_path(kind, &grid, seed, p)).collect())
}

/// One canonical summand of a direct-sum algebra in its standard basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalComponent {
    pub kind: CanonicalKind,
    /// `l` of the time-like basis vector: Newton `l(τ)`, Poisson `l(e)` and
    /// rate, Wiener `l(τ)` and variance rate of `Q`.
    pub scale: f64,
    /// Newton/Poisson: `[i]`; Wiener: `[τ, ω]`.
    pub indices: Vec<usize>,
}

/// Splits an algebra presented as a direct sum of canonical algebras (in the
/// canonical bases) into its components.
pub fn classical_components(alg: &ItoAlgebra) -> Result<Vec<ClassicalComponent>, SimError> {
    const EPS: f64 = 1e-12;
    let n = alg.dim();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &[usize], mut i: usize) -> usize {
        while p[i] != i {
            i = p[i];
        }
        i
    }
    fn union(p: &mut [usize], a: usize, b: usize) {
        let (ra, rb) = (root(p, a), root(p, b));
        p[ra.max(rb)] = ra.min(rb);
    }
    for i in 0..n {
        for j in 0..n {
            if alg.involution()[(i, j)].norm() > EPS {
                union(&mut parent, i, j);
            }
            for k in 0..n {
                if alg.structure_constant(i, j, k).norm() > EPS {
                    union(&mut parent, i, j);
                    union(&mut parent, i, k);
                }
            }
        }
    }
    // blocks in order of their smallest index
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut block_of_root: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = root(&parent, i);
        match block_of_root[r] {
            Some(b) => blocks[b].push(i),
            None => {
                block_of_root[r] = Some(blocks.len());
                blocks.push(vec![i]);
            }
        }
    }

    let is = |z: C64, v: f64| (z - C64::new(v, 0.0)).norm() <= EPS;
    let positive_real = |z: C64| z.im.abs() <= EPS && z.re > EPS;
    let unsupported = |what: String| SimError::UnsupportedAlgebra(what);
    let mut out = Vec::with_capacity(blocks.len());
    for block in blocks {
        let c = |i: usize, j: usize, k: usize| alg.structure_constant(block[i], block[j], block[k]);
        let self_adjoint = block.iter().all(|&i| block.iter().all(|&j| is(alg.involution()[(i, j)], if i == j { 1.0 } else { 0.0 })));
        let l = |i: usize| alg.functional()[block[i]];
        let component = match block.len() {
            1 if self_adjoint && positive_real(l(0)) && is(c(0, 0, 0), 0.0) => {
                ClassicalComponent { kind: CanonicalKind::Newton, scale: l(0).re, indices: block.clone() }
            }
            1 if self_adjoint && positive_real(l(0)) && is(c(0, 0, 0), 1.0) => {
                ClassicalComponent { kind: CanonicalKind::Poisson, scale: l(0).re, indices: block.clone() }
            }
            2 if self_adjoint => {
                // find ω with ω·ω = τ and every other product zero
                let found = (0..2).find(|&w| {
                    let t = 1 - w;
                    (0..2).all(|i| {
                        (0..2).all(|j| (0..2).all(|k| is(c(i, j, k), if i == w && j == w && k == t { 1.0 } else { 0.0 })))
                    }) && positive_real(l(t))
                        && is(l(w), 0.0)
                });
                match found {
                    Some(w) => ClassicalComponent {
                        kind: CanonicalKind::Wiener,
                        scale: l(1 - w).re,
                        indices: vec![block[1 - w], block[w]],
                    },
                    None => return Err(unsupported(format!("block {block:?} is not a canonical Wiener algebra"))),
                }
            }
            _ => return Err(unsupported(format!("block {block:?} is not a canonical Newton, Wiener or Poisson algebra"))),
        };
        out.push(component);
    }
    Ok(out)
}
