use crate::ito_algebra::CanonicalKind;
use crate::prelude::*;

use super::{sample_increments, SimError, StepGrid};

/// One moment identity estimated over a batch.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentCheck {
    pub name: &'static str,
    pub estimate: f64,
    pub target: f64,
    pub std_error: f64,
    /// Deterministic allowance added to `tol_sigmas · std_error`.
    pub allowance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub kind: CanonicalKind,
    pub horizon: f64,
    pub step: f64,
    pub seed: u64,
    pub batch: usize,
    pub tol_sigmas: f64,
    pub checks: Vec<MomentCheck>,
}

impl MomentReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Clone, Copy, Default)]
struct Stats {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Stats {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn std_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        (self.m2 / (n - 1.0) / n).sqrt()
    }

    /// Two-sided test, or one-sided (`estimate ≤ target + …`) for bounds.
    fn check(&self, name: &'static str, target: f64, allowance: f64, tol_sigmas: f64, upper_only: bool) -> MomentCheck {
        let se = self.std_error();
        let gap = if upper_only { self.mean - target } else { (self.mean - target).abs() };
        MomentCheck {
            name,
            estimate: self.mean,
            target,
            std_error: se,
            allowance,
            pass: gap <= tol_sigmas * se + allowance,
        }
    }
}

/// Classical shadows of the Itô table on unit-rate paths:
/// `dQ² = dt` and `dt·dQ = 0` (wiener), `dP² = dP` with `E[dP] = dt`
/// (poisson), and deterministic `dt` with no spread (newton).
///
/// Per-step moments are estimated from per-path sums rescaled by `Δt/T`,
/// which keeps the targets exact when the last step is shorter.
pub fn ito_moment_check(
    kind: CanonicalKind,
    horizon: f64,
    step: f64,
    seed: u64,
    batch: usize,
    tol_sigmas: f64,
) -> Result<MomentReport, SimError> {
    if batch == 0 {
        return Err(SimError::EmptyBatch);
    }
    let grid = StepGrid::new(horizon, step)?;
    let per_step = step / horizon;
    let mut buf = Vec::with_capacity(grid.len());
    let mut s: [Stats; 3] = Default::default();
    let mut worst_dt_gap = 0.0f64;
    for p in 0..batch as u64 {
        sample_increments(kind, &grid, 1.0, seed, p, &mut buf);
        match kind {
            CanonicalKind::Wiener => {
                s[0].push(buf.iter().map(|q| q * q).sum::<f64>() * per_step);
                s[1].push(buf.iter().sum::<f64>() * per_step);
                s[2].push(buf.iter().enumerate().map(|(k, q)| grid.step_len(k) * q).sum::<f64>());
            }
            CanonicalKind::Poisson => {
                s[0].push(buf.iter().sum::<f64>() * per_step);
                s[1].push(buf.iter().map(|n| n * n - n).sum::<f64>() / grid.len() as f64);
            }
            CanonicalKind::Newton => {
                for (k, dt) in buf.iter().enumerate() {
                    worst_dt_gap = worst_dt_gap.max((dt - grid.step_len(k)).abs());
                }
                s[0].push(buf.iter().sum::<f64>());
            }
        }
    }
    let checks = match kind {
        CanonicalKind::Wiener => vec![
            s[0].check("E[dQ^2] = dt", step, 0.0, tol_sigmas, false),
            s[1].check("E[dQ] = 0", 0.0, 0.0, tol_sigmas, false),
            s[2].check("dt*dQ = 0", 0.0, 0.0, tol_sigmas, false),
        ],
        CanonicalKind::Poisson => vec![
            s[0].check("E[dP] = dt", step, 0.0, tol_sigmas, false),
            // factorial moment E[ΔP(ΔP − 1)] = Δt² at unit rate
            s[1].check("E[dP^2 - dP] = O(dt^2)", 0.0, 10.0 * step * step, tol_sigmas, true),
        ],
        CanonicalKind::Newton => vec![
            MomentCheck {
                name: "dt increments exact",
                estimate: worst_dt_gap,
                target: 0.0,
                std_error: 0.0,
                allowance: 0.0,
                pass: worst_dt_gap == 0.0,
            },
            MomentCheck {
                name: "zero variance",
                estimate: s[0].std_error(),
                target: 0.0,
                std_error: 0.0,
                allowance: 0.0,
                pass: s[0].m2 == 0.0,
            },
        ],
    };
    Ok(MomentReport { kind, horizon, step, seed, batch, tol_sigmas, checks })
}
