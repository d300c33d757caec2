//! Command-line front-end: argument parsing and command dispatch.

// failures are built once per run and go straight into the report
#![allow(clippy::result_large_err)]

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use germlab_core::ito_algebra::{CanonicalKind, ItoAlgebra};
use germlab_core::noise_sim::{ito_moment_check, pd_kernel_check, stochastic_exponential_mc, McConfig};
use germlab_core::{Tolerance, C64};

use crate::format::vector_to_wire;
use crate::report::{self, Failure, Params, Report};
use crate::spec::{parse_spec, read_algebra, read_germ, validate_algebra, Spec};

#[derive(Debug, Clone, Parser)]
#[command(name = "germlab", version, about = "Itô algebras, stochastic germs and their dilations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Algebra or germ spec (JSON).
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,
    /// Absolute tolerance floor.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Scale-relative tolerance.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub rel_tol: f64,
    #[arg(long, global = true, env = "GERMLAB_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo paths.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub batch: usize,
    /// Statistical acceptance in standard errors.
    #[arg(long, global = true, default_value_t = 4.0)]
    pub tol_sigmas: f64,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print the JSON report on stdout instead of a summary.
    #[arg(long, global = true)]
    pub json: bool,
}

/// A canonical algebra by name, used when no `--spec` is given.
#[derive(Debug, Clone, Args)]
pub struct AlgebraChoice {
    #[arg(long, value_parser = parse_kind)]
    pub kind: Option<CanonicalKind>,
    /// Intensity of the canonical algebra.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Check the Itô algebra axioms.
    VerifyAlgebra(#[command(flatten)] AlgebraChoice),
    /// Quadruple representation of the basis.
    Gns(#[command(flatten)] AlgebraChoice),
    /// Symmetry and both positivity tests of a germ.
    GermCheck,
    /// Minimal dilation and pseudo-Hilbert factorization of a germ.
    Dilate,
    /// Monte Carlo vacuum mean of a stochastic exponential.
    SimExp {
        #[command(flatten)]
        algebra: AlgebraChoice,
        /// Element coordinates, comma separated (`1`, `0,1`, `0.5+0.2i,1`).
        #[arg(long, value_parser = parse_element)]
        element: Element,
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
    /// Itô-table moments of one canonical noise.
    SimMoments {
        #[arg(long, value_parser = parse_kind)]
        kind: CanonicalKind,
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, default_value_t = 1e-2)]
        step: f64,
    },
    /// Positivity of `exp(t l(a⋆b))` on a list of elements.
    KernelCheck {
        #[command(flatten)]
        algebra: AlgebraChoice,
        /// Elements separated by `;`, coordinates by `,`.
        #[arg(long, value_parser = parse_element, value_delimiter = ';', required = true)]
        elements: Vec<Element>,
        #[arg(long, default_value_t = 1.0)]
        time: f64,
        #[arg(long, default_value_t = 1e-2)]
        step: f64,
    },
}

fn parse_kind(s: &str) -> Result<CanonicalKind, String> {
    s.parse().map_err(|e: germlab_core::ito_algebra::ItoError| e.to_string())
}

/// Coordinates of one algebra element.
#[derive(Debug, Clone, PartialEq)]
pub struct Element(pub Vec<C64>);

fn parse_element(s: &str) -> Result<Element, String> {
    s.split(',').map(|c| C64::from_str(c.trim()).map_err(|e| format!("bad coordinate `{c}`: {e}"))).collect::<Result<_, _>>().map(Element)
}

/// Finished command: exit code and serialized report.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: u8,
    pub passed: bool,
    pub command: &'static str,
    pub json: String,
    pub summary: String,
}

impl<T: serde::Serialize> From<Report<T>> for Outcome {
    fn from(r: Report<T>) -> Self {
        let summary = match (&r.failure, r.passed) {
            (_, true) => format!("{}: pass", r.command),
            (Some(f), _) => format!("{}: {} ({})", r.command, f.kind, f.message),
            (None, false) => format!("{}: fail", r.command),
        };
        Self { code: r.exit_code(), passed: r.passed, command: r.command, json: r.to_json(), summary }
    }
}

impl Common {
    fn tolerance(&self) -> Result<Tolerance, Failure> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        if ok(self.tol) && ok(self.rel_tol) {
            Ok(Tolerance::new(self.tol, self.rel_tol))
        } else {
            Err(Failure::usage("UsageError", "tolerances must be finite and nonnegative".into()))
        }
    }

    fn input(&self) -> Option<String> {
        self.spec.as_ref().map(|p| p.display().to_string())
    }
}

fn spec_path(common: &Common) -> Result<&Path, Failure> {
    common.spec.as_deref().ok_or_else(|| Failure::usage("UsageError", "--spec is required".into()))
}

/// Algebra from `--spec` (unvalidated when `checked` is false) or `--kind`.
fn load_algebra(common: &Common, choice: &AlgebraChoice, tol: Tolerance, checked: bool) -> Result<(ItoAlgebra, String), Failure> {
    match (&common.spec, choice.kind) {
        (Some(_), Some(_)) => Err(Failure::usage("UsageError", "give either --spec or --kind, not both".into())),
        (Some(path), None) => {
            let alg = read_algebra(path, tol).and_then(|a| if checked { validate_algebra(a) } else { Ok(a) });
            alg.map(|a| (a, path.display().to_string())).map_err(|e| Failure::from(&e))
        }
        (None, Some(kind)) => ItoAlgebra::canonical(kind, choice.scale)
            .map(|a| (a.with_tolerance(tol), format!("{kind}:{}", choice.scale)))
            .map_err(|e| Failure::usage("UsageError", e.to_string())),
        (None, None) => Err(Failure::usage("UsageError", "one of --spec or --kind is required".into())),
    }
}

fn sim_error(e: germlab_core::noise_sim::SimError) -> Failure {
    use germlab_core::noise_sim::SimError;
    let kind = match &e {
        SimError::BadStep { .. } => "BadStep",
        SimError::UnsupportedAlgebra(_) => "UnsupportedAlgebra",
        SimError::EmptyBatch => "EmptyBatch",
        _ => "InputError",
    };
    Failure::usage(kind, e.to_string())
}

/// Runs one command to completion. Never panics on bad input: every
/// problem becomes a report with exit code 2.
pub fn run(cli: &Cli) -> Outcome {
    let c = &cli.common;
    let name = command_name(&cli.command);
    let tol = match c.tolerance() {
        Ok(t) => t,
        Err(f) => return Report::<()>::failed(name, Params::new(c.input(), Tolerance::default()), f).into(),
    };
    let params = Params::new(c.input(), tol);
    let fail = |f: Failure, params: Params| -> Outcome { Report::<()>::failed(name, params, f).into() };
    let mc = |step: f64| McConfig { step, seed: c.seed, batch: c.batch };

    match &cli.command {
        Command::VerifyAlgebra(choice) => match load_algebra(c, choice, tol, false) {
            Ok((alg, input)) => report::verify_algebra(&alg, Params { input: Some(input), ..params }).into(),
            Err(f) => fail(f, params),
        },
        Command::Gns(choice) => match load_algebra(c, choice, tol, true) {
            Ok((alg, input)) => report::gns(&alg, Params { input: Some(input), ..params }).into(),
            Err(f) => fail(f, params),
        },
        Command::GermCheck => match spec_path(c).and_then(|p| read_germ(p).map_err(|e| Failure::from(&e))) {
            Ok(g) => report::germ_check(&g, tol, params).into(),
            Err(f) => fail(f, params),
        },
        Command::Dilate => {
            let g = spec_path(c).and_then(|p| match parse_spec(p, tol) {
                Ok(Spec::Germ(g)) => Ok(g),
                Ok(Spec::Algebra(_)) => Err(Failure::usage("UsageError", "dilate needs a germ spec".into())),
                Err(e) => Err(Failure::from(&e)),
            });
            match g {
                Ok(g) => report::dilation(&g, tol, params).into(),
                Err(f) => fail(f, params),
            }
        }
        Command::SimExp { algebra, element, horizon, step } => {
            let params = Params {
                seed: Some(c.seed),
                batch: Some(c.batch),
                horizon: Some(*horizon),
                step: Some(*step),
                tol_sigmas: Some(c.tol_sigmas),
                elements: vec![vector_to_wire(&element.0)],
                ..params
            };
            let run = load_algebra(c, algebra, tol, true).and_then(|(alg, input)| {
                let r = stochastic_exponential_mc(&alg, &element.0, *horizon, mc(*step)).map_err(sim_error)?;
                Ok(report::sim_exp(&alg, &r, c.tol_sigmas, Params { input: Some(input), ..params.clone() }))
            });
            run.map_or_else(|f| fail(f, params.clone()), Outcome::from)
        }
        Command::SimMoments { kind, horizon, step } => {
            let params = Params {
                input: Some(kind.name().into()),
                seed: Some(c.seed),
                batch: Some(c.batch),
                horizon: Some(*horizon),
                step: Some(*step),
                tol_sigmas: Some(c.tol_sigmas),
                ..params
            };
            match ito_moment_check(*kind, *horizon, *step, c.seed, c.batch, c.tol_sigmas) {
                Ok(r) => report::sim_moments(*kind, &r, params).into(),
                Err(e) => fail(sim_error(e), params),
            }
        }
        Command::KernelCheck { algebra, elements, time, step } => {
            let params = Params {
                seed: Some(c.seed),
                batch: Some(c.batch),
                time: Some(*time),
                step: Some(*step),
                tol_sigmas: Some(c.tol_sigmas),
                elements: elements.iter().map(|a| vector_to_wire(&a.0)).collect(),
                ..params
            };
            let run = load_algebra(c, algebra, tol, true).and_then(|(alg, input)| {
                let elements: Vec<Vec<C64>> = elements.iter().map(|a| a.0.clone()).collect();
                let r = pd_kernel_check(&alg, &elements, *time, tol, mc(*step)).map_err(sim_error)?;
                Ok(report::kernel_check(&r, c.tol_sigmas, Params { input: Some(input), ..params.clone() }))
            });
            run.map_or_else(|f| fail(f, params.clone()), Outcome::from)
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::VerifyAlgebra(_) => "verify-algebra",
        Command::Gns(_) => "gns",
        Command::GermCheck => "germ-check",
        Command::Dilate => "dilate",
        Command::SimExp { .. } => "sim-exp",
        Command::SimMoments { .. } => "sim-moments",
        Command::KernelCheck { .. } => "kernel-check",
    }
}

/// Writes the report where asked and returns the process exit code.
pub fn emit(cli: &Cli, outcome: &Outcome) -> u8 {
    if let Some(path) = &cli.common.out {
        if let Err(e) = std::fs::write(path, &outcome.json) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return 2;
        }
    }
    if cli.common.json {
        print!("{}", outcome.json);
    } else if outcome.code == 2 {
        eprintln!("error: {}", outcome.summary);
    } else {
        println!("{}", outcome.summary);
    }
    outcome.code
}
