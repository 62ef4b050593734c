//! Named verification suites over sampled or fixed parameters, producing a
//! deterministic JSON report.

mod checks;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::onsager::ModelParams;
use crate::qkernel::Precision;
use crate::sampling::{draw_generic, SamplingError};

pub use checks::run_special_functions;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SuiteError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("unknown tolerance key `{0}`")]
    UnknownTolerance(String),
    #[error("tolerance override `{0}` is not KEY=VAL with a positive number")]
    BadOverride(String),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Relations,
    Spectra,
    Bases,
    Blocks,
    Split,
    Overlaps,
    Fusion,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] =
        [Suite::Relations, Suite::Spectra, Suite::Bases, Suite::Blocks, Suite::Split, Suite::Overlaps, Suite::Fusion];

    /// Expands `All` and removes duplicates, keeping the canonical order.
    pub fn expand(list: &[Suite]) -> Vec<Suite> {
        if list.contains(&Suite::All) {
            return Suite::EACH.to_vec();
        }
        Suite::EACH.iter().copied().filter(|s| list.contains(s)).collect()
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Relations => "relations",
            Suite::Spectra => "spectra",
            Suite::Bases => "bases",
            Suite::Blocks => "blocks",
            Suite::Split => "split",
            Suite::Overlaps => "overlaps",
            Suite::Fusion => "fusion",
            Suite::All => "all",
        })
    }
}

impl FromStr for Suite {
    type Err = SuiteError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::EACH
            .iter()
            .chain([&Suite::All])
            .find(|v| v.to_string() == s)
            .copied()
            .ok_or_else(|| SuiteError::UnknownSuite(s.to_string()))
    }
}

/// Acceptance thresholds. All are upper bounds on residuals except
/// `degeneracy`, a lower bound on the condition number of a degenerate basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub qdg: f64,
    pub commuting: f64,
    pub cross: f64,
    pub spectra: f64,
    pub eigenvectors: f64,
    pub blocks: f64,
    pub closed_form: f64,
    pub overlaps: f64,
    pub triangle: f64,
    pub aux: f64,
    pub fusion: f64,
    pub expansion: f64,
    pub classical: f64,
    pub etaprime: f64,
    pub degeneracy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            qdg: 1e-8,
            commuting: 1e-8,
            cross: 1e-9,
            spectra: 1e-8,
            eigenvectors: 1e-9,
            blocks: 1e-8,
            closed_form: 1e-7,
            overlaps: 1e-8,
            triangle: 1e-7,
            aux: 1e-9,
            fusion: 1e-8,
            expansion: 1e-9,
            classical: 1e-8,
            etaprime: 1e-9,
            degeneracy: 1e10,
        }
    }
}

impl Tolerances {
    pub fn set(&mut self, key: &str, value: f64) -> Result<(), SuiteError> {
        let slot = match key {
            "qdg" => &mut self.qdg,
            "commuting" => &mut self.commuting,
            "cross" => &mut self.cross,
            "spectra" => &mut self.spectra,
            "eigenvectors" => &mut self.eigenvectors,
            "blocks" => &mut self.blocks,
            "closed_form" => &mut self.closed_form,
            "overlaps" => &mut self.overlaps,
            "triangle" => &mut self.triangle,
            "aux" => &mut self.aux,
            "fusion" => &mut self.fusion,
            "expansion" => &mut self.expansion,
            "classical" => &mut self.classical,
            "etaprime" => &mut self.etaprime,
            "degeneracy" => &mut self.degeneracy,
            _ => return Err(SuiteError::UnknownTolerance(key.to_string())),
        };
        *slot = value;
        Ok(())
    }

    /// Applies `KEY=VAL` overrides in order.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<(), SuiteError> {
        for o in overrides {
            let o = o.as_ref();
            let (k, v) = o.split_once('=').ok_or_else(|| SuiteError::BadOverride(o.to_string()))?;
            let v: f64 = v.trim().parse().map_err(|_| SuiteError::BadOverride(o.to_string()))?;
            if !(v > 0.0 && v.is_finite()) {
                return Err(SuiteError::BadOverride(o.to_string()));
            }
            self.set(k.trim(), v)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// Passes when `residual <= tolerance`.
    Upper,
    /// Passes when `residual > tolerance`.
    Lower,
}

/// One checked identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assertion {
    pub suite: Suite,
    pub case: String,
    pub check: String,
    pub residual: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Assertion {
    pub fn upper(suite: Suite, case: &str, check: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            suite,
            case: case.to_string(),
            check: check.into(),
            residual,
            tolerance,
            bound: Bound::Upper,
            pass: residual <= tolerance,
            error: None,
        }
    }

    pub fn lower(suite: Suite, case: &str, check: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self { bound: Bound::Lower, pass: residual > tolerance, ..Self::upper(suite, case, check, residual, tolerance) }
    }

    pub fn failed(
        suite: Suite,
        case: &str,
        check: impl Into<String>,
        tolerance: f64,
        error: impl fmt::Display,
    ) -> Self {
        Self {
            suite,
            case: case.to_string(),
            check: check.into(),
            residual: f64::INFINITY,
            tolerance,
            bound: Bound::Upper,
            pass: false,
            error: Some(error.to_string()),
        }
    }
}

/// A closed form that is known not to match extraction, reported rather than asserted.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Discrepancy {
    pub case: String,
    pub table: String,
    pub label: String,
    pub failing_entries: usize,
    pub max_delta: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Outcome {
    pub assertions: Vec<Assertion>,
    pub discrepancies: Vec<Discrepancy>,
}

impl Outcome {
    fn extend(&mut self, other: Outcome) {
        self.assertions.extend(other.assertions);
        self.discrepancies.extend(other.discrepancies);
    }
}

/// Shapes and draws for a sampled run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sweep {
    pub seed: u64,
    pub shapes: Vec<Vec<u32>>,
    pub draws: usize,
}

impl Sweep {
    /// `N` in `{1, 2, 3}`, every `spins2` in `{1, 2, 3}^N`, three draws per shape.
    pub fn desk(seed: u64) -> Self {
        let mut shapes = Vec::new();
        for n in 1..=3u32 {
            for code in 0..3usize.pow(n) {
                shapes.push((0..n).map(|k| (code / 3usize.pow(n - 1 - k)) as u32 % 3 + 1).collect());
            }
        }
        Self { seed, shapes, draws: 3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub cases: usize,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub suites: Vec<Suite>,
    pub precision: Precision,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub summary: Summary,
    pub assertions: Vec<Assertion>,
    pub discrepancies: Vec<Discrepancy>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    fn new(
        suites: Vec<Suite>,
        precision: Precision,
        tolerances: Tolerances,
        seed: Option<u64>,
        cases: usize,
        o: Outcome,
    ) -> Self {
        let passed = o.assertions.iter().filter(|a| a.pass).count();
        let total = o.assertions.len();
        Self {
            suites,
            precision,
            tolerances,
            seed,
            summary: Summary { cases, total, passed, failed: total - passed },
            assertions: o.assertions,
            discrepancies: o.discrepancies,
        }
    }
}

/// Label of a sampled case, e.g. `[2,1]#0`.
pub fn case_label(spins2: &[u32], draw: Option<usize>) -> String {
    let shape = spins2.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",");
    match draw {
        Some(d) => format!("[{shape}]#{d}"),
        None => format!("[{shape}]"),
    }
}

/// Runs the parameter-dependent suites on one parameter point.
pub fn run_on_params(p: &ModelParams, case: &str, suites: &[Suite], tol: &Tolerances) -> Outcome {
    let mut out = Outcome::default();
    for suite in Suite::expand(suites) {
        out.extend(checks::run_suite(suite, p, case, tol));
    }
    out
}

/// Runs the suites on a fixed parameter point; the special-function suite
/// uses draw `0` of `seed`.
pub fn run_fixed(p: &ModelParams, suites: &[Suite], tol: &Tolerances, precision: Precision, seed: u64) -> Report {
    let suites = Suite::expand(suites);
    let mut out = run_on_params(p, &case_label(&p.spins2, None), &suites, tol);
    if suites.contains(&Suite::Fusion) {
        out.extend(run_special_functions(seed, 0, tol, precision));
    }
    Report::new(suites, precision, tol.clone(), Some(seed), 1, out)
}

/// Runs the suites over every shape and draw of a sweep, in parallel, and
/// assembles the results in sweep order.
pub fn run_sweep(sweep: &Sweep, suites: &[Suite], tol: &Tolerances, precision: Precision) -> Report {
    let suites = Suite::expand(suites);
    let cases: Vec<(Vec<u32>, usize)> =
        sweep.shapes.iter().flat_map(|s| (0..sweep.draws).map(move |d| (s.clone(), d))).collect();
    let param_suites: Vec<Suite> = suites.iter().copied().filter(|s| *s != Suite::Fusion).collect();
    let mut outcomes: Vec<Outcome> = if param_suites.is_empty() {
        Vec::new()
    } else {
        cases
            .par_iter()
            .map(|(shape, d)| {
                let case = case_label(shape, Some(*d));
                match draw_generic(sweep.seed, shape, *d) {
                    Ok(draw) => run_on_params(&draw.params, &case, &param_suites, tol),
                    Err(e) => Outcome {
                        assertions: vec![Assertion::failed(param_suites[0], &case, "sampling", 0.0, e)],
                        discrepancies: Vec::new(),
                    },
                }
            })
            .collect()
    };
    if suites.contains(&Suite::Fusion) {
        outcomes.extend(
            (0..sweep.draws)
                .into_par_iter()
                .map(|d| run_special_functions(sweep.seed, d, tol, precision))
                .collect::<Vec<_>>(),
        );
    }
    let mut out = Outcome::default();
    for o in outcomes {
        out.extend(o);
    }
    Report::new(suites, precision, tol.clone(), Some(sweep.seed), cases.len(), out)
}
