use anyhow::{Context, Result};
use num_complex::Complex64;
use qonsager::bases::{BasisFamily, BasisKind};
use qonsager::onsager::{operator_matrix, Family, ModelParams};
use qonsager::overlaps::{
    fusion_c, overlap_c, overlap_d, overlap_dtilde, overlap_tensor_f_to_ftilde, reconstruction_residual, OverlapTensor,
};
use qonsager::polyops::MatrixRep;
use qonsager::sampling::{draw_generic, rng_for, unit_scale};
use qonsager::structure::{compare_appendix_b, extract_action, CoeffTable, Transcription};
use qonsager::suite::{run_fixed, run_sweep, Report, Suite, Sweep, Tolerances};
use qonsager::Precision;
use rand::Rng;
use serde::Serialize;

use crate::config::{self, ConfigError, RunConfig};
use crate::{parse_suites, BasisArg, Cli, Command, Common, OpArg, OverlapKind};

const DEFAULT_SEED: u64 = 7;

struct Resolved {
    config: RunConfig,
    seed: u64,
    precision: Precision,
    tolerances: Tolerances,
}

fn resolve(common: &Common) -> Result<Resolved, ConfigError> {
    let config = match &common.config {
        Some(path) => config::load(path)?,
        None => RunConfig::default(),
    };
    let seed = common.seed.or(config.seed).unwrap_or(DEFAULT_SEED);
    let precision = common.precision.map(Precision::from).or(config.precision).unwrap_or_default();
    let mut tolerances = config.tolerances.clone().unwrap_or_default();
    tolerances.apply_overrides(&common.tol).map_err(|e| ConfigError(e.to_string()))?;
    Ok(Resolved { config, seed, precision, tolerances })
}

/// Parameters from the config, or a generic draw for `--spins`.
fn params(r: &Resolved, common: &Common) -> Result<ModelParams> {
    if let Some(p) = &r.config.params {
        return Ok(p.to_params()?);
    }
    if common.spins.is_empty() {
        return Err(ConfigError("no parameters: give `params` in --config or --spins".into()).into());
    }
    if common.spins.contains(&0) {
        return Err(ConfigError("spins must satisfy 2j >= 1".into()).into());
    }
    Ok(draw_generic(r.seed, &common.spins, 0)?.params)
}

fn emit<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

pub fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Verify { common, suites } => verify(&common, &suites),
        Command::Matrix { common, op, level, basis } => matrix(&common, op, level, basis),
        Command::Overlaps { common, kind } => overlaps(&common, kind),
    }
}

fn verify(common: &Common, names: &[String]) -> Result<bool> {
    let r = resolve(common)?;
    let mut suites = parse_suites(names)?;
    if suites.is_empty() {
        suites = r.config.suites.clone();
    }
    if suites.is_empty() {
        suites.push(Suite::All);
    }
    let report: Report = if r.config.params.is_some() || !common.spins.is_empty() {
        run_fixed(&params(&r, common)?, &suites, &r.tolerances, r.precision, r.seed)
    } else {
        run_sweep(&Sweep::desk(r.seed), &suites, &r.tolerances, r.precision)
    };
    emit(&report)?;
    let s = &report.summary;
    eprintln!("{} cases, {} assertions: {} passed, {} failed", s.cases, s.total, s.passed, s.failed);
    for a in report.assertions.iter().filter(|a| !a.pass) {
        eprintln!("FAIL {} {} {}: {:.3e} vs {:.1e}", a.suite, a.case, a.check, a.residual, a.tolerance);
    }
    for d in &report.discrepancies {
        eprintln!(
            "note {} {}: {} disagrees on {} entries (max delta {:.3e})",
            d.case, d.table, d.label, d.failing_entries, d.max_delta
        );
    }
    Ok(report.all_pass())
}

fn matrix(common: &Common, op: OpArg, level: usize, basis: BasisArg) -> Result<bool> {
    let r = resolve(common)?;
    let p = params(&r, common)?;
    if level == 0 || level > p.nlevels() {
        return Err(ConfigError(format!("level must be in 1..={}", p.nlevels())).into());
    }
    let family = match op {
        OpArg::W0 => Family::W0,
        OpArg::W1 => Family::W1,
    };
    let w = operator_matrix(family, level, &p)?;
    let kind = match basis {
        BasisArg::Monomial => return emit(&w).map(|_| true),
        BasisArg::F => BasisKind::F,
        BasisArg::Ftilde => BasisKind::Ftilde,
        BasisArg::G => BasisKind::G,
    };
    let b = BasisFamily::build(kind, &p)?;
    let x = extract_action(&w, &b).with_context(|| format!("{kind} basis is not usable at these parameters"))?;
    emit(&MatrixRep::new(x))?;
    Ok(true)
}

#[derive(Serialize)]
struct TensorOutput {
    tensor: OverlapTensor,
    reconstruction_residual: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct FusionEntry {
    m: usize,
    n: usize,
    ntilde: usize,
    overlap: Complex64,
    fusion: Complex64,
    delta: f64,
}

#[derive(Serialize)]
struct FusionReport {
    entries: Vec<FusionEntry>,
    max_delta: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct TableReport {
    transcription: Transcription,
    max_delta: f64,
    mismatched_labels: Vec<String>,
    uncovered: Vec<Vec<i32>>,
    mismatches: Vec<qonsager::structure::CoeffEntry>,
}

impl TableReport {
    fn new(transcription: Transcription, t: CoeffTable) -> Self {
        Self {
            transcription,
            max_delta: t.max_delta,
            mismatched_labels: t.mismatched_labels.clone(),
            uncovered: t.uncovered.clone(),
            mismatches: t.entries.into_iter().filter(|e| !e.pass).collect(),
        }
    }
}

#[derive(Serialize)]
struct AppendixReport {
    tolerance: f64,
    corrected: TableReport,
    as_printed: TableReport,
    pass: bool,
}

fn overlaps(common: &Common, kind: OverlapKind) -> Result<bool> {
    let r = resolve(common)?;
    match kind {
        OverlapKind::FusionCheck => {
            let tol = r.tolerances.fusion;
            let mut rng = rng_for(r.seed, &[], 0);
            let q = Complex64::from_polar(rng.gen_range(0.75..=0.9), rng.gen_range(0.2..=0.6));
            let mut entries = Vec::new();
            for m in 0..=4 {
                let (a, b, c, d) =
                    (unit_scale(&mut rng), unit_scale(&mut rng), unit_scale(&mut rng), unit_scale(&mut rng));
                for n in 0..=m {
                    for ntilde in 0..=m {
                        let overlap = overlap_c(n, ntilde, a, b, c, d, m, q * q)?;
                        let fusion = fusion_c(n, ntilde, a, b, c, d, m, q * q)?;
                        let delta = (overlap - fusion).norm() / overlap.norm().max(1.0);
                        entries.push(FusionEntry { m, n, ntilde, overlap, fusion, delta });
                    }
                }
            }
            let max_delta = entries.iter().map(|e| e.delta).fold(0.0, f64::max);
            let pass = max_delta <= tol;
            emit(&FusionReport { entries, max_delta, tolerance: tol, pass })?;
            eprintln!("fusion-check: max delta {max_delta:.3e}");
            Ok(pass)
        }
        OverlapKind::AppendixBCheck => {
            let p = params(&r, common)?;
            if p.nlevels() != 2 {
                return Err(ConfigError("appendixB-check needs two sites".into()).into());
            }
            let tol = r.tolerances.closed_form;
            let corrected = compare_appendix_b(&p, Transcription::Corrected, tol)?;
            let printed = compare_appendix_b(&p, Transcription::AsPrinted, tol)?;
            let pass = corrected.passes();
            for l in &printed.mismatched_labels {
                eprintln!("as printed: {l} disagrees with extraction");
            }
            emit(&AppendixReport {
                tolerance: tol,
                corrected: TableReport::new(Transcription::Corrected, corrected),
                as_printed: TableReport::new(Transcription::AsPrinted, printed),
                pass,
            })?;
            Ok(pass)
        }
        OverlapKind::C | OverlapKind::D | OverlapKind::Dtilde => {
            let p = params(&r, common)?;
            let tensor = match kind {
                OverlapKind::C => overlap_tensor_f_to_ftilde(&p)?,
                OverlapKind::D => overlap_d(&p)?,
                _ => overlap_dtilde(&p)?,
            };
            let residual = reconstruction_residual(&tensor, &p)?;
            let tol = r.tolerances.overlaps;
            emit(&TensorOutput { tensor, reconstruction_residual: residual, tolerance: tol, pass: residual <= tol })?;
            Ok(residual <= tol)
        }
    }
}
