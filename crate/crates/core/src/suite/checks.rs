use nalgebra::DVector;
use rand::Rng;

use super::{Assertion, Discrepancy, Outcome, Suite, Tolerances};
use crate::bases::{
    check_basis_validity, cond1_violation, eigenvalue_lambda, lambda_tilde, BasisFamily, BasisKind, MultiIndex,
};
use crate::onsager::{build_w_tensor, operator_matrix, verify_commuting, verify_qonsager, Family, ModelParams};
use crate::overlaps::{
    biorthogonality_residual_extended, expansion_residual, fusion_c, generating_residual, inversion_residual,
    nine_term_recurrence_residual, overlap_c, overlap_d, overlap_dtilde, overlap_tensor_f_to_ftilde,
    overlap_tensor_ftilde_to_f, reconstruction_residual, triangle_residual, verify_aux_recurrence,
};
use crate::polyops::linalg::{eigenvalues, max_abs, multiset_distance};
use crate::polyops::MatrixRep;
use crate::qkernel::identities::{
    default_orthogonality_precision, dual_qkrawtchouk_orthogonality_residual, dual_qkrawtchouk_recurrence_residual,
    qracah_orthogonality_residual, qracah_recurrence_residual,
};
use crate::qkernel::{Precision, C64};
use crate::sampling::{rng_for, unit_scale};
use crate::structure::{
    compare_appendix_b, compare_n1, compare_split_n1, compare_split_n2, verify_bidiagonal_split,
    verify_block_tridiagonal, w12aux_residuals, CoeffTable, Transcription,
};

/// Collects assertions for one suite and case.
struct Sink<'a> {
    suite: Suite,
    case: &'a str,
    out: Outcome,
}

impl<'a> Sink<'a> {
    fn new(suite: Suite, case: &'a str) -> Self {
        Self { suite, case, out: Outcome::default() }
    }

    fn upper<E: std::fmt::Display>(&mut self, check: impl Into<String>, r: Result<f64, E>, tol: f64) {
        let check = check.into();
        self.out.assertions.push(match r {
            Ok(v) => Assertion::upper(self.suite, self.case, check, v, tol),
            Err(e) => Assertion::failed(self.suite, self.case, check, tol, e),
        });
    }

    fn lower(&mut self, check: impl Into<String>, v: f64, tol: f64) {
        self.out.assertions.push(Assertion::lower(self.suite, self.case, check, v, tol));
    }

    fn table<E: std::fmt::Display>(&mut self, check: &str, t: Result<CoeffTable, E>, tol: f64) {
        match t {
            Ok(t) => {
                let mut a = Assertion::upper(self.suite, self.case, check, t.max_delta, tol);
                if !t.uncovered.is_empty() {
                    a.pass = false;
                    a.error = Some(format!("nonzero entries at uncovered offsets {:?}", t.uncovered));
                }
                self.out.assertions.push(a);
            }
            Err(e) => self.out.assertions.push(Assertion::failed(self.suite, self.case, check, tol, e)),
        }
    }

    /// Records the failing labels of a table that is not expected to match.
    fn report(&mut self, table: &str, t: &CoeffTable) {
        for label in &t.mismatched_labels {
            let failing: Vec<f64> =
                t.entries.iter().filter(|e| &e.label == label && !e.pass).map(|e| e.delta).collect();
            self.out.discrepancies.push(Discrepancy {
                case: self.case.to_string(),
                table: table.to_string(),
                label: label.clone(),
                failing_entries: failing.len(),
                max_delta: failing.iter().cloned().fold(0.0, f64::max),
            });
        }
    }
}

pub(super) fn run_suite(suite: Suite, p: &ModelParams, case: &str, tol: &Tolerances) -> Outcome {
    let mut s = Sink::new(suite, case);
    match suite {
        Suite::Relations => relations(&mut s, p, tol),
        Suite::Spectra => spectra(&mut s, p, tol),
        Suite::Bases => bases(&mut s, p, tol),
        Suite::Blocks => blocks(&mut s, p, tol),
        Suite::Split => split(&mut s, p, tol),
        Suite::Overlaps => overlaps(&mut s, p, tol),
        Suite::Fusion | Suite::All => {}
    }
    s.out
}

fn ops(p: &ModelParams, family: Family) -> Result<Vec<MatrixRep>, crate::onsager::OnsagerError> {
    (1..=p.nlevels()).map(|i| operator_matrix(family, i, p)).collect()
}

fn relations(s: &mut Sink, p: &ModelParams, tol: &Tolerances) {
    let (w0, w1) = match (ops(p, Family::W0), ops(p, Family::W1)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return s.upper::<_>("operators", Err::<f64, _>(e), tol.qdg),
    };
    for i in 0..p.nlevels() {
        s.upper(format!("qdg level {}", i + 1), verify_qonsager(&w0[i], &w1[i], p.rho(), p.q.q()), tol.qdg);
        for (family, direct) in [(Family::W0, &w0[i]), (Family::W1, &w1[i])] {
            let r = build_w_tensor(i + 1, family, p)
                .map(|t| max_abs(&(&t.matrix - &direct.matrix)) / direct.max_abs().max(f64::MIN_POSITIVE));
            s.upper(format!("cross-construction {family} level {}", i + 1), r, tol.cross);
        }
    }
    s.upper("commuting W0", verify_commuting(&w0), tol.commuting);
    s.upper("commuting W1", verify_commuting(&w1), tol.commuting);
}

fn spectra(s: &mut Sink, p: &ModelParams, tol: &Tolerances) {
    let all = MultiIndex::all(&p.spins2);
    for level in 1..=p.nlevels() {
        for family in [Family::W0, Family::W1] {
            let r = operator_matrix(family, level, p).map_err(|e| e.to_string()).and_then(|w| {
                let predicted: Vec<C64> = all
                    .iter()
                    .map(|m| match family {
                        Family::W0 => eigenvalue_lambda(level, m, p),
                        Family::W1 => lambda_tilde(level, m, p),
                    })
                    .collect();
                eigenvalues(&w.matrix)
                    .map(|ev| multiset_distance(&predicted, &ev))
                    .ok_or_else(|| "eigenvalue iteration did not converge".to_string())
            });
            s.upper(format!("spectrum {family} level {level}"), r, tol.spectra);
        }
    }
}

fn joint_residual(p: &ModelParams, kind: BasisKind, family: Family) -> Result<f64, String> {
    let b = BasisFamily::build(kind, p).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for level in 1..=p.nlevels() {
        let w = operator_matrix(family, level, p).map_err(|e| e.to_string())?.matrix;
        for k in 0..b.len() {
            let v: DVector<C64> = b.matrix.column(k).into();
            let lam = b.eigenvalues[k][level - 1];
            worst = worst.max((&w * &v - &v * lam).camax() / (v.camax() * lam.norm().max(1.0)));
        }
    }
    Ok(worst)
}

fn bases(s: &mut Sink, p: &ModelParams, tol: &Tolerances) {
    s.upper("joint eigenvectors F / W0", joint_residual(p, BasisKind::F, Family::W0), tol.eigenvectors);
    s.upper("joint eigenvectors Ftilde / W1", joint_residual(p, BasisKind::Ftilde, Family::W1), tol.eigenvectors);
    for kind in [BasisKind::F, BasisKind::Ftilde, BasisKind::G] {
        let r = check_basis_validity(kind, p);
        let v = if r.passes() {
            Ok(0.0)
        } else {
            Err(format!("{} failing conditions, condition {:.3e}", r.failures.len(), r.condition))
        };
        s.upper(format!("validity {kind}"), v, 0.0);
    }
    let degenerate = check_basis_validity(BasisKind::F, &cond1_violation(p));
    s.lower("degenerate F condition", degenerate.condition, tol.degeneracy);
    // Removing eta' rescales every eigenvalue by the same factor and keeps the bases.
    let stripped = p.without_etaprime();
    let r = (|| -> Result<f64, String> {
        let a = BasisFamily::build(BasisKind::F, p).map_err(|e| e.to_string())?;
        let b = BasisFamily::build(BasisKind::F, &stripped).map_err(|e| e.to_string())?;
        let mut worst = max_abs(&(&a.matrix - &b.matrix)) / max_abs(&a.matrix);
        let ratio = a.eigenvalues[0][0] / b.eigenvalues[0][0];
        for (x, y) in a.eigenvalues.iter().flatten().zip(b.eigenvalues.iter().flatten()) {
            worst = worst.max((x - y * ratio).norm() / x.norm().max(1.0));
        }
        Ok(worst)
    })();
    s.upper("eta' removal", r, tol.etaprime);
}

fn blocks(s: &mut Sink, p: &ModelParams, tol: &Tolerances) {
    let f = BasisFamily::build(BasisKind::F, p);
    let ft = BasisFamily::build(BasisKind::Ftilde, p);
    let (f, ft) = match (f, ft) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return s.upper("bases", Err::<f64, _>(e), tol.blocks),
    };
    for level in 1..=p.nlevels() {
        for (family, basis) in [(Family::W1, &f), (Family::W0, &ft)] {
            let r = operator_matrix(family, level, p)
                .map_err(|e| e.to_string())
                .and_then(|w| verify_block_tridiagonal(&w, basis, level, tol.blocks).map_err(|e| e.to_string()))
                .map(|c| c.residual);
            s.upper(format!("tridiagonal {family} level {level} in {}", basis.kind), r, tol.blocks);
        }
    }
    match p.nlevels() {
        1 => s.table("one-site closed form", compare_n1(p, tol.closed_form), tol.closed_form),
        2 => {
            s.table(
                "two-site closed form",
                compare_appendix_b(p, Transcription::Corrected, tol.closed_form),
                tol.closed_form,
            );
            let mut aux = 0.0f64;
            for n1 in 0..=p.spins2[0] {
                for n2 in 0..=p.spins2[1] {
                    let r = w12aux_residuals(p, n1, n2, Transcription::Corrected);
                    aux = aux.max(r.aux1).max(r.aux2).max(r.aux3);
                }
            }
            s.upper("two-site auxiliary identities", Ok::<_, String>(aux), tol.closed_form);
            if let Ok(t) = compare_appendix_b(p, Transcription::AsPrinted, tol.closed_form) {
                s.report("two-site closed form as printed", &t);
            }
        }
        _ => {}
    }
}

fn split(s: &mut Sink, p: &ModelParams, tol: &Tolerances) {
    match verify_bidiagonal_split(p, tol.blocks) {
        Ok(checks) => {
            for c in checks {
                s.upper(
                    format!("bidiagonal {} level {}", c.family, c.level),
                    Ok::<_, String>(c.off_grade.max(c.diagonal)),
                    tol.blocks,
                );
            }
        }
        Err(e) => s.upper("bidiagonal", Err::<f64, _>(e), tol.blocks),
    }
    match p.nlevels() {
        1 => s.table("one-site split coefficients", compare_split_n1(p, tol.closed_form), tol.closed_form),
        2 => match compare_split_n2(p, tol.closed_form) {
            Ok((level2, level1)) => {
                s.table("two-site split coefficients", Ok::<_, String>(level2), tol.closed_form);
                s.report("one-site split forms on level 1 of two sites", &level1);
            }
            Err(e) => s.upper("two-site split coefficients", Err::<f64, _>(e), tol.closed_form),
        },
        _ => {}
    }
}

fn overlaps(s: &mut Sink, p: &ModelParams, tol: &Tolerances) {
    let c = overlap_tensor_f_to_ftilde(p);
    let ct = overlap_tensor_ftilde_to_f(p);
    let d = overlap_d(p);
    let dt = overlap_dtilde(p);
    for (name, t) in [("C", &c), ("Ct", &ct), ("D", &d), ("Dtilde", &dt)] {
        s.upper(
            format!("reconstruction {name}"),
            t.as_ref()
                .map_err(|e| e.to_string())
                .and_then(|t| reconstruction_residual(t, p).map_err(|e| e.to_string())),
            tol.overlaps,
        );
    }
    if let (Ok(c), Ok(d), Ok(dt)) = (&c, &d, &dt) {
        s.upper("biorthogonality", biorthogonality_residual_extended(p), tol.overlaps);
        s.upper("triangle", triangle_residual(c, d, dt), tol.triangle);
        let r = overlap_tensor_f_to_ftilde(&p.without_etaprime())
            .map(|b| max_abs(&(&c.entries - &b.entries)) / max_abs(&c.entries));
        s.upper("eta' removal on C", r, tol.etaprime);
    }
    for level in 1..=p.nlevels() {
        s.upper(
            format!("auxiliary recurrence level {level}"),
            verify_aux_recurrence(level, p).map(|r| r.residual()),
            tol.aux,
        );
    }
    if p.nlevels() == 2 {
        s.upper("nine-term recurrence", nine_term_recurrence_residual(p, Transcription::Corrected), tol.overlaps);
    }
}

/// Fusion, inversion and generating-function identities for `M <= 4` and the
/// classical q-Racah and dual q-Krawtchouk identities for `M <= 6`, at random
/// arguments from draw `draw` of `seed`.
pub fn run_special_functions(seed: u64, draw: usize, tol: &Tolerances, precision: Precision) -> Outcome {
    let case = format!("special#{draw}");
    let mut s = Sink::new(Suite::Fusion, &case);
    let mut rng = rng_for(seed, &[], draw);
    let q = C64::from_polar(rng.gen_range(0.75..=0.9), rng.gen_range(0.2..=0.6));
    let qsq = q * q;
    let points = |count: usize, rng: &mut rand_chacha::ChaCha8Rng| {
        let r = unit_scale(rng);
        (0..count).map(|k| q.powf(k as f64 / 3.0) * r).collect::<Vec<_>>()
    };
    for m in 0..=4usize {
        let (a, b, c, d) = (unit_scale(&mut rng), unit_scale(&mut rng), unit_scale(&mut rng), unit_scale(&mut rng));
        let mut worst: Result<f64, String> = Ok(0.0);
        for n in 0..=m {
            for nt in 0..=m {
                let r = overlap_c(n, nt, a, b, c, d, m, qsq)
                    .and_then(|x| fusion_c(n, nt, a, b, c, d, m, qsq).map(|y| (x - y).norm() / x.norm().max(1.0)))
                    .map_err(|e| e.to_string());
                worst = match (worst, r) {
                    (Ok(w), Ok(v)) => Ok(w.max(v)),
                    (Err(e), _) | (_, Err(e)) => Err(e),
                };
            }
        }
        s.upper(format!("fusion M={m}"), worst, tol.fusion);
        let pts = points(2 * m + 2, &mut rng);
        s.upper(format!("expansion M={m}"), expansion_residual(a, b, c, d, m, qsq, &pts), tol.expansion);
        s.upper(format!("inversion M={m}"), inversion_residual(c, d, m, qsq, &pts), tol.fusion);
        s.upper(
            format!("generating function M={m}"),
            Ok::<_, String>(generating_residual(c, d, m, qsq, &pts)),
            tol.fusion,
        );
    }
    for m in 1..=6usize {
        let prec = match precision {
            Precision::Extended => Precision::Extended,
            Precision::Standard => default_orthogonality_precision(m),
        };
        let (al, be, de, c) = (unit_scale(&mut rng), unit_scale(&mut rng), unit_scale(&mut rng), unit_scale(&mut rng));
        let ok = |v: f64| Ok::<_, String>(v);
        s.upper(
            format!("q-Racah orthogonality M={m}"),
            ok(qracah_orthogonality_residual(m, al, be, de, qsq, prec)),
            tol.classical,
        );
        s.upper(format!("q-Racah recurrence M={m}"), ok(qracah_recurrence_residual(m, al, be, de, qsq)), tol.classical);
        s.upper(
            format!("dual q-Krawtchouk orthogonality M={m}"),
            ok(dual_qkrawtchouk_orthogonality_residual(m, c, qsq, prec)),
            tol.classical,
        );
        s.upper(
            format!("dual q-Krawtchouk recurrence M={m}"),
            ok(dual_qkrawtchouk_recurrence_residual(m, c, qsq)),
            tol.classical,
        );
    }
    s.out
}
