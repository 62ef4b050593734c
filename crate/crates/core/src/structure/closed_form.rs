use serde::{Deserialize, Serialize};

use super::StructureError;
use crate::bases::{factor_roots, z_pm, zt_pm, BasisKind};
use crate::onsager::ModelParams;
use crate::qkernel::{racah_b, racah_c, C64};

/// Raising, lowering and diagonal coefficients of a three-term action.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LevelCoeffs {
    pub raising: C64,
    pub lowering: C64,
    pub diagonal: C64,
}

/// Three-term coefficients of the one-site operator
/// `b1 z (q^{2j} T-^2 - q^{-2j}) + c1 z^{-1} (T-^2 - 1) + lambdat q^{2j} T-^2`
/// on the level-`i` factors `f_n`, with `z±` on a source prefix of sum
/// `prefix_sum` and `zt±` on a target prefix of sum `dual_prefix_sum`.
///
/// With `M = 2j`, `(a, b, g, d) = (q^{-4j} z+/zt+, q^{-2} zt+/z-, q^{-4j-2}, zt-/zt+)`
/// and `B_n`, `C_n` the q-Racah recurrence coefficients at these arguments:
/// - raising `= P (1 - q^{2(1+n-2j)} z+/zt-) / (1 - q^{-2n} z-/zt-) B_n`
/// - lowering `= P (1 - q^{2(1-n)} z-/zt-) / (1 - q^{2(n-2j)} z+/zt-) C_n`
/// - diagonal `= P (1 + q^{-4j} zt-/zt+ - B_n - C_n)`
///
/// where `P = -b1 q^{2j} zt+`.
pub fn level_coefficients(p: &ModelParams, level: usize, prefix_sum: i64, dual_prefix_sum: i64, n: u32) -> LevelCoeffs {
    let q = &p.q;
    let t = p.spins2[level - 1] as i64;
    let ni = n as i64;
    let (zm, zp) = z_pm(p, level, prefix_sum);
    let (tm, tp) = zt_pm(p, level, dual_prefix_sum);
    let qsq = q.qsq();
    let (al, be, ga, de) = (q.pow(-2 * t) * zp / tp, q.pow(-2) * tp / zm, q.pow(-2 * t - 2), tm / tp);
    let b = racah_b(n as usize, al, be, ga, de, qsq);
    let c = racah_c(n as usize, al, be, ga, de, qsq);
    let pre = -p.b1(level) * q.pow(t) * tp;
    LevelCoeffs {
        raising: pre * (1.0 - q.pow(2 * (1 + ni - t)) * zp / tm) / (1.0 - q.pow(-2 * ni) * zm / tm) * b,
        lowering: pre * (1.0 - q.pow(2 * (1 - ni)) * zm / tm) / (1.0 - q.pow(2 * (ni - t)) * zp / tm) * c,
        diagonal: pre * (1.0 + q.pow(-2 * t) * tm / tp - b - c),
    }
}

/// Coefficients of `W1^(1) F_{n1} = B F_{n1+1} + C F_{n1-1} + A F_{n1}` for one site.
pub fn coeffs_closed_form_n1(n1: u32, p: &ModelParams) -> Result<LevelCoeffs, StructureError> {
    p.validate()?;
    Ok(level_coefficients(p, 1, 0, 0, n1))
}

/// Which reading of the printed two-site helper polynomials to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transcription {
    /// `v`, `w` with a linear last term in `z+`, as printed.
    AsPrinted,
    /// `v`, `w` with `z+^2` in the last term.
    Corrected,
}

/// Labels and index offsets `(dn1, dn2)` of the nine two-site coefficients.
pub const NINE_LABELS: [(&str, (i32, i32)); 9] = [
    ("B[10]", (1, 0)),
    ("B[01]", (0, 1)),
    ("B[-12]", (-1, 2)),
    ("C[-10]", (-1, 0)),
    ("C[0-1]", (0, -1)),
    ("C[1-2]", (1, -2)),
    ("A[1-1]", (1, -1)),
    ("A[-11]", (-1, 1)),
    ("A[00]", (0, 0)),
];

/// The nine coefficients of `W1^(2) F_{n1 n2}`, in the order of [`NINE_LABELS`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NineCoeffs {
    pub values: [C64; 9],
}

impl NineCoeffs {
    pub fn get(&self, label: &str) -> Option<C64> {
        NINE_LABELS.iter().position(|(l, _)| *l == label).map(|k| self.values[k])
    }
}

/// The auxiliary quantities `A2, B2, C2, A2', B2', C2', A_aux, B_aux, C_aux`
/// and the helper polynomials `x, u, v, w` at one index `(n1, n2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AppendixBTerms {
    pub a2: C64,
    pub b2: C64,
    pub c2: C64,
    pub a2p: C64,
    pub b2p: C64,
    pub c2p: C64,
    pub a_aux: C64,
    pub b_aux: C64,
    pub c_aux: C64,
    pub x: C64,
    pub u: C64,
    pub v: C64,
    pub w: C64,
}

/// Evaluates the two-site auxiliary coefficients with `z±^(2)` on the prefix `n1`.
pub fn appendix_b_terms(p: &ModelParams, n1: u32, n2: u32, transcription: Transcription) -> AppendixBTerms {
    let qp = |k: i64| p.q.pow(k);
    let t = p.spins2[1] as i64;
    let n = n2 as i64;
    let (zm, zp) = z_pm(p, 2, n1 as i64);
    let b1 = p.b1(2);
    let c1 = p.c1(2);
    let a1 = level_coefficients(p, 1, 0, 0, n1).diagonal;
    let one = C64::new(1.0, 0.0);
    let q2 = qp(2);

    let a2 = zm
        * qp(2 - 2 * t)
        * (one + q2)
        * (one - qp(-2 * n))
        * (zp * zp * qp(4 * n - 4 * t) - zp * zm * qp(-2 * t) * (qp(2 * n) + one) + zm * zm * qp(-2 * n))
        / ((zm * qp(-2 * n) - zp * qp(2 - 2 * t + 2 * n))
            * (zm * qp(2 - 2 * n) - zp * qp(2 - 2 * t + 2 * n))
            * (zp * qp(-2 * t + 2 * n) - zm * qp(2 - 2 * n)));
    let b2 = qp(2 - 2 * t) * (zm - zp * qp(2 - 2 * t + 2 * n)) * (zm - zp * qp(2 * n - 2 * t))
        / ((zm * qp(2 - 2 * n) - zp * qp(2 - 2 * t + 2 * n)) * (zm * qp(-2 * n) - zp * qp(2 - 2 * t + 2 * n)));
    let c2 = zm * zm * qp(2 - 2 * t) * (qp(2 - 2 * n) - one) * (qp(-2 * n) - one)
        / ((zm * qp(2 - 2 * n) - zp * qp(2 - 2 * t + 2 * n)) * (zm * qp(2 - 2 * n) - zp * qp(-2 * t + 2 * n)));
    let a2p = zp
        * qp(2 - 2 * t)
        * (one + q2)
        * (qp(-2 * t) - qp(-2 * n))
        * (zp * zp * qp(4 * n - 2 * t) - zp * zm * qp(-2 * t) * (qp(2 * t) + qp(2 * n)) + zm * zm * qp(-2 * n))
        / ((zp * qp(2 * n - 2 * t) - zm * qp(2 - 2 * n))
            * (zp * qp(2 - 2 * t + 2 * n) - zm * qp(2 - 2 * n))
            * (zp * qp(2 - 2 * t + 2 * n) - zm * qp(-2 * n)));
    let b2p = zp * zp * qp(2 - 2 * t) * (qp(2 - 2 * t + 2 * n) - one) * (qp(2 * n - 2 * t) - one)
        / ((zp * qp(2 - 2 * t + 2 * n) - zm * qp(-2 * n)) * (zp * qp(2 - 2 * t + 2 * n) - zm * qp(2 - 2 * n)));
    let c2p = qp(2 - 2 * t) * (zm * qp(-2 * n) - zp) * (zm * qp(2 - 2 * n) - zp)
        / ((zp * qp(2 - 2 * t + 2 * n) - zm * qp(2 - 2 * n)) * (zp * qp(2 * n - 2 * t) - zm * qp(2 - 2 * n)));

    let k = (one + q2) * (qp(2 * t + 2) + one);
    let x = qp(4 * n + 3 * t) * (k - qp(-2 * n + 2 * t + 2)) * zp * zm * zm
        - qp(8 * n + t) * (k - qp(2 * n + 2)) * zp * zp * zm
        + qp(10 * n + t + 2) * zp * zp * zp
        - qp(2 * n + 5 * t + 2) * zm * zm * zm;
    let u = qp(6 * n + 4 * t) * (qp(2 * n - 2 * t) - qp(-2 * n)) * (one + q2) * zp * zm
        + (qp(8 * n + 2 * t) * (one + q2) - qp(10 * n) * (one + qp(2 * t + 2))) * zp * zp
        - (qp(4 * n + 4 * t) * (one + q2) - qp(2 * n + 4 * t) * (one + qp(2 * t + 2))) * zm * zm;
    let last = match transcription {
        Transcription::AsPrinted => zp,
        Transcription::Corrected => zp * zp,
    };
    let v = (one + qp(2 * n - 2)) * zp * zm - qp(2 * t - 2 * n) * zm * zm - qp(4 * n - 2 * t - 2) * last;
    let w = (one + qp(2 * n - 2 * t + 2)) * zp * zm - qp(-2 * n) * zm * zm - qp(4 * n - 2 * t + 2) * last;
    let den = (qp(4 * n) * zp - qp(2 * t) * zm)
        * (qp(4 * n) * zp - qp(2 * t + 2) * zm)
        * (qp(4 * n) * zp - qp(2 * t - 2) * zm);
    let a_aux = ((qp(-t) * zp * zm * b1 + qp(-2) * c1) * u + qp(-2) * a1 * x) / den;
    let b_aux = (one - qp(2 * n - 2 * t))
        * qp(4 * n + 4 * t)
        * (qp(4 * n - 3 * t + 4) * zp * zp * b1 + qp(2 * n - t + 2) * zp * a1 + c1)
        * v
        / den;
    let c_aux = (one - qp(2 * n))
        * qp(4 * n + 4 * t - 2)
        * (qp(-4 * n + t + 4) * zm * zm * b1 + qp(-2 * n + t + 2) * zm * a1 + c1)
        * w
        / den;
    AppendixBTerms { a2, b2, c2, a2p, b2p, c2p, a_aux, b_aux, c_aux, x, u, v, w }
}

/// The nine coefficients of `W1^(2) F_{n1 n2}`:
/// `B[10] = q^{2j2} B2 B1`, `B[01] = B_aux`, `B[-12] = q^{2j2} B2' C1`,
/// `C[-10] = q^{2j2} C2' C1`, `C[0-1] = C_aux`, `C[1-2] = q^{2j2} C2 B1`,
/// `A[1-1] = q^{2j2} A2 B1`, `A[-11] = q^{2j2} A2' C1`, `A[00] = A_aux`,
/// with `B1, C1` the one-site raising and lowering coefficients at `n1`.
pub fn coeffs_closed_form_n2(
    n1: u32,
    n2: u32,
    p: &ModelParams,
    transcription: Transcription,
) -> Result<NineCoeffs, StructureError> {
    p.validate()?;
    if p.nlevels() != 2 {
        return Err(StructureError::UnsupportedLevels(p.nlevels()));
    }
    let one_site = level_coefficients(p, 1, 0, 0, n1);
    let t = appendix_b_terms(p, n1, n2, transcription);
    let s = p.q.pow(p.spins2[1] as i64);
    Ok(NineCoeffs {
        values: [
            s * t.b2 * one_site.raising,
            t.b_aux,
            s * t.b2p * one_site.lowering,
            s * t.c2p * one_site.lowering,
            t.c_aux,
            s * t.c2 * one_site.raising,
            s * t.a2 * one_site.raising,
            s * t.a2p * one_site.lowering,
            t.a_aux,
        ],
    })
}

/// Residuals of the three one-variable expansion identities behind the
/// two-site coefficients, each evaluated at `2 j2 + 2` points:
/// 1. `(b1 q^{2j2} z + c1/z + q^{2j2} A1) f_{n2}(q^{-2} z) - (b1 q^{-2j2} z + c1/z) f_{n2}(z)
///     = B_aux f_{n2+1} + C_aux f_{n2-1} + A_aux f_{n2}`
/// 2. `f_{n2}(q^{-2} z) = B2 f_{n2} + C2 f_{n2-2} + A2 f_{n2-1}` with the right side on prefix `n1+1`
/// 3. `f_{n2}(q^{-2} z) = B2' f_{n2+2} + C2' f_{n2} + A2' f_{n2+1}` with the right side on prefix `n1-1`
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct W12AuxResiduals {
    pub aux1: f64,
    pub aux2: f64,
    pub aux3: f64,
}

pub fn w12aux_residuals(p: &ModelParams, n1: u32, n2: u32, transcription: Transcription) -> W12AuxResiduals {
    let t2 = p.spins2[1] as i64;
    let terms = appendix_b_terms(p, n1, n2, transcription);
    let a1 = level_coefficients(p, 1, 0, 0, n1).diagonal;
    let (b1, c1) = (p.b1(2), p.c1(2));
    let s = n1 as i64;
    let f = |n: i64, prefix: i64, z: C64| -> C64 {
        if n < 0 || n > t2 {
            return C64::new(0.0, 0.0);
        }
        factor_roots(BasisKind::F, p, 2, n as u32, prefix).iter().map(|&r| z - r).product()
    };
    let n = n2 as i64;
    let r = C64::from_polar(1.07, 0.61);
    let points: Vec<C64> = (0..t2 + 2).map(|k| p.q.cpow(C64::new(k as f64 / 3.0, 0.0)) * r).collect();
    let qt = p.q.pow(t2);
    let (mut aux1, mut aux2, mut aux3) = (0.0f64, 0.0f64, 0.0f64);
    let measure = |lhs: C64, rhs: &[C64]| -> f64 {
        let sum: C64 = rhs.iter().sum();
        let scale = rhs.iter().map(|v| v.norm()).sum::<f64>().max(lhs.norm()).max(1.0);
        (lhs - sum).norm() / scale
    };
    for &z in &points {
        let zs = z * p.q.pow(-2);
        let lhs1 = (b1 * qt * z + c1 / z + qt * a1) * f(n, s, zs) - (b1 / qt * z + c1 / z) * f(n, s, z);
        aux1 = aux1.max(measure(
            lhs1,
            &[terms.b_aux * f(n + 1, s, z), terms.c_aux * f(n - 1, s, z), terms.a_aux * f(n, s, z)],
        ));
        let lhs = f(n, s, zs);
        aux2 = aux2.max(measure(
            lhs,
            &[terms.b2 * f(n, s + 1, z), terms.c2 * f(n - 2, s + 1, z), terms.a2 * f(n - 1, s + 1, z)],
        ));
        aux3 = aux3.max(measure(
            lhs,
            &[terms.b2p * f(n + 2, s - 1, z), terms.c2p * f(n, s - 1, z), terms.a2p * f(n + 1, s - 1, z)],
        ));
    }
    W12AuxResiduals { aux1, aux2, aux3 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qkernel::close;
    use crate::testutil::params;

    #[test]
    fn one_site_boundaries_vanish() {
        for t in 1..=3u32 {
            let p = params(&[t]);
            let top = coeffs_closed_form_n1(t, &p).unwrap();
            assert!(top.raising.norm() < 1e-12 * top.diagonal.norm().max(1.0));
            let bottom = coeffs_closed_form_n1(0, &p).unwrap();
            assert!(bottom.lowering.norm() == 0.0);
        }
    }

    #[test]
    fn two_site_lowering_coefficients_vanish_at_origin() {
        let p = params(&[2, 2]);
        let c = coeffs_closed_form_n2(0, 0, &p, Transcription::Corrected).unwrap();
        for label in ["C[-10]", "C[0-1]", "C[1-2]", "A[-11]", "A[1-1]", "B[-12]"] {
            let v = c.get(label).unwrap();
            assert!(v.norm() < 1e-12, "{label}: {v}");
        }
    }

    #[test]
    fn auxiliary_identities_hold_with_corrected_helpers() {
        for spins in [[1u32, 1], [2, 3], [3, 2]] {
            let p = params(&spins);
            for n1 in 0..=spins[0] {
                for n2 in 0..=spins[1] {
                    let r = w12aux_residuals(&p, n1, n2, Transcription::Corrected);
                    assert!(r.aux1 < 1e-9 && r.aux2 < 1e-9 && r.aux3 < 1e-9, "{spins:?} ({n1},{n2}) {r:?}");
                }
            }
        }
    }

    #[test]
    fn as_printed_helpers_break_only_the_first_identity() {
        let p = params(&[2, 2]);
        let r = w12aux_residuals(&p, 1, 1, Transcription::AsPrinted);
        assert!(r.aux1 > 1e-4);
        assert!(r.aux2 < 1e-9 && r.aux3 < 1e-9);
        let printed = appendix_b_terms(&p, 1, 1, Transcription::AsPrinted);
        let fixed = appendix_b_terms(&p, 1, 1, Transcription::Corrected);
        assert!(close(printed.a_aux, fixed.a_aux, 0.0));
        assert!(!close(printed.b_aux, fixed.b_aux, 1e-6));
    }
}
