use nalgebra::DMatrix;
use serde::Serialize;

use super::coefficients::overlap_c;
use super::tensor::{overlap_tensor_f_to_ftilde, OverlapTensor};
use super::OverlapError;
use crate::bases::{factor_coeffs, z_pm, zt_pm, BasisKind};
use crate::onsager::{ModelParams, OnsagerError};
use crate::polyops::linalg::{solve, SINGULAR_CONDITION};
use crate::qkernel::C64;
use crate::structure::{coeffs_closed_form_n2, level_coefficients, StructureError, Transcription, NINE_LABELS};

/// Residuals of the one-variable level-`i` auxiliary operator checks, maximised
/// over all source and target prefix sums.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AuxRecurrence {
    pub level: usize,
    /// Extracted three-term action against the closed-form coefficients.
    pub extraction: f64,
    /// Expansion of `w f_n` in the `ft` basis against `lambdat C_n^nt`.
    pub expansion: f64,
    /// The induced three-term recurrence on `C_n^nt`.
    pub recurrence: f64,
}

impl AuxRecurrence {
    pub fn residual(&self) -> f64 {
        self.extraction.max(self.expansion).max(self.recurrence)
    }
}

/// `lambdat^(i)` at a target prefix with sum `prefix_sum` over levels `1..=i`.
fn lambda_tilde_at(p: &ModelParams, level: usize, prefix_sum: i64) -> C64 {
    let s = p.spin_sum2(level) - 2 * prefix_sum;
    p.eps_prefactor() / 2.0 * (p.q.pow(-s) / p.exp_alphastar + p.exp_alphastar * p.q.pow(s))
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

/// Builds `w = b1 z (q^{2j} T - q^{-2j}) + c1 z^-1 (T - 1) + lambdat^(i-1) q^{2j} T`
/// (`T: z -> q^-2 z`) on polynomials of degree `2j` in one variable, applies it
/// to the level-`i` factors `f_n` and compares with the closed-form
/// coefficients and with `sum_nt lambdat^(i) C_n^nt ft_nt`.
pub fn verify_aux_recurrence(level: usize, p: &ModelParams) -> Result<AuxRecurrence, OverlapError> {
    p.validate()?;
    if level == 0 || level > p.nlevels() {
        return Err(OnsagerError::LevelOutOfRange { level, nlevels: p.nlevels() }.into());
    }
    let q = &p.q;
    let t = p.spins2[level - 1] as usize;
    let ti = t as i64;
    let (b1, c1) = (p.b1(level), p.c1(level));
    let max_prefix = p.spin_sum2(level - 1);
    let mut out = AuxRecurrence { level, extraction: 0.0, expansion: 0.0, recurrence: 0.0 };
    for s in 0..=max_prefix {
        for st in 0..=max_prefix {
            let lt = lambda_tilde_at(p, level - 1, st);
            let mut w = DMatrix::<C64>::zeros(t + 1, t + 1);
            for m in 0..=t {
                let mi = m as i64;
                if m < t {
                    w[(m + 1, m)] += b1 * (q.pow(ti - 2 * mi) - q.pow(-ti));
                }
                if m > 0 {
                    w[(m - 1, m)] += c1 * (q.pow(-2 * mi) - 1.0);
                }
                w[(m, m)] += lt * q.pow(ti - 2 * mi);
            }
            let fb = DMatrix::from_fn(t + 1, t + 1, |r, c| factor_coeffs(BasisKind::F, p, level, c as u32, s)[r]);
            let tb = DMatrix::from_fn(t + 1, t + 1, |r, c| factor_coeffs(BasisKind::Ftilde, p, level, c as u32, st)[r]);
            let image = &w * &fb;
            let x = solve(&fb, &image, SINGULAR_CONDITION)?;
            let y = solve(&tb, &image, SINGULAR_CONDITION)?;
            let (zm, zp) = z_pm(p, level, s);
            let (tm, tp) = zt_pm(p, level, st);
            let qsq = q.qsq();
            let cmat = DMatrix::from_fn(t + 1, t + 1, |n, nt| overlap_c(n, nt, zm, zp, tm, tp, t, qsq));
            let cmat = DMatrix::from_iterator(t + 1, t + 1, cmat.iter().cloned().collect::<Result<Vec<_>, _>>()?);
            let cval = |n: i64, nt: usize| if n < 0 || n > ti { C64::new(0.0, 0.0) } else { cmat[(n as usize, nt)] };
            for n in 0..=t {
                let k = level_coefficients(p, level, s, st, n as u32);
                let above = if n < t { x[(n + 1, n)] } else { C64::new(0.0, 0.0) };
                let below = if n > 0 { x[(n - 1, n)] } else { C64::new(0.0, 0.0) };
                out.extraction = out
                    .extraction
                    .max(rel(k.diagonal, x[(n, n)]))
                    .max(rel(k.raising, above))
                    .max(rel(k.lowering, below));
                for nt in 0..=t {
                    let lam = lambda_tilde_at(p, level, st + nt as i64);
                    let lhs = lam * cmat[(n, nt)];
                    out.expansion = out.expansion.max(rel(y[(nt, n)], lhs));
                    let ni = n as i64;
                    let rhs = k.raising * cval(ni + 1, nt) + k.diagonal * cval(ni, nt) + k.lowering * cval(ni - 1, nt);
                    out.recurrence = out.recurrence.max(rel(lhs, rhs));
                }
            }
        }
    }
    Ok(out)
}

/// For two sites, `lambdat^(2)(nt) C[n, nt] = sum_off coeff_off(n) C[n + off, nt]`
/// with the nine closed-form coefficients; returns the largest relative mismatch.
pub fn nine_term_recurrence_residual(p: &ModelParams, transcription: Transcription) -> Result<f64, OverlapError> {
    if p.nlevels() != 2 {
        return Err(StructureError::UnsupportedLevels(p.nlevels()).into());
    }
    let c: OverlapTensor = overlap_tensor_f_to_ftilde(p)?;
    let (t1, t2) = (p.spins2[0] as i64, p.spins2[1] as i64);
    let mut worst = 0.0f64;
    for n1 in 0..=t1 {
        for n2 in 0..=t2 {
            let coeffs = coeffs_closed_form_n2(n1 as u32, n2 as u32, p, transcription)?;
            for nt1 in 0..=t1 as u32 {
                for nt2 in 0..=t2 as u32 {
                    let lam = lambda_tilde_at(p, 2, (nt1 + nt2) as i64);
                    let lhs = lam * c.get(&[n1 as u32, n2 as u32], &[nt1, nt2]).unwrap_or_default();
                    let mut rhs = C64::new(0.0, 0.0);
                    let mut scale = lhs.norm();
                    for (slot, (_, (d1, d2))) in NINE_LABELS.iter().enumerate() {
                        let (m1, m2) = (n1 + *d1 as i64, n2 + *d2 as i64);
                        if !(0..=t1).contains(&m1) || !(0..=t2).contains(&m2) {
                            continue;
                        }
                        let term =
                            coeffs.values[slot] * c.get(&[m1 as u32, m2 as u32], &[nt1, nt2]).unwrap_or_default();
                        scale = scale.max(term.norm());
                        rhs += term;
                    }
                    worst = worst.max((lhs - rhs).norm() / scale.max(1.0));
                }
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::params;

    #[test]
    fn auxiliary_operator_closes_on_every_level() {
        for spins in [vec![1], vec![3], vec![2, 3], vec![1, 3, 2]] {
            let p = params(&spins);
            for level in 1..=spins.len() {
                let r = verify_aux_recurrence(level, &p).unwrap();
                assert!(r.residual() < 1e-9, "{spins:?} level {level}: {r:?}");
            }
        }
    }

    #[test]
    fn nine_term_recurrence_on_overlaps() {
        for spins in [[1u32, 1], [2, 3], [3, 2]] {
            let p = params(&spins);
            let r = nine_term_recurrence_residual(&p, Transcription::Corrected).unwrap();
            assert!(r < 1e-8, "{spins:?}: {r}");
        }
        let p = params(&[2, 2]);
        assert!(nine_term_recurrence_residual(&p, Transcription::AsPrinted).unwrap() > 1e-4);
    }
}
