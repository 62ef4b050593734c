use nalgebra::DMatrix;
use serde::Serialize;

use super::blocks::extract_action;
use super::StructureError;
use crate::bases::{lambda_tilde, z_bar, z_pm, BasisFamily, BasisKind, MultiIndex};
use crate::onsager::{operator_matrix, Family, ModelParams};
use crate::qkernel::C64;

/// Raising coefficient of `W0` and lowering coefficient of `W1` on the
/// level-`i` factor of the split basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SplitCoeffs {
    /// `D_n = b0 (1 - q^{2(2j-n)}) (zbar+ q^{2j-2} - z+ q^{2n-2j})`
    pub raising: C64,
    /// `E_n = b1 (q^{2n} - 1) (zbar- q^{-2j} - z- q^{2-2j-2n})`
    pub lowering: C64,
}

/// Level-`i` split coefficients at index `n` with source prefix sum `prefix_sum`.
pub fn split_coefficients_level(p: &ModelParams, level: usize, n: u32, prefix_sum: i64) -> SplitCoeffs {
    let q = &p.q;
    let t = p.spins2[level - 1] as i64;
    let n = n as i64;
    let (zm, zp) = z_pm(p, level, prefix_sum);
    let (bm, bp) = z_bar(p, level, prefix_sum);
    SplitCoeffs {
        raising: p.b0(level) * (1.0 - q.pow(2 * t - 2 * n)) * (bp * q.pow(t - 2) - zp * q.pow(2 * n - t)),
        lowering: p.b1(level) * (q.pow(2 * n) - 1.0) * (bm * q.pow(-t) - zm * q.pow(2 - t - 2 * n)),
    }
}

/// Result of checking that `W0^(i)` raises and `W1^(i)` lowers the level-`i`
/// grade of the split basis by exactly one, with the expected diagonals.
#[derive(Clone, Debug, Serialize)]
pub struct SplitCheck {
    pub level: usize,
    pub family: Family,
    /// Largest off-diagonal entry outside the allowed grade step, relative to the largest entry.
    pub off_grade: f64,
    /// Largest relative deviation of the diagonal from the predicted eigenvalue.
    pub diagonal: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn off_grade(x: &DMatrix<C64>, basis: &BasisFamily, level: usize, step: i64) -> f64 {
    let scale = x.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if scale == 0.0 {
        return 0.0;
    }
    let mut worst = 0.0f64;
    for c in 0..basis.len() {
        for r in 0..basis.len() {
            if r != c && basis.grade(level, r) != basis.grade(level, c) + step {
                worst = worst.max(x[(r, c)].norm());
            }
        }
    }
    worst / scale
}

/// Runs the split check for every level and both families.
pub fn verify_bidiagonal_split(p: &ModelParams, tolerance: f64) -> Result<Vec<SplitCheck>, StructureError> {
    let basis = BasisFamily::build(BasisKind::G, p)?;
    let mut out = Vec::new();
    for level in 1..=p.nlevels() {
        for family in [Family::W0, Family::W1] {
            let x = extract_action(&operator_matrix(family, level, p)?, &basis)?;
            let step = if family == Family::W0 { 1 } else { -1 };
            let diagonal = (0..basis.len())
                .map(|k| {
                    let predicted = match family {
                        Family::W0 => basis.eigenvalues[k][level - 1],
                        Family::W1 => lambda_tilde(level, &MultiIndex { n: basis.indices[k].clone() }, p),
                    };
                    (x[(k, k)] - predicted).norm() / predicted.norm().max(1.0)
                })
                .fold(0.0, f64::max);
            let off_grade = off_grade(&x, &basis, level, step);
            out.push(SplitCheck {
                level,
                family,
                off_grade,
                diagonal,
                tolerance,
                pass: off_grade <= tolerance && diagonal <= tolerance,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::params;

    #[test]
    fn split_holds_on_small_chains() {
        for spins in [vec![1], vec![3], vec![1, 2], vec![2, 1, 1]] {
            let p = params(&spins);
            for c in verify_bidiagonal_split(&p, 1e-8).unwrap() {
                assert!(c.pass, "{spins:?} {c:?}");
            }
        }
    }

    #[test]
    fn endpoint_coefficients_vanish() {
        let p = params(&[2]);
        assert_eq!(split_coefficients_level(&p, 1, 2, 0).raising.norm(), 0.0);
        assert_eq!(split_coefficients_level(&p, 1, 0, 0).lowering.norm(), 0.0);
    }
}
